/*
 * Copyright 2026 The StratShield Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "stratshield/serialize.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "stratshield/error.hpp"

namespace stratshield {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& token) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && token.front() == '+') ++first;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ParseError("not a number: '" + token + "'");
  }
  return v;
}

std::int64_t parse_int(const std::string& token) {
  std::int64_t v = 0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw ParseError("not an integer: '" + token + "'");
  }
  return v;
}

std::string escape_token(const std::string& raw) {
  if (raw.empty()) return "%";
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : raw) {
    if (c <= 0x20 || c == '%' || c == 0x7F) {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    } else {
      out += static_cast<char>(c);
    }
  }
  return out;
}

std::string unescape_token(const std::string& token) {
  if (token == "%") return {};
  std::string out;
  for (std::size_t i = 0; i < token.size(); ++i) {
    if (token[i] != '%') {
      out += token[i];
      continue;
    }
    if (i + 2 >= token.size()) {
      throw ParseError("truncated escape in '" + token + "'");
    }
    unsigned value = 0;
    auto res = std::from_chars(token.data() + i + 1, token.data() + i + 3, value, 16);
    if (res.ec != std::errc() || res.ptr != token.data() + i + 3) {
      throw ParseError("bad escape in '" + token + "'");
    }
    out += static_cast<char>(value);
    i += 2;
  }
  return out;
}

TextWriter& TextWriter::key(const std::string& k) {
  if (line_open_) end_line();
  os_ << k;
  line_open_ = true;
  return *this;
}

TextWriter& TextWriter::token(const std::string& t) {
  os_ << ' ' << escape_token(t);
  return *this;
}

TextWriter& TextWriter::value(double v) {
  os_ << ' ' << format_double(v);
  return *this;
}

TextWriter& TextWriter::value(std::int64_t v) {
  os_ << ' ' << v;
  return *this;
}

void TextWriter::end_line() {
  if (line_open_) os_ << '\n';
  line_open_ = false;
}

bool TextReader::next(std::vector<std::string>& tokens) {
  std::string line;
  while (std::getline(is_, line)) {
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    tokens.clear();
    std::string t;
    while (ls >> t) tokens.push_back(t);
    if (!tokens.empty() && tokens.front().front() != '#') return true;
  }
  return false;
}

std::vector<std::string> TextReader::expect(const std::string& key) {
  std::vector<std::string> tokens;
  if (!next(tokens)) throw ParseError("unexpected end of model text, wanted '" + key + "'");
  if (tokens.front() != key) {
    throw ParseError("line " + std::to_string(line_) + ": expected '" + key + "', got '" +
                     tokens.front() + "'");
  }
  tokens.erase(tokens.begin());
  return tokens;
}

std::vector<std::string> TextReader::expect(const std::string& key, std::size_t n_tokens) {
  auto tokens = expect(key);
  if (tokens.size() != n_tokens) {
    throw ParseError("line " + std::to_string(line_) + ": '" + key + "' expects " +
                     std::to_string(n_tokens) + " values, got " +
                     std::to_string(tokens.size()));
  }
  return tokens;
}

}  // namespace stratshield
