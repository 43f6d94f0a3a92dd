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

// Line-oriented key/value text used by every model file. Each line is a key
// followed by space-separated tokens; doubles are printed in shortest
// round-trip form so save/load is bit exact.

#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace stratshield {

std::string format_double(double v);
double parse_double(const std::string& token);
std::int64_t parse_int(const std::string& token);

// Percent-encodes whitespace, '%' and control characters.
std::string escape_token(const std::string& raw);
std::string unescape_token(const std::string& token);

class TextWriter {
 public:
  explicit TextWriter(std::ostream& os) : os_(os) {}

  TextWriter& key(const std::string& k);
  TextWriter& token(const std::string& t);
  TextWriter& value(double v);
  TextWriter& value(std::int64_t v);
  TextWriter& value(std::size_t v) { return value(static_cast<std::int64_t>(v)); }
  TextWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
  void end_line();

 private:
  std::ostream& os_;
  bool line_open_ = false;
};

class TextReader {
 public:
  explicit TextReader(std::istream& is) : is_(is) {}

  // Reads the next non-empty line; returns false at end of input.
  bool next(std::vector<std::string>& tokens);
  // Next line must start with `key`; returns the remaining tokens.
  std::vector<std::string> expect(const std::string& key);
  std::vector<std::string> expect(const std::string& key, std::size_t n_tokens);

  std::size_t line_number() const noexcept { return line_; }

 private:
  std::istream& is_;
  std::size_t line_ = 0;
};

}  // namespace stratshield
