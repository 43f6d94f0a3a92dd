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

#pragma once

#include <stdexcept>
#include <string>

namespace stratshield {

// Mirrors the status codes of the C API one-to-one.
enum class ErrorCode {
  kInvalidArgument = 1,
  kSchema = 2,
  kType = 3,
  kLatticeTooLarge = 4,
  kDivergence = 5,
  kOverflow = 6,
  kParse = 7,
  kIo = 8,
  kEmptyData = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what)
      : Error(ErrorCode::kSchema, what) {}
};

class TypeError : public Error {
 public:
  explicit TypeError(const std::string& what) : Error(ErrorCode::kType, what) {}
};

class LatticeTooLarge : public Error {
 public:
  explicit LatticeTooLarge(const std::string& what)
      : Error(ErrorCode::kLatticeTooLarge, what) {}
};

class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& what)
      : Error(ErrorCode::kDivergence, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what)
      : Error(ErrorCode::kParse, what) {}
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw Error(ErrorCode::kInvalidArgument, what);
}

}  // namespace stratshield
