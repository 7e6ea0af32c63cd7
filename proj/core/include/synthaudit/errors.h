// Copyright 2026 The SynthAudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SYNTHAUDIT_ERRORS_H_
#define SYNTHAUDIT_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace synthaudit {

// Precondition violated by the caller (bad sizes, bad parameters).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Two datasets (or a dataset and a fitted object) disagree on their schema.
class SchemaMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Malformed CSV or config input. Line and column are 1-based; 0 means
// "not applicable".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : std::runtime_error(Format(message, line, column)),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string Format(const std::string& message, std::size_t line,
                            std::size_t column) {
    std::string out = "line " + std::to_string(line);
    if (column > 0) out += ", column " + std::to_string(column);
    return out + ": " + message;
  }

  std::size_t line_;
  std::size_t column_;
};

// The provider refused a call because a configured quota was reached.
class QuotaExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An attack ran out of its own call budget. Phases catch this and return
// partial results.
class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An attack step could not reach a conclusive answer (e.g. no valid padding
// record, or a metrics response that fails for an unexpected reason).
class AttackError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Transport-level failure talking to a remote provider.
class RemoteError : public std::runtime_error {
 public:
  RemoteError(const std::string& message, int status)
      : std::runtime_error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

}  // namespace synthaudit

#endif  // SYNTHAUDIT_ERRORS_H_
