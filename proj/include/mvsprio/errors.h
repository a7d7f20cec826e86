// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MVSPRIO_ERRORS_H_
#define MVSPRIO_ERRORS_H_

#include <stdexcept>
#include <string>

namespace mvsprio {

// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kParseError = 3,
  kInvariantViolation = 4,
  kIoError = 1,
};

// Base class of all library errors; carries the exit code the CLI reports.
class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ExitCode::kConfigError, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what)
      : Error(ExitCode::kParseError, what) {}
};

class InvariantViolation : public Error {
 public:
  explicit InvariantViolation(const std::string& what)
      : Error(ExitCode::kInvariantViolation, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ExitCode::kIoError, what) {}
};

// A view cluster cannot be formed (fewer than two partners, or too few
// connected cameras for the requested partner count).
class InvalidClusterError : public Error {
 public:
  explicit InvalidClusterError(const std::string& what)
      : Error(ExitCode::kConfigError, what) {}
};

}  // namespace mvsprio

#endif  // MVSPRIO_ERRORS_H_
