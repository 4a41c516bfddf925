// Copyright 2026 The dlsvm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace dlsvm {

/// Broad failure categories. The C API maps each one onto a status code.
enum class ErrorKind {
  kInvalidArgument,
  kDimension,
  kParse,
  kIo,
  kVersion,
  kNotPsd,
  kNumeric,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void Require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) Fail(kind, what);
}

// Non-fatal diagnostics (convergence caps, dropped atoms, skipped folds).
// Messages go to stderr when the level allows it.
enum class LogLevel { kQuiet = 0, kWarn = 1, kInfo = 2 };

void SetLogLevel(LogLevel level);
LogLevel GetLogLevel();
void Warn(const std::string& msg);
void Info(const std::string& msg);

}  // namespace dlsvm
