// Copyright 2026 The orbit-tracer Authors
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

#ifndef ORBIT_TRACER_ERROR_HPP_
#define ORBIT_TRACER_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace orbit_tracer {

/// Failure categories. The numeric values double as CLI exit codes.
enum class ErrorKind : int {
  Config = 1,
  Numerical = 2,
  NonConvergence = 3,
  InvalidArgument = 4,
  Io = 5,
  ModelFreeViolation = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace orbit_tracer

#endif  // ORBIT_TRACER_ERROR_HPP_
