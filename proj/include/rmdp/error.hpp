// Copyright 2026 The rmdp Authors
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

namespace rmdp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: shapes disagree, a distribution does not sum to one,
/// a file does not parse.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A combinatorial or grid budget would be exceeded.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// Iterative method hit its iteration limit.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Floating point failure in a direct solver (singular system, LP breakdown).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A post-condition check on a computed result failed.
class VerificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace rmdp
