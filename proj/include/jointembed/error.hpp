// Copyright 2026 The jointembed Authors.
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

#ifndef JOINTEMBED_ERROR_HPP
#define JOINTEMBED_ERROR_HPP

#include <stdexcept>
#include <string>

namespace jointembed {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments from the caller (maps to CLI exit code 2).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data, invalid model parameters,
/// dimension mismatches (exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: non-convergence, singular systems, non-finite values
/// (exit code 4).
class NumericError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : NumericError(what), best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw DataError(message);
}

}  // namespace detail
}  // namespace jointembed

#endif  // JOINTEMBED_ERROR_HPP
