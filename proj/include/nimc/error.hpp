// Copyright 2026 The nimc Authors. All Rights Reserved.
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

#ifndef NIMC_ERROR_HPP_
#define NIMC_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace nimc {

/// Precondition failures: shape mismatch, non-finite input, bad parameters.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed (SVD non-convergence, NaN in an iteration).
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, int iteration = -1)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

/// Sufficient-decrease inequality of the proximal gradient method failed.
class DescentViolation : public std::runtime_error {
 public:
  DescentViolation(int iteration, double decrease, double bound);
  int iteration() const { return iteration_; }
  double decrease() const { return decrease_; }
  double bound() const { return bound_; }

 private:
  int iteration_;
  double decrease_;
  double bound_;
};

/// A ranking metric has no positive weight mass in the test set.
class UndefinedMetric : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// File missing, unreadable, or malformed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nimc

#endif  // NIMC_ERROR_HPP_
