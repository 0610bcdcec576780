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

#ifndef NIMC_TRANSFORM_HPP_
#define NIMC_TRANSFORM_HPP_

#include <optional>
#include <utility>

#include "nimc/core.hpp"

namespace nimc {

struct TransformResult {
  double c_hat = 0.0;
  Mat transformed;
  double nuclear_at_c = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};
  /// Number of nuclear-norm evaluations (one SVD each).
  int evals = 0;
};

/// Default search tolerance 1e-8 * (1 + ||M||_inf).
double default_shift_tol(const Mat& m);

/// Minimizes h(c) = ||M (+) c||_* by golden-section search. The initial
/// bracket is [-B, B] with B = 2 ||M||_* / sqrt(n1 n2) + |mean(M)|; outside
/// it h(c) >= |c| sqrt(n1 n2) - ||M||_* exceeds h(0).
TransformResult identify_shift(const Mat& m, std::optional<double> tol_c = std::nullopt);

/// Diagnostic of how far the top-d singular subspaces of the shifted matrix
/// are from the all-ones direction:
///   |(I - UU')1| |(I - VV')1| / sqrt(n1 n2) - sqrt(n1 n2) |mean(UV')|.
/// May be non-positive.
double b_diagnostic(const Mat& m_star, int d);

}  // namespace nimc

#endif  // NIMC_TRANSFORM_HPP_
