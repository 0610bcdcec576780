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

#ifndef NIMC_PROX_HPP_
#define NIMC_PROX_HPP_

#include <optional>

#include "nimc/core.hpp"

namespace nimc {

struct AdmmConfig {
  double beta = 1.0;
  /// Stopping residual; unset means 1e-7 * sqrt(n1 * n2).
  std::optional<double> tol;
  int max_iter = 500;
  /// Return svt(A) directly when it already lies in the box.
  bool shortcut = true;

  double resolved_tol(Eigen::Index n1, Eigen::Index n2) const;
  void validate() const;
};

struct AdmmReport {
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = true;
  /// True when the thresholded input already satisfied the box and ADMM was skipped.
  bool fast_path = false;
};

/// ADMM iterates carried between calls for warm starting.
struct AdmmState {
  Mat x1;
  Mat x2;
  Mat h;
  bool empty() const { return x2.size() == 0; }
};

struct ProxResult {
  Mat x;
  AdmmReport report;
};

/// Singular value soft-thresholding: sigma -> max(sigma - tau, 0).
Mat svt(const Mat& a, double tau);
/// Same, also returning the nuclear norm of the result.
Mat svt(const Mat& a, double tau, double& nuclear_out);

/// Entrywise clamp to [-alpha, alpha].
Mat clip(const Mat& a, double alpha);

/// argmin over ||X||_inf <= alpha of 0.5 ||X - A||_F^2 + lambda ||X||_*.
///
/// Tries svt(A, lambda) first and returns it when it is already inside the
/// box. Otherwise runs two-block ADMM on the split X1 = X2:
///   X1 <- svt((A + beta X2 + H) / (1 + beta), lambda / (1 + beta))
///   X2 <- clip(X1 - H / beta, alpha)
///   H  <- H - beta (X1 - X2)
/// until max(|X1 - X2|, |dX1|, |dX2|) < tol. The returned X2 is always
/// feasible. When `state` is non-null and non-empty it seeds the iteration,
/// and on return it holds the final iterates. A cold start uses X1 = A,
/// H = 0, X2 = clip(A).
ProxResult prox_nuclear_box(const Mat& a, double lambda, double alpha, const AdmmConfig& cfg,
                            AdmmState* state = nullptr);

}  // namespace nimc

#endif  // NIMC_PROX_HPP_
