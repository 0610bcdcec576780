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

#ifndef NIMC_SOLVER_HPP_
#define NIMC_SOLVER_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nimc/loss.hpp"
#include "nimc/prox.hpp"

namespace nimc {

struct SolverConfig {
  double lambda = 0.0;
  double alpha = 10.0;
  /// Step parameter; unset means max(l_f at the 5%/95% quantiles, 1.1).
  std::optional<double> mu;
  /// Objective-change stopping threshold; unset means 1e-6 * (1 + |F_0|).
  std::optional<double> tol;
  int max_iter = 100;
  bool accelerate = true;
  AdmmConfig admm;
  /// Throw DescentViolation when the PGD sufficient-decrease bound fails.
  bool check_descent = false;
  /// Pins t_k = 1 so the FISTA extrapolation vanishes.
  bool zero_momentum = false;

  void validate() const;
};

struct SolverTrace {
  /// F_0, F_1, ... (one more entry than iterations).
  std::vector<double> objectives;
  std::vector<double> step_norms;
  std::vector<int> admm_iters;
  std::vector<bool> admm_converged;
  /// Seconds spent in each iteration.
  std::vector<double> wall_times;
  /// PGD only: F_k - F_{k+1} - (mu - l_f)/2 ||M_k - M_{k+1}||^2.
  std::vector<double> descent_margins;
};

struct FitResult {
  Mat m_hat;
  bool converged = false;
  int iterations = 0;
  SolverTrace trace;
  double mu = 0.0;
  double tol = 0.0;
  /// Exact Lipschitz constant the descent bound was measured against.
  double l_f = 0.0;
  std::vector<std::string> warnings;
};

/// A differentiable data term with a known gradient Lipschitz constant.
struct SmoothTerm {
  std::function<double(const Mat&)> value;
  std::function<Mat(const Mat&)> gradient;
  /// Exact Lipschitz constant (used for the descent diagnostic).
  double lipschitz = 0.0;
  /// Step used when SolverConfig::mu is unset.
  double default_mu = 1.1;
};

double objective(const LossContext& ctx, const Mat& m, double lambda);

/// Default step: max(l_f(0.05, 0.95), 1.1).
double default_mu(const LossContext& ctx);

/// t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2.
double fista_next_t(double t);
/// t_1, ..., t_count starting from t_1 = 1.
std::vector<double> fista_t_sequence(int count);

/// Proximal gradient (or FISTA when accelerate is set) on value + lambda ||.||_*
/// over the alpha-box. Shared by the U-statistic fits and the baseline.
FitResult fit_composite(const SmoothTerm& term, const SolverConfig& cfg, const Mat& m0);

SmoothTerm ustat_term(const LossContext& ctx);

/// Plain proximal gradient; cfg.accelerate is ignored.
FitResult fit_pgd(const LossContext& ctx, const SolverConfig& cfg, const Mat& m0);
/// FISTA; cfg.accelerate is ignored.
FitResult fit_fista(const LossContext& ctx, const SolverConfig& cfg, const Mat& m0);
/// Dispatches on cfg.accelerate.
FitResult fit(const LossContext& ctx, const SolverConfig& cfg, const Mat& m0);

/// Standard-normal start scaled into the box, seeded.
Mat random_start(Eigen::Index n1, Eigen::Index n2, double alpha, std::uint64_t seed);

}  // namespace nimc

#endif  // NIMC_SOLVER_HPP_
