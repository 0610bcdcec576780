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

#include "nimc/solver.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace nimc {

void SolverConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidArgument("solver: lambda must be non-negative");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("solver: alpha must be positive");
  if (mu && !(*mu > 0.0)) throw InvalidArgument("solver: mu must be positive");
  if (tol && !(*tol > 0.0)) throw InvalidArgument("solver: tol must be positive");
  if (max_iter < 1) throw InvalidArgument("solver: max_iter must be at least 1");
  admm.validate();
}

double objective(const LossContext& ctx, const Mat& m, double lambda) {
  return loss(ctx, m) + lambda * nuclear_norm(m);
}

double default_mu(const LossContext& ctx) { return std::max(lipschitz(ctx, 0.05, 0.95).l_f, 1.1); }

double fista_next_t(double t) { return (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0; }

std::vector<double> fista_t_sequence(int count) {
  std::vector<double> t;
  if (count <= 0) return t;
  t.push_back(1.0);
  while (static_cast<int>(t.size()) < count) t.push_back(fista_next_t(t.back()));
  return t;
}

FitResult fit_composite(const SmoothTerm& term, const SolverConfig& cfg, const Mat& m0) {
  cfg.validate();
  require_finite(m0, "fit: initial matrix");
  using clock = std::chrono::steady_clock;

  FitResult res;
  const double lambda = cfg.lambda, alpha = cfg.alpha;
  res.mu = cfg.mu ? *cfg.mu : term.default_mu;
  res.l_f = term.lipschitz;
  const double mu = res.mu;
  if (mu <= res.l_f) {
    std::ostringstream os;
    os << "step mu = " << mu << " does not exceed the Lipschitz constant " << res.l_f
       << "; monotone descent is not guaranteed";
    res.warnings.push_back(os.str());
  }

  Mat m = m0;
  if (entry_max(m) > alpha) {
    m = clip(m, alpha);
    res.warnings.push_back("initial matrix clipped into the alpha box");
  }
  double f = term.value(m) + lambda * nuclear_norm(m);
  res.tol = cfg.tol ? *cfg.tol : 1e-6 * (1.0 + std::abs(f));
  const double descent_slack = 1e-8 * (1.0 + std::abs(f));
  res.trace.objectives.push_back(f);

  const bool accelerate = cfg.accelerate;
  const bool check = !accelerate && mu > res.l_f;
  // t[0] is a placeholder equal to 1 so the k = 1 coefficient vanishes.
  std::vector<double> t{1.0, 1.0};
  Mat m_prev = m;
  AdmmState warm;
  int admm_failures = 0;

  for (int k = 0; k < cfg.max_iter; ++k) {
    const auto t0 = clock::now();
    double coef = 0.0;
    if (accelerate && k >= 1 && !cfg.zero_momentum) coef = (t[k - 1] - 1.0) / t[k];
    const Mat z = coef == 0.0 ? m : Mat(m + coef * (m - m_prev));

    const Mat y = z - term.gradient(z) / mu;
    ProxResult step = prox_nuclear_box(y, lambda / mu, alpha, cfg.admm, &warm);
    const double f_next = term.value(step.x) + lambda * nuclear_norm(step.x);
    if (!std::isfinite(f_next)) throw NumericalFailure("fit: objective became non-finite", k + 1);
    const double step_norm = (step.x - m).norm();

    res.trace.objectives.push_back(f_next);
    res.trace.step_norms.push_back(step_norm);
    res.trace.admm_iters.push_back(step.report.iterations);
    res.trace.admm_converged.push_back(step.report.converged);
    if (!step.report.converged) ++admm_failures;

    if (!accelerate) {
      const double bound = 0.5 * (mu - res.l_f) * step_norm * step_norm;
      res.trace.descent_margins.push_back((f - f_next) - bound);
      if (check && cfg.check_descent && f - f_next < bound - descent_slack)
        throw DescentViolation(k, f - f_next, bound);
    }

    const bool done = std::abs(f - f_next) < res.tol;
    m_prev = std::move(m);
    m = std::move(step.x);
    f = f_next;
    t.push_back(fista_next_t(t.back()));
    res.iterations = k + 1;
    res.trace.wall_times.push_back(std::chrono::duration<double>(clock::now() - t0).count());
    if (done) {
      res.converged = true;
      break;
    }
  }
  if (admm_failures > 0)
    res.warnings.push_back("inner ADMM hit max_iter in " + std::to_string(admm_failures) +
                           " iteration(s)");
  res.m_hat = std::move(m);
  return res;
}

SmoothTerm ustat_term(const LossContext& ctx) {
  SmoothTerm term;
  term.value = [&ctx](const Mat& m) { return loss(ctx, m); };
  term.gradient = [&ctx](const Mat& m) { return gradient(ctx, m); };
  term.lipschitz = lipschitz(ctx, 0.0, 1.0).l_f;
  term.default_mu = default_mu(ctx);
  return term;
}

FitResult fit_pgd(const LossContext& ctx, const SolverConfig& cfg, const Mat& m0) {
  require_same_shape(m0, ctx.rows(), ctx.cols(), "fit_pgd: initial matrix");
  SolverConfig c = cfg;
  c.accelerate = false;
  return fit_composite(ustat_term(ctx), c, m0);
}

FitResult fit_fista(const LossContext& ctx, const SolverConfig& cfg, const Mat& m0) {
  require_same_shape(m0, ctx.rows(), ctx.cols(), "fit_fista: initial matrix");
  SolverConfig c = cfg;
  c.accelerate = true;
  c.check_descent = false;
  return fit_composite(ustat_term(ctx), c, m0);
}

FitResult fit(const LossContext& ctx, const SolverConfig& cfg, const Mat& m0) {
  return cfg.accelerate ? fit_fista(ctx, cfg, m0) : fit_pgd(ctx, cfg, m0);
}

Mat random_start(Eigen::Index n1, Eigen::Index n2, double alpha, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat m(n1, n2);
  for (Eigen::Index i = 0; i < n1; ++i)
    for (Eigen::Index j = 0; j < n2; ++j) m(i, j) = normal(gen);
  return clip(m, alpha);
}

}  // namespace nimc
