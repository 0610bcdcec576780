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

#include "nimc/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nimc {

double AdmmConfig::resolved_tol(Eigen::Index n1, Eigen::Index n2) const {
  return tol ? *tol : 1e-7 * std::sqrt(static_cast<double>(n1) * static_cast<double>(n2));
}

void AdmmConfig::validate() const {
  if (!(beta > 0.0)) throw InvalidArgument("admm: beta must be positive");
  if (tol && !(*tol > 0.0)) throw InvalidArgument("admm: tol must be positive");
  if (max_iter < 1) throw InvalidArgument("admm: max_iter must be at least 1");
}

Mat svt(const Mat& a, double tau, double& nuclear_out) {
  if (!(tau >= 0.0)) throw InvalidArgument("svt: tau must be non-negative");
  const SvdResult s = svd(a);
  const Vec shrunk = (s.singulars.array() - tau).max(0.0).matrix();
  nuclear_out = shrunk.sum();
  Eigen::Index rank = 0;
  while (rank < shrunk.size() && shrunk(rank) > 0.0) ++rank;
  if (rank == 0) return Mat::Zero(a.rows(), a.cols());
  return s.left.leftCols(rank) * shrunk.head(rank).asDiagonal() *
         s.right.leftCols(rank).transpose();
}

Mat svt(const Mat& a, double tau) {
  double unused = 0.0;
  return svt(a, tau, unused);
}

Mat clip(const Mat& a, double alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("clip: alpha must be positive");
  return a.cwiseMax(-alpha).cwiseMin(alpha);
}

ProxResult prox_nuclear_box(const Mat& a, double lambda, double alpha, const AdmmConfig& cfg,
                            AdmmState* state) {
  require_finite(a, "prox_nuclear_box");
  if (!(lambda >= 0.0)) throw InvalidArgument("prox_nuclear_box: lambda must be non-negative");
  if (!(alpha > 0.0)) throw InvalidArgument("prox_nuclear_box: alpha must be positive");
  cfg.validate();

  ProxResult out;
  Mat direct = svt(a, lambda);
  if (cfg.shortcut && entry_max(direct) <= alpha) {
    out.report.fast_path = true;
    if (state) *state = AdmmState{direct, direct, Mat::Zero(a.rows(), a.cols())};
    out.x = std::move(direct);
    return out;
  }

  const double beta = cfg.beta;
  const double tol = cfg.resolved_tol(a.rows(), a.cols());
  const double tau = lambda / (1.0 + beta);

  AdmmState local;
  AdmmState& st = state ? *state : local;
  const bool shape_ok = !st.empty() && st.x2.rows() == a.rows() && st.x2.cols() == a.cols() &&
                        st.h.rows() == a.rows() && st.h.cols() == a.cols();
  if (!shape_ok) {
    st.x1 = a;
    st.x2 = clip(a, alpha);
    st.h = Mat::Zero(a.rows(), a.cols());
  } else if (st.x1.rows() != a.rows() || st.x1.cols() != a.cols()) {
    st.x1 = st.x2;
  }

  Mat best = st.x2;
  double best_residual = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= cfg.max_iter; ++k) {
    Mat x1 = svt((a + beta * st.x2 + st.h) / (1.0 + beta), tau);
    Mat x2 = clip(x1 - st.h / beta, alpha);
    st.h -= beta * (x1 - x2);
    const double residual =
        std::max({(x1 - x2).norm(), (x1 - st.x1).norm(), (x2 - st.x2).norm()});
    st.x1 = std::move(x1);
    st.x2 = std::move(x2);
    if (!std::isfinite(residual) || !st.h.allFinite())
      throw NumericalFailure("prox_nuclear_box: non-finite ADMM iterate", k);
    out.report.iterations = k;
    if (residual < best_residual) {
      best_residual = residual;
      best = st.x2;
    }
    if (residual < tol) {
      out.report.converged = true;
      out.report.final_residual = residual;
      out.x = st.x2;
      return out;
    }
  }
  out.report.converged = false;
  out.report.final_residual = best_residual;
  out.x = std::move(best);
  return out;
}

}  // namespace nimc
