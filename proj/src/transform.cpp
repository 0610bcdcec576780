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

#include "nimc/transform.hpp"

#include <cmath>
#include <numbers>

namespace nimc {

double default_shift_tol(const Mat& m) { return 1e-8 * (1.0 + entry_max(m)); }

TransformResult identify_shift(const Mat& m, std::optional<double> tol_c) {
  require_finite(m, "identify_shift");
  const double tol = tol_c ? *tol_c : default_shift_tol(m);
  if (!(tol > 0.0)) throw InvalidArgument("identify_shift: tol_c must be positive");

  TransformResult res;
  auto h = [&](double c) {
    ++res.evals;
    return nuclear_norm(shift(m, c));
  };
  const double root = std::sqrt(static_cast<double>(m.rows()) * static_cast<double>(m.cols()));
  const double h0 = h(0.0);
  double best_c = 0.0, best_h = h0;
  auto probe = [&](double c) {
    const double v = h(c);
    if (v < best_h) {
      best_h = v;
      best_c = c;
    }
    return v;
  };

  double bound = 2.0 * h0 / root + std::abs(mean_value(m));
  if (bound == 0.0) bound = tol;
  int doublings = 0;
  while (probe(-bound) < h0 || probe(bound) < h0) {
    if (++doublings > 60) throw NumericalFailure("identify_shift: bracket expansion failed");
    bound *= 2.0;
  }
  res.bracket = {-bound, bound};

  const double inv_phi = 1.0 / std::numbers::phi;
  double lo = -bound, hi = bound;
  double c1 = hi - inv_phi * (hi - lo), c2 = lo + inv_phi * (hi - lo);
  double h1 = probe(c1), h2 = probe(c2);
  while (hi - lo > tol) {
    if (h1 <= h2) {
      hi = c2;
      c2 = c1;
      h2 = h1;
      c1 = hi - inv_phi * (hi - lo);
      h1 = probe(c1);
    } else {
      lo = c1;
      c1 = c2;
      h1 = h2;
      c2 = lo + inv_phi * (hi - lo);
      h2 = probe(c2);
    }
  }
  double c_hat = 0.5 * (lo + hi);
  double h_hat = probe(c_hat);
  // Rounding can leave the midpoint marginally above a probed point.
  if (best_h < h_hat) {
    c_hat = best_c;
    h_hat = best_h;
  }
  res.c_hat = c_hat;
  res.nuclear_at_c = h_hat;
  res.transformed = shift(m, c_hat);
  return res;
}

double b_diagnostic(const Mat& m_star, int d) {
  require_finite(m_star, "b_diagnostic");
  const Eigen::Index n1 = m_star.rows(), n2 = m_star.cols();
  if (d < 1 || d > std::min(n1, n2)) throw InvalidArgument("b_diagnostic: d outside [1, min(n1, n2)]");
  const SvdResult s = svd(identify_shift(m_star).transformed);
  const Mat u = s.left.leftCols(d);
  const Mat v = s.right.leftCols(d);
  const Vec ones1 = Vec::Ones(n1), ones2 = Vec::Ones(n2);
  const double r1 = (ones1 - u * (u.transpose() * ones1)).norm();
  const double r2 = (ones2 - v * (v.transpose() * ones2)).norm();
  const double root = std::sqrt(static_cast<double>(n1) * static_cast<double>(n2));
  const double mean_uv = (u * v.transpose()).mean();
  return r1 * r2 / root - root * std::abs(mean_uv);
}

}  // namespace nimc
