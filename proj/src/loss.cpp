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

#include "nimc/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nimc {

namespace {

constexpr double kLog2 = std::numbers::ln2;

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

// 1 / (1 + e^z) without overflow.
double logistic_tail(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

// Scratch buffers for one row or column; the pairwise kernels only ever see
// the observed entries of a single line.
struct Line {
  std::vector<double> x;
  std::vector<double> m;
};

template <class Index>
void gather(Line& line, const std::vector<Index>& idx, auto&& x_at, auto&& m_at) {
  line.x.resize(idx.size());
  line.m.resize(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) {
    line.x[a] = x_at(idx[a]);
    line.m[a] = m_at(idx[a]);
  }
}

// Sum of pair_loss over all ordered pairs of the line.
double line_loss(const Line& line) {
  const std::size_t k = line.x.size();
  double off = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    const double xa = line.x[a], ma = line.m[a];
    for (std::size_t b = a + 1; b < k; ++b) {
      const double dx = xa - line.x[b];
      off += dx == 0.0 ? kLog2 : softplus(-dx * (ma - line.m[b]));
    }
  }
  return 2.0 * off + static_cast<double>(k) * kLog2;
}

// Accumulates scale * sum_b g(x_a - x_b, m_a - m_b) into out[a].
void line_gradient(const Line& line, double scale, std::vector<double>& out) {
  const std::size_t k = line.x.size();
  out.assign(k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    const double xa = line.x[a], ma = line.m[a];
    for (std::size_t b = a + 1; b < k; ++b) {
      const double dx = xa - line.x[b];
      if (dx == 0.0) continue;
      const double g = -dx * logistic_tail(dx * (ma - line.m[b]));
      out[a] += g;
      out[b] -= g;
    }
  }
  for (auto& v : out) v *= scale;
}

double line_seminorm(const Line& line, double alpha) {
  const std::size_t k = line.x.size();
  double s = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      const double dd = line.m[a] - line.m[b];
      s += dd * dd * pair_weight(line.x[a], line.x[b], alpha);
    }
  }
  return 2.0 * s;
}

void check_shape(const LossContext& ctx, const Mat& m, const char* what) {
  require_same_shape(m, ctx.rows(), ctx.cols(), what);
}

}  // namespace

LossContext::LossContext(ObservedData data, double alpha) : data_(std::move(data)), alpha_(alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw InvalidArgument("alpha must be positive and finite");
}

double pair_loss(double x1, double x2, double m1, double m2) {
  return softplus(-(x1 - x2) * (m1 - m2));
}

double pair_weight(double x1, double x2, double alpha) {
  const double d = std::abs(x1 - x2);
  if (d == 0.0) return 0.0;
  // Multiply numerator and denominator by e^{-2 alpha d}.
  const double e = std::exp(-2.0 * alpha * d);
  return d * d * e / (4.0 * e + 2.0 * e * e + 2.0);
}

double loss(const LossContext& ctx, const Mat& m) {
  check_shape(ctx, m, "loss");
  const auto& data = ctx.data();
  const Mat& x = data.values();
  const double n1 = static_cast<double>(ctx.rows()), n2 = static_cast<double>(ctx.cols());
  Line line;
  double row_sum = 0.0, col_sum = 0.0;
  for (Eigen::Index i = 0; i < ctx.rows(); ++i) {
    gather(line, data.row_list(i), [&](Eigen::Index j) { return x(i, j); },
           [&](Eigen::Index j) { return m(i, j); });
    row_sum += line_loss(line);
  }
  for (Eigen::Index j = 0; j < ctx.cols(); ++j) {
    gather(line, data.col_list(j), [&](Eigen::Index i) { return x(i, j); },
           [&](Eigen::Index i) { return m(i, j); });
    col_sum += line_loss(line);
  }
  return row_sum / n2 + col_sum / n1;
}

Mat gradient(const LossContext& ctx, const Mat& m) {
  check_shape(ctx, m, "gradient");
  const auto& data = ctx.data();
  const Mat& x = data.values();
  const double n1 = static_cast<double>(ctx.rows()), n2 = static_cast<double>(ctx.cols());
  Mat g = Mat::Zero(ctx.rows(), ctx.cols());
  Line line;
  std::vector<double> acc;
  for (Eigen::Index i = 0; i < ctx.rows(); ++i) {
    const auto& idx = data.row_list(i);
    gather(line, idx, [&](Eigen::Index j) { return x(i, j); },
           [&](Eigen::Index j) { return m(i, j); });
    line_gradient(line, 2.0 / n2, acc);
    for (std::size_t a = 0; a < idx.size(); ++a) g(i, idx[a]) += acc[a];
  }
  for (Eigen::Index j = 0; j < ctx.cols(); ++j) {
    const auto& idx = data.col_list(j);
    gather(line, idx, [&](Eigen::Index i) { return x(i, j); },
           [&](Eigen::Index i) { return m(i, j); });
    line_gradient(line, 2.0 / n1, acc);
    for (std::size_t a = 0; a < idx.size(); ++a) g(idx[a], j) += acc[a];
  }
  return g;
}

double sample_seminorm_sq(const LossContext& ctx, const Mat& d) {
  check_shape(ctx, d, "sample_seminorm_sq");
  const auto& data = ctx.data();
  const Mat& x = data.values();
  const double n1 = static_cast<double>(ctx.rows()), n2 = static_cast<double>(ctx.cols());
  Line line;
  double row_sum = 0.0, col_sum = 0.0;
  for (Eigen::Index i = 0; i < ctx.rows(); ++i) {
    gather(line, data.row_list(i), [&](Eigen::Index j) { return x(i, j); },
           [&](Eigen::Index j) { return d(i, j); });
    row_sum += line_seminorm(line, ctx.alpha());
  }
  for (Eigen::Index j = 0; j < ctx.cols(); ++j) {
    gather(line, data.col_list(j), [&](Eigen::Index i) { return x(i, j); },
           [&](Eigen::Index i) { return d(i, j); });
    col_sum += line_seminorm(line, ctx.alpha());
  }
  return row_sum / n2 + col_sum / n1;
}

double empirical_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw InvalidArgument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile level outside [0, 1]");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

LipschitzInfo lipschitz(const LossContext& ctx, double quantile_lo, double quantile_hi) {
  if (!(quantile_lo >= 0.0 && quantile_lo < 0.5 && quantile_hi > 0.5 && quantile_hi <= 1.0))
    throw InvalidArgument("lipschitz: need 0 <= quantile_lo < 0.5 < quantile_hi <= 1");
  const auto& data = ctx.data();
  if (data.observed_count() == 0) throw InvalidArgument("lipschitz: no observed entries");
  std::vector<double> v = data.observed_values();
  std::sort(v.begin(), v.end());
  const double range = empirical_quantile(v, quantile_hi) - empirical_quantile(v, quantile_lo);
  std::size_t max_row = 0, max_col = 0;
  for (Eigen::Index i = 0; i < ctx.rows(); ++i) max_row = std::max(max_row, data.row_list(i).size());
  for (Eigen::Index j = 0; j < ctx.cols(); ++j) max_col = std::max(max_col, data.col_list(j).size());
  LipschitzInfo info{};
  info.l_x = range * range;
  info.l_w = static_cast<double>(max_col) / static_cast<double>(ctx.rows()) +
             static_cast<double>(max_row) / static_cast<double>(ctx.cols());
  info.l_f = info.l_x * info.l_w / 2.0;
  info.quantile_lo = quantile_lo;
  info.quantile_hi = quantile_hi;
  return info;
}

}  // namespace nimc
