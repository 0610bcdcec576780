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

#include "nimc/eval.hpp"

#include <algorithm>
#include <cmath>

namespace nimc {

double rmse(const Mat& m_hat, const Mat& m_true, bool centered) {
  require_same_shape(m_hat, m_true.rows(), m_true.cols(), "rmse");
  Mat diff = m_hat - m_true;
  if (centered) diff.array() -= diff.mean();
  return diff.norm() / std::sqrt(static_cast<double>(diff.size()));
}

double percentile_rank(const std::vector<double>& sorted, double value) {
  const auto n = static_cast<double>(sorted.size());
  if (sorted.size() <= 1) return 0.5;
  const auto lower = std::lower_bound(sorted.begin(), sorted.end(), value);
  const auto upper = std::upper_bound(lower, sorted.end(), value);
  const double greater = static_cast<double>(sorted.end() - upper);
  const double equal_others = static_cast<double>(upper - lower) - 1.0;
  return (greater + 0.5 * equal_others) / (n - 1.0);
}

RankMetrics rank_metrics(const Mat& m_hat, const TestSet& test) {
  require_finite(m_hat, "rank_metrics");
  double weight = 0.0;
  for (const auto& e : test) {
    if (e.row < 0 || e.row >= m_hat.rows() || e.col < 0 || e.col >= m_hat.cols())
      throw InvalidArgument("rank_metrics: test entry outside the matrix");
    if (!(e.value >= 0.0)) throw UndefinedMetric("rank_metrics: negative test weight");
    weight += e.value;
  }
  if (!(weight > 0.0)) throw UndefinedMetric("rank_metrics: test values sum to zero");

  const Eigen::Index n1 = m_hat.rows(), n2 = m_hat.cols();
  std::vector<std::vector<double>> rows(n1), cols(n2);
  std::vector<double> all(m_hat.data(), m_hat.data() + m_hat.size());
  std::sort(all.begin(), all.end());
  auto sorted_row = [&](Eigen::Index i) -> const std::vector<double>& {
    auto& r = rows[i];
    if (r.empty()) {
      r.resize(n2);
      for (Eigen::Index j = 0; j < n2; ++j) r[j] = m_hat(i, j);
      std::sort(r.begin(), r.end());
    }
    return r;
  };
  auto sorted_col = [&](Eigen::Index j) -> const std::vector<double>& {
    auto& c = cols[j];
    if (c.empty()) {
      c.assign(m_hat.col(j).data(), m_hat.col(j).data() + n1);
      std::sort(c.begin(), c.end());
    }
    return c;
  };

  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (const auto& e : test) {
    const double v = m_hat(e.row, e.col);
    s1 += e.value * percentile_rank(sorted_row(e.row), v);
    s2 += e.value * percentile_rank(sorted_col(e.col), v);
    s3 += e.value * percentile_rank(all, v);
  }
  return {s1 / weight, s2 / weight, s3 / weight};
}

EvalReport evaluate(const Mat& m_hat, const Mat* m_true, const TestSet& test) {
  EvalReport rep;
  rep.n_test = static_cast<std::int64_t>(test.size());
  if (m_true) {
    rep.rmse_plain = rmse(m_hat, *m_true, false);
    rep.rmse_centered = rmse(m_hat, *m_true, true);
  } else {
    rep.note = "no ground truth supplied; rmse not computed";
  }
  try {
    const RankMetrics r = rank_metrics(m_hat, test);
    rep.rank1 = r.rank1;
    rep.rank2 = r.rank2;
    rep.rank3 = r.rank3;
  } catch (const UndefinedMetric& e) {
    if (!rep.note.empty()) rep.note += "; ";
    rep.note += e.what();
  }
  return rep;
}

SmoothTerm squared_term(const ObservedData& data) {
  SmoothTerm term;
  const Mat w = data.mask().as_real();
  const Mat& x = data.values();
  term.value = [w, &x](const Mat& m) { return 0.5 * (w.array() * (m - x).array()).square().sum(); };
  term.gradient = [w, &x](const Mat& m) -> Mat { return w.array() * (m - x).array(); };
  term.lipschitz = 1.0;
  term.default_mu = 1.1;
  return term;
}

FitResult fit_baseline_sq(const LossContext& ctx, const SolverConfig& cfg, const Mat& m0) {
  require_same_shape(m0, ctx.rows(), ctx.cols(), "fit_baseline_sq: initial matrix");
  return fit_composite(squared_term(ctx.data()), cfg, m0);
}

}  // namespace nimc
