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

#ifndef NIMC_EVAL_HPP_
#define NIMC_EVAL_HPP_

#include <optional>
#include <string>
#include <vector>

#include "nimc/loss.hpp"
#include "nimc/solver.hpp"

namespace nimc {

/// Held-out (row, col, value) triplets.
using TestSet = std::vector<Entry>;

struct RankMetrics {
  double rank1;  // within-row
  double rank2;  // within-column
  double rank3;  // whole matrix
};

struct EvalReport {
  std::optional<double> rmse_plain;
  std::optional<double> rmse_centered;
  std::optional<double> rank1;
  std::optional<double> rank2;
  std::optional<double> rank3;
  std::int64_t n_test = 0;
  /// Why a metric is missing, when one is.
  std::string note;
};

/// ||m_hat - m_true||_F / sqrt(n1 n2); the centered form first removes the
/// mean of the difference.
double rmse(const Mat& m_hat, const Mat& m_true, bool centered);

/// Percentile of `value` among `sorted` (ascending, containing value):
/// 0 for the unique maximum, 1 for the unique minimum, ties at mid-rank.
/// A single-element population gives 0.5.
double percentile_rank(const std::vector<double>& sorted, double value);

/// Value-weighted expected percentile rankings. Weights must be
/// non-negative with a positive sum, else UndefinedMetric.
RankMetrics rank_metrics(const Mat& m_hat, const TestSet& test);

EvalReport evaluate(const Mat& m_hat, const Mat* m_true, const TestSet& test);

/// 0.5 sum_observed (X - m)^2, gradient W o (M - X), Lipschitz constant 1.
SmoothTerm squared_term(const ObservedData& data);

/// Squared-loss nuclear-norm comparator using the same proximal machinery.
FitResult fit_baseline_sq(const LossContext& ctx, const SolverConfig& cfg, const Mat& m0);

}  // namespace nimc

#endif  // NIMC_EVAL_HPP_
