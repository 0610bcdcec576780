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

#ifndef NIMC_LOSS_HPP_
#define NIMC_LOSS_HPP_

#include <vector>

#include "nimc/core.hpp"

namespace nimc {

/// Observed data plus the box bound alpha used by the curvature weights.
class LossContext {
 public:
  LossContext(ObservedData data, double alpha);

  const ObservedData& data() const { return data_; }
  double alpha() const { return alpha_; }
  Eigen::Index rows() const { return data_.rows(); }
  Eigen::Index cols() const { return data_.cols(); }

 private:
  ObservedData data_;
  double alpha_;
};

struct LipschitzInfo {
  double l_x;
  double l_w;
  double l_f;
  double quantile_lo;
  double quantile_hi;
};

/// log(1 + exp(-(x1 - x2)(m1 - m2))) in overflow-free form.
double pair_loss(double x1, double x2, double m1, double m2);

/// Curvature weight (x1-x2)^2 / (4 + 2e^{2a(x1-x2)} + 2e^{2a(x2-x1)}).
double pair_weight(double x1, double x2, double alpha);

/// Row- and column-wise pairwise loss. Both double sums run over all ordered
/// index pairs, equal indices included, so each observed entry contributes a
/// log 2 self-term to its row sum and to its column sum.
double loss(const LossContext& ctx, const Mat& m);

/// Exact gradient of loss(); zero at unobserved entries.
Mat gradient(const LossContext& ctx, const Mat& m);

/// Weighted within-row and within-column squared differences of d.
double sample_seminorm_sq(const LossContext& ctx, const Mat& d);

/// Lipschitz constant of gradient(). l_x uses the [lo, hi] empirical
/// quantile range of the observed values; l_w is always exact.
LipschitzInfo lipschitz(const LossContext& ctx, double quantile_lo = 0.0,
                        double quantile_hi = 1.0);

/// Linear-interpolation quantile of an ascending sample, position (n-1)q.
double empirical_quantile(const std::vector<double>& sorted, double q);

}  // namespace nimc

#endif  // NIMC_LOSS_HPP_
