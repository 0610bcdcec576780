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

#ifndef NIMC_SIM_HPP_
#define NIMC_SIM_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "nimc/core.hpp"

namespace nimc {

enum class Dgp { kBernoulli = 1, kGaussian = 2 };

std::string to_string(Dgp dgp);
Dgp parse_dgp(const std::string& name);

/// Low-rank truth M = A B / sqrt(rank) with standard-normal factors, and a
/// missing-not-at-random observation law
///   P(W = 1 | X) = a * expit(mnar_scale * X + mnar_offset),
///   a = 1 / (1 + frailty_coef * exp(Y)),  Y ~ N(0, 1).
/// DGP1 draws X ~ Bernoulli(expit(m)); DGP2 draws X = m + N(0, 1).
struct DgpSpec {
  Eigen::Index n1 = 100;
  Eigen::Index n2 = 100;
  int rank = 3;
  Dgp dgp = Dgp::kBernoulli;
  std::uint64_t seed = 0;
  double mnar_scale = 2.0;
  /// Unset means -1 for DGP1 and 0 for DGP2.
  std::optional<double> mnar_offset;
  double frailty_coef = 0.1;

  double resolved_offset() const;
  void validate() const;
};

struct SimInstance {
  Mat m_true;
  /// Complete draw of X, including the entries the mask hides.
  Mat x_full;
  ObservedData data;
  double observed_fraction;
};

/// Independent generator streams derived from one seed. Each component of an
/// instance draws from its own stream so changing one law leaves the others
/// bit-identical.
enum class Stream : std::uint32_t { kFactors = 1, kResponse = 2, kFrailty = 3, kObservation = 4 };
std::mt19937_64 make_stream(std::uint64_t seed, Stream stream);

double expit(double x);

Mat gen_ground_truth(const DgpSpec& spec);
SimInstance sample_instance(const DgpSpec& spec);

}  // namespace nimc

#endif  // NIMC_SIM_HPP_
