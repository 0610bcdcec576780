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

#include "nimc/sim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace nimc {

std::string to_string(Dgp dgp) { return dgp == Dgp::kBernoulli ? "dgp1" : "dgp2"; }

Dgp parse_dgp(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "dgp1" || s == "1" || s == "bernoulli") return Dgp::kBernoulli;
  if (s == "dgp2" || s == "2" || s == "gaussian") return Dgp::kGaussian;
  throw InvalidArgument("unknown dgp '" + name + "' (expected dgp1 or dgp2)");
}

double DgpSpec::resolved_offset() const {
  if (mnar_offset) return *mnar_offset;
  return dgp == Dgp::kBernoulli ? -1.0 : 0.0;
}

void DgpSpec::validate() const {
  if (n1 < 1 || n2 < 1) throw InvalidArgument("dgp: n1 and n2 must be positive");
  if (rank < 1 || rank > std::min(n1, n2)) throw InvalidArgument("dgp: rank must lie in [1, min(n1, n2)]");
  if (!std::isfinite(mnar_scale) || !std::isfinite(resolved_offset()))
    throw InvalidArgument("dgp: mnar parameters must be finite");
  if (!(frailty_coef >= 0.0) || !std::isfinite(frailty_coef))
    throw InvalidArgument("dgp: frailty_coef must be non-negative");
}

std::mt19937_64 make_stream(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(stream),
                    0x6e696d63u};
  return std::mt19937_64(seq);
}

double expit(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Mat gen_ground_truth(const DgpSpec& spec) {
  spec.validate();
  auto gen = make_stream(spec.seed, Stream::kFactors);
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat a(spec.n1, spec.rank), b(spec.rank, spec.n2);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k) a(i, k) = normal(gen);
  for (Eigen::Index k = 0; k < b.rows(); ++k)
    for (Eigen::Index j = 0; j < b.cols(); ++j) b(k, j) = normal(gen);
  return a * b / std::sqrt(static_cast<double>(spec.rank));
}

SimInstance sample_instance(const DgpSpec& spec) {
  Mat m = gen_ground_truth(spec);
  auto response = make_stream(spec.seed, Stream::kResponse);
  auto frailty = make_stream(spec.seed, Stream::kFrailty);
  auto observe = make_stream(spec.seed, Stream::kObservation);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double offset = spec.resolved_offset();

  Mat x(spec.n1, spec.n2);
  MaskMat w(spec.n1, spec.n2);
  for (Eigen::Index i = 0; i < spec.n1; ++i) {
    for (Eigen::Index j = 0; j < spec.n2; ++j) {
      const double mij = m(i, j);
      const double xij = spec.dgp == Dgp::kBernoulli
                             ? (unif(response) < expit(mij) ? 1.0 : 0.0)
                             : mij + normal(response);
      const double a = 1.0 / (1.0 + spec.frailty_coef * std::exp(normal(frailty)));
      const double p = a * expit(spec.mnar_scale * xij + offset);
      x(i, j) = xij;
      w(i, j) = unif(observe) < p ? 1 : 0;
    }
  }
  Mask mask(std::move(w));
  const double frac = static_cast<double>(mask.count()) /
                      (static_cast<double>(spec.n1) * static_cast<double>(spec.n2));
  ObservedData data(x, mask);
  return SimInstance{std::move(m), std::move(x), std::move(data), frac};
}

}  // namespace nimc
