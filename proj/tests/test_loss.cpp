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

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nimc/loss.hpp"
#include "oracles.hpp"

using namespace nimc;

namespace {

struct Instance {
  Mat x;
  Mask w;
  LossContext ctx;
};

Instance make_instance(Eigen::Index r, Eigen::Index c, double p, std::mt19937_64& gen,
                       double alpha = 10.0, bool binary = false) {
  Mat x = binary ? Mat((oracle::uniform(r, c, gen, 0, 1).array() > 0.5).cast<double>())
                 : oracle::gaussian(r, c, gen);
  Mask w = oracle::random_mask(r, c, p, gen);
  LossContext ctx(ObservedData(x, w), alpha);
  return {x, w, ctx};
}

constexpr double kLn2 = std::numbers::ln2;

}  // namespace

TEST_CASE("pair_loss identities and extreme arguments") {
  CHECK(pair_loss(1.3, 1.3, 5.0, -2.0) == doctest::Approx(kLn2).epsilon(1e-15));
  CHECK(pair_loss(-0.4, 2.0, 0.7, 0.7) == doctest::Approx(kLn2).epsilon(1e-15));
  // softplus(-700) = e^-700 to double precision.
  const double tiny = pair_loss(1.0, 0.0, 700.0, 0.0);
  CHECK(std::isfinite(tiny));
  CHECK(oracle::rel_err(tiny, static_cast<double>(oracle::softplus_ld(-700.0L))) <= 1e-12);
  const double big = pair_loss(1.0, 0.0, -700.0, 0.0);
  CHECK(big == doctest::Approx(700.0).epsilon(1e-15));

  std::mt19937_64 gen(11);
  std::normal_distribution<double> n(0, 3);
  for (int t = 0; t < 100; ++t) {
    const double x1 = n(gen), x2 = n(gen), m1 = n(gen), m2 = n(gen);
    const double v = pair_loss(x1, x2, m1, m2);
    CHECK(v >= 0.0);
    CHECK(v == pair_loss(x2, x1, m2, m1));
    CHECK(oracle::rel_err(v, oracle::pair_term(x1, x2, m1, m2)) <= 1e-13);
  }
}

TEST_CASE("pair_weight values and overflow safety") {
  CHECK(pair_weight(2.0, 2.0, 3.0) == 0.0);
  CHECK(pair_weight(1.0, 0.0, 0.0) == doctest::Approx(0.125).epsilon(1e-15));
  const double far = pair_weight(300.0, 0.0, 10.0);
  CHECK(std::isfinite(far));
  CHECK(far == static_cast<double>(300.0L * 300.0L * std::exp(-6000.0L) / 2.0L));
  CHECK(far >= 0.0);
  std::mt19937_64 gen(12);
  std::normal_distribution<double> n(0, 1);
  for (int t = 0; t < 100; ++t) {
    const double x1 = n(gen), x2 = n(gen), a = std::abs(n(gen)) + 0.1;
    CHECK(oracle::rel_err(pair_weight(x1, x2, a), oracle::weight_direct(x1, x2, a)) <= 1e-12);
    CHECK(pair_weight(x1, x2, a) == pair_weight(x2, x1, a));
  }
}

TEST_CASE("loss with a single observed entry is two self terms") {
  Mat x = Mat::Zero(4, 5);
  MaskMat w = MaskMat::Zero(4, 5);
  x(2, 3) = 0.7;
  w(2, 3) = 1;
  LossContext ctx(ObservedData(x, Mask(w)), 10.0);
  CHECK(loss(ctx, Mat::Random(4, 5)) == doctest::Approx(kLn2 * (1.0 / 5 + 1.0 / 4)).epsilon(1e-15));
}

TEST_CASE("loss matches the naive quadruple loop") {
  std::mt19937_64 gen(13);
  for (int t = 0; t < 10; ++t) {
    auto inst = make_instance(6, 7, 0.5, gen, 10.0, t % 2 == 0);
    const Mat m = oracle::gaussian(6, 7, gen, 2.0);
    CHECK(oracle::rel_err(loss(inst.ctx, m), oracle::naive_loss(inst.x, inst.w.as_real(), m)) <= 1e-12);
  }
}

TEST_CASE("loss and gradient are shift invariant") {
  std::mt19937_64 gen(14);
  for (int t = 0; t < 10; ++t) {
    auto inst = make_instance(10, 12, 0.4, gen);
    const Mat m = oracle::gaussian(10, 12, gen);
    const double base = loss(inst.ctx, m);
    CHECK(std::abs(loss(inst.ctx, shift(m, 3.7)) - base) <= 1e-9 * base);
    const Mat g = gradient(inst.ctx, m);
    const Mat gs = gradient(inst.ctx, shift(m, -2.25));
    CHECK((g - gs).norm() <= 1e-9 * g.norm());
    CHECK(std::abs(g.sum()) <= 1e-9 * g.norm());
  }
}

TEST_CASE("loss lower bound from the self terms") {
  std::mt19937_64 gen(15);
  for (int t = 0; t < 20; ++t) {
    auto inst = make_instance(5, 6, 0.6, gen);
    const double count = static_cast<double>(inst.ctx.data().observed_count());
    const double floor = count * kLn2 * (1.0 / 5 + 1.0 / 6);
    CHECK(loss(inst.ctx, oracle::gaussian(5, 6, gen)) >= floor);
  }
  // Diagonal mask: no off-diagonal pairs, bound attained.
  Mat x = Mat::Random(4, 4);
  MaskMat w = MaskMat::Identity(4, 4);
  LossContext diag(ObservedData(x, Mask(w)), 1.0);
  CHECK(loss(diag, Mat::Random(4, 4)) == doctest::Approx(4 * kLn2 * 0.5).epsilon(1e-14));
  // Every t = 0 (constant M): each ordered pair contributes log 2.
  auto inst = make_instance(5, 6, 0.6, gen);
  double pairs = 0.0;
  for (Eigen::Index i = 0; i < 5; ++i) pairs += std::pow(inst.ctx.data().row_list(i).size(), 2) / 6.0;
  for (Eigen::Index j = 0; j < 6; ++j) pairs += std::pow(inst.ctx.data().col_list(j).size(), 2) / 5.0;
  CHECK(loss(inst.ctx, Mat::Constant(5, 6, 0.3)) == doctest::Approx(pairs * kLn2).epsilon(1e-13));
}

TEST_CASE("gradient vanishes when all observed values are equal") {
  LossContext ctx(ObservedData(Mat::Constant(5, 4, 1.0), Mask::full(5, 4)), 10.0);
  std::mt19937_64 gen(16);
  CHECK(gradient(ctx, oracle::gaussian(5, 4, gen)).isZero(0.0));
}

TEST_CASE("gradient matches central finite differences") {
  std::mt19937_64 gen(17);
  for (int t = 0; t < 5; ++t) {
    auto inst = make_instance(8, 7, 0.6, gen);
    const Mat m = oracle::gaussian(8, 7, gen);
    const Mat g = gradient(inst.ctx, m);
    const Mat fd = oracle::finite_difference(
        [&](const Mat& p) { return oracle::naive_loss(inst.x, inst.w.as_real(), p); }, m, 1e-5);
    for (Eigen::Index i = 0; i < 8; ++i)
      for (Eigen::Index j = 0; j < 7; ++j) {
        if (!inst.w(i, j)) {
          CHECK(g(i, j) == 0.0);
          continue;
        }
        CHECK(std::abs(g(i, j) - fd(i, j)) <= 1e-5 * std::max(std::abs(fd(i, j)), 1e-3));
      }
  }
}

TEST_CASE("sample semi-norm") {
  std::mt19937_64 gen(18);
  auto inst = make_instance(6, 6, 0.7, gen, 0.5);
  CHECK(sample_seminorm_sq(inst.ctx, Mat::Constant(6, 6, 2.5)) == 0.0);
  CHECK(sample_seminorm_sq(inst.ctx, Mat::Zero(6, 6)) == 0.0);
  for (int t = 0; t < 5; ++t) {
    LossContext full(ObservedData(oracle::gaussian(6, 6, gen), Mask::full(6, 6)), 0.5);
    const Mat d = oracle::gaussian(6, 6, gen);
    const double got = sample_seminorm_sq(full, d);
    CHECK(got >= 0.0);
    CHECK(oracle::rel_err(got, oracle::naive_seminorm(full.data().values(), Mat::Ones(6, 6), d, 0.5)) <= 1e-12);
  }
  CHECK_THROWS_AS(sample_seminorm_sq(inst.ctx, Mat::Zero(5, 6)), InvalidArgument);
}

TEST_CASE("convexity lower bound inside the box") {
  std::mt19937_64 gen(19);
  const double alpha = 1.5;
  for (int t = 0; t < 100; ++t) {
    auto inst = make_instance(6, 5, 0.6, gen, alpha, t % 3 == 0);
    const Mat m1 = oracle::uniform(6, 5, gen, -alpha, alpha);
    const Mat m2 = oracle::uniform(6, 5, gen, -alpha, alpha);
    const double lhs = loss(inst.ctx, m1) - loss(inst.ctx, m2);
    const double rhs = (gradient(inst.ctx, m2).array() * (m1 - m2).array()).sum() +
                       sample_seminorm_sq(inst.ctx, m1 - m2);
    CHECK(lhs - rhs >= -1e-8 * (1.0 + std::abs(loss(inst.ctx, m2))));
  }
}

TEST_CASE("lipschitz constants") {
  Mat bin(3, 4);
  bin << 0, 1, 0, 1, 1, 1, 0, 0, 0, 0, 1, 1;
  LossContext b(ObservedData(bin, Mask::full(3, 4)), 10.0);
  const LipschitzInfo l = lipschitz(b);
  CHECK(l.l_x == 1.0);
  CHECK(l.l_w == 2.0);
  CHECK(l.l_f == 1.0);

  LossContext single(ObservedData::from_entries(3, 3, {{1, 1, 4.2}}), 10.0);
  CHECK(lipschitz(single).l_x == 0.0);
  CHECK(lipschitz(single).l_f == 0.0);

  std::vector<Entry> seq;
  for (int v = 1; v <= 100; ++v) seq.push_back({(v - 1) / 10, (v - 1) % 10, double(v)});
  LossContext hundred(ObservedData::from_entries(10, 10, seq), 10.0);
  const LipschitzInfo q = lipschitz(hundred, 0.05, 0.95);
  // Linear interpolation at positions 4.95 and 94.05 of 1..100.
  CHECK(q.l_x == doctest::Approx((95.05 - 5.95) * (95.05 - 5.95)).epsilon(1e-12));
  CHECK(q.l_w == 2.0);
  CHECK(q.l_f == doctest::Approx(q.l_x));

  LossContext empty(ObservedData(Mat::Zero(2, 2), Mask(MaskMat::Zero(2, 2))), 1.0);
  CHECK_THROWS_AS(lipschitz(empty), InvalidArgument);
  CHECK_THROWS_AS(lipschitz(b, 0.6, 0.9), InvalidArgument);
}

TEST_CASE("gradient is Lipschitz with constant l_f") {
  std::mt19937_64 gen(20);
  for (int t = 0; t < 30; ++t) {
    auto inst = make_instance(7, 6, 0.6, gen, 10.0, t % 2 == 1);
    const double lf = lipschitz(inst.ctx).l_f;
    const Mat m1 = oracle::gaussian(7, 6, gen, 2.0), m2 = oracle::gaussian(7, 6, gen, 2.0);
    const double lhs = (gradient(inst.ctx, m1) - gradient(inst.ctx, m2)).norm();
    CHECK(lhs <= lf * (m1 - m2).norm() + 1e-8);
  }
}

TEST_CASE("gradient cost grows roughly cubically") {
  std::mt19937_64 gen(21);
  auto time_for = [&](Eigen::Index n) {
    LossContext ctx(ObservedData(oracle::gaussian(n, n, gen), Mask::full(n, n)), 10.0);
    const Mat m = oracle::gaussian(n, n, gen);
    double best = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      volatile double sink = gradient(ctx, m).sum();
      (void)sink;
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
  };
  const double small = time_for(80), large = time_for(160);
  CHECK(large / small <= 10.0);
}

TEST_CASE("loss rejects mismatched shapes") {
  std::mt19937_64 gen(22);
  auto inst = make_instance(4, 4, 0.5, gen);
  CHECK_THROWS_AS(loss(inst.ctx, Mat::Zero(4, 5)), InvalidArgument);
  CHECK_THROWS_AS(gradient(inst.ctx, Mat::Zero(3, 4)), InvalidArgument);
  CHECK_THROWS_AS(LossContext(inst.ctx.data(), 0.0), InvalidArgument);
}
