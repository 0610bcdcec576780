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

#include <cmath>
#include <random>

#include "doctest.h"
#include "nimc/eval.hpp"
#include "oracles.hpp"

using namespace nimc;

TEST_CASE("rmse variants") {
  std::mt19937_64 gen(61);
  const Mat m = oracle::gaussian(5, 5, gen);
  CHECK(rmse(m, m, false) == 0.0);
  CHECK(rmse(m, m, true) == 0.0);
  const Mat s = shift(m, 0.75);
  CHECK(rmse(s, m, false) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(rmse(s, m, true) <= 1e-15);
  for (int t = 0; t < 20; ++t) {
    const Mat a = oracle::gaussian(5, 5, gen), b = oracle::gaussian(5, 5, gen);
    CHECK(rmse(a, b, true) <= rmse(a, b, false));
    const double c = rmse(a, b, true);
    CHECK(oracle::rel_err(rmse(shift(a, 3.25), b, true), c) <= 1e-12);
  }
  CHECK_THROWS_AS(rmse(m, Mat::Zero(5, 4), false), InvalidArgument);
}

TEST_CASE("percentile extremes and ties") {
  Mat m(2, 3);
  m << 3, 1, 2,
       0, 0, 0;
  RankMetrics r = rank_metrics(m, {{0, 0, 1.0}});
  CHECK(r.rank1 == 0.0);
  r = rank_metrics(m, {{0, 1, 1.0}});
  CHECK(r.rank1 == 1.0);
  r = rank_metrics(m, {{0, 2, 1.0}});
  CHECK(r.rank1 == 0.5);
  CHECK(r.rank2 == 0.0);
  CHECK(r.rank3 == doctest::Approx(0.2).epsilon(1e-15));
  // Row 1 is all ties; entry (1,0) against column {3, 0}.
  r = rank_metrics(m, {{1, 0, 2.0}});
  CHECK(r.rank1 == 0.5);
  CHECK(r.rank2 == 1.0);
  CHECK(r.rank3 == doctest::Approx((3 + 1.0) / 5).epsilon(1e-15));

  r = rank_metrics(Mat::Constant(4, 4, 2.0), {{0, 1, 1.0}, {3, 2, 5.0}});
  CHECK(r.rank1 == 0.5);
  CHECK(r.rank2 == 0.5);
  CHECK(r.rank3 == 0.5);

  // Singleton row / column.
  r = rank_metrics(Mat::Constant(1, 3, 1.0), {{0, 1, 1.0}});
  CHECK(r.rank2 == 0.5);

  CHECK(percentile_rank({1.0}, 1.0) == 0.5);
  CHECK(percentile_rank({1.0, 2.0, 4.0}, 4.0) == 0.0);
}

TEST_CASE("weights average the per-entry ranks") {
  Mat m(1, 3);
  m << 3, 2, 1;
  const RankMetrics r = rank_metrics(m, {{0, 0, 1.0}, {0, 2, 3.0}});
  CHECK(r.rank1 == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("undefined metrics") {
  CHECK_THROWS_AS(rank_metrics(Mat::Ones(2, 2), {}), UndefinedMetric);
  CHECK_THROWS_AS(rank_metrics(Mat::Ones(2, 2), {{0, 0, 0.0}}), UndefinedMetric);
  CHECK_THROWS_AS(rank_metrics(Mat::Ones(2, 2), {{0, 0, -1.0}, {0, 1, 2.0}}), UndefinedMetric);
  CHECK_THROWS_AS(rank_metrics(Mat::Ones(2, 2), {{2, 0, 1.0}}), InvalidArgument);
  const Mat t = Mat::Ones(2, 2);
  const EvalReport e = evaluate(Mat::Zero(2, 2), &t, {{0, 0, 0.0}});
  CHECK(e.rmse_plain == 1.0);
  CHECK_FALSE(e.rank1.has_value());
  CHECK_FALSE(e.note.empty());
  const EvalReport none = evaluate(Mat::Zero(2, 2), nullptr, {{0, 0, 1.0}});
  CHECK_FALSE(none.rmse_plain.has_value());
  CHECK(none.rank1 == 0.5);
  CHECK(none.n_test == 1);
}

TEST_CASE("rank metrics only see the ordering") {
  std::mt19937_64 gen(62);
  for (int t = 0; t < 10; ++t) {
    Mat m = oracle::gaussian(8, 6, gen);
    m = (m.array() * 4).round() / 4;  // force ties
    TestSet test;
    for (Eigen::Index i = 0; i < 8; ++i)
      for (Eigen::Index j = 0; j < 6; ++j)
        if ((i + j + t) % 3 == 0) test.push_back({i, j, static_cast<double>((i * j) % 4 + 1)});
    const RankMetrics a = rank_metrics(m, test);
    const RankMetrics b = rank_metrics((2 * m.array() + 7).matrix(), test);
    const RankMetrics c = rank_metrics(shift(m, -1.5), test);
    const RankMetrics d = rank_metrics(m.array().exp().matrix(), test);
    for (const RankMetrics& o : {b, c, d}) {
      CHECK(o.rank1 == a.rank1);
      CHECK(o.rank2 == a.rank2);
      CHECK(o.rank3 == a.rank3);
    }
  }
}

TEST_CASE("random predictions sit near one half") {
  double s1 = 0, s2 = 0, s3 = 0;
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 gen(700 + seed);
    const Mat m = oracle::gaussian(30, 30, gen);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    TestSet test;
    for (Eigen::Index i = 0; i < 30; ++i)
      for (Eigen::Index j = 0; j < 30; ++j)
        if (u(gen) < 0.2) test.push_back({i, j, u(gen)});
    const RankMetrics r = rank_metrics(m, test);
    s1 += r.rank1 / 20;
    s2 += r.rank2 / 20;
    s3 += r.rank3 / 20;
  }
  CHECK(std::abs(s1 - 0.5) <= 0.05);
  CHECK(std::abs(s2 - 0.5) <= 0.05);
  CHECK(std::abs(s3 - 0.5) <= 0.05);
}

TEST_CASE("baseline reproduces fully observed data without penalty") {
  std::mt19937_64 gen(63);
  const Mat x = oracle::gaussian(6, 5, gen);
  LossContext ctx(ObservedData(x, Mask::full(6, 5)), 10.0);
  SolverConfig cfg;
  cfg.lambda = 0.0;
  cfg.tol = 1e-28;
  cfg.max_iter = 200;
  for (bool acc : {false, true}) {
    cfg.accelerate = acc;
    const FitResult r = fit_baseline_sq(ctx, cfg, Mat::Zero(6, 5));
    CHECK(r.mu == 1.1);
    CHECK((r.m_hat - x).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("baseline thresholds everything above the top singular value") {
  std::mt19937_64 gen(64);
  const Mat x = oracle::gaussian(7, 6, gen);
  const Mask w = oracle::random_mask(7, 6, 0.5, gen);
  const ObservedData data(x, w);
  LossContext ctx(data, 10.0);
  SolverConfig cfg;
  cfg.lambda = svd(data.values()).singulars(0) * (1 + 1e-12);
  cfg.accelerate = false;
  const FitResult r = fit_baseline_sq(ctx, cfg, Mat::Zero(7, 6));
  CHECK(r.m_hat.norm() == 0.0);
  CHECK(r.iterations == 1);
  CHECK(r.converged);
}

TEST_CASE("squared term value and gradient") {
  std::mt19937_64 gen(65);
  const Mat x = oracle::gaussian(4, 5, gen);
  const Mask w = oracle::random_mask(4, 5, 0.6, gen);
  const ObservedData data(x, w);
  const SmoothTerm term = squared_term(data);
  const Mat m = oracle::gaussian(4, 5, gen);
  const Mat resid = (w.as_real().array() * (m - x).array()).matrix();
  CHECK(oracle::rel_err(term.value(m), 0.5 * resid.squaredNorm()) <= 1e-14);
  CHECK((term.gradient(m) - resid).norm() <= 1e-14);
  CHECK(term.lipschitz == 1.0);
}
