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
#include "nimc/transform.hpp"
#include "oracles.hpp"

using namespace nimc;

namespace {

double h(const Mat& m, double c) { return oracle::nuclear_jacobi(shift(m, c)); }

Mat low_rank(Eigen::Index r, Eigen::Index c, int k, std::mt19937_64& gen) {
  return oracle::gaussian(r, k, gen) * oracle::gaussian(k, c, gen);
}

// Top-d singular vectors re-orthonormalized by modified Gram-Schmidt, then
// projections applied explicitly.
double b_oracle(const Mat& t, int d) {
  Eigen::JacobiSVD<Mat> s(t, Eigen::ComputeThinU | Eigen::ComputeThinV);
  auto gs = [](Mat q) {
    for (Eigen::Index k = 0; k < q.cols(); ++k) {
      for (Eigen::Index j = 0; j < k; ++j) q.col(k) -= q.col(j).dot(q.col(k)) * q.col(j);
      q.col(k).normalize();
    }
    return q;
  };
  const Mat u = gs(s.matrixU().leftCols(d)), v = gs(s.matrixV().leftCols(d));
  const Vec one1 = Vec::Ones(t.rows()), one2 = Vec::Ones(t.cols());
  Vec p1 = one1, p2 = one2;
  for (int k = 0; k < d; ++k) {
    p1 -= u.col(k).dot(one1) * u.col(k);
    p2 -= v.col(k).dot(one2) * v.col(k);
  }
  const double nn = std::sqrt(static_cast<double>(t.rows() * t.cols()));
  return p1.norm() * p2.norm() / nn - nn * std::abs((u * v.transpose()).mean());
}

}  // namespace

TEST_CASE("constant matrix shifts to zero") {
  const TransformResult r = identify_shift(Mat::Constant(4, 6, 5.0));
  const double tol = default_shift_tol(Mat::Constant(4, 6, 5.0));
  CHECK(std::abs(r.c_hat + 5.0) <= tol);
  CHECK(entry_max(r.transformed) <= tol);
  CHECK(r.nuclear_at_c <= std::sqrt(24.0) * tol);
}

TEST_CASE("shift equivariance, idempotence and certificate") {
  std::mt19937_64 gen(51);
  for (int t = 0; t < 5; ++t) {
    const Mat m = shift(low_rank(10, 8, 2, gen), 1.3);
    const double tol = 1e-9;
    const TransformResult a = identify_shift(m, tol);
    const TransformResult b = identify_shift(shift(m, 2.5), tol);
    CHECK(std::abs(b.c_hat - (a.c_hat - 2.5)) <= 2 * tol);
    CHECK(a.transformed == shift(m, a.c_hat));
    CHECK(std::abs(identify_shift(a.transformed, tol).c_hat) <= 2 * tol);
    const double ha = nuclear_norm(a.transformed);
    CHECK(ha <= nuclear_norm(shift(m, a.c_hat + 10 * tol)) + 1e-10 * ha);
    CHECK(ha <= nuclear_norm(shift(m, a.c_hat - 10 * tol)) + 1e-10 * ha);
    CHECK(ha <= nuclear_norm(m));
  }
}

TEST_CASE("bracket contains the minimizer") {
  std::mt19937_64 gen(52);
  for (int t = 0; t < 10; ++t) {
    const Mat m = shift(oracle::gaussian(7, 9, gen), t - 5.0);
    const double b = 2 * nuclear_norm(m) / std::sqrt(63.0) + std::abs(mean_value(m));
    const TransformResult r = identify_shift(m);
    CHECK(r.bracket.first == doctest::Approx(-b).epsilon(1e-14));
    CHECK(r.bracket.second == doctest::Approx(b).epsilon(1e-14));
    CHECK(h(m, -b) >= h(m, 0.0));
    CHECK(h(m, b) >= h(m, 0.0));
    CHECK(r.c_hat >= -b);
    CHECK(r.c_hat <= b);
    CHECK(r.evals > 0);
  }
}

TEST_CASE("golden section beats a dense grid") {
  std::mt19937_64 gen(53);
  for (int t = 0; t < 3; ++t) {
    const Mat m = shift(oracle::gaussian(10, 8, gen), 0.7 * t);
    const TransformResult r = identify_shift(m);
    double best = INFINITY;
    for (int k = 0; k <= 2000; ++k) {
      const double c = r.bracket.first + (r.bracket.second - r.bracket.first) * k / 2000.0;
      best = std::min(best, h(m, c));
    }
    CHECK(h(m, r.c_hat) <= best + 1e-8);
  }
}

TEST_CASE("b diagnostic closed forms") {
  std::mt19937_64 gen(54);
  // Column and row spaces orthogonal to the ones vectors.
  Vec u = oracle::gaussian(9, 1, gen), v = oracle::gaussian(7, 1, gen);
  u.array() -= u.mean();
  v.array() -= v.mean();
  CHECK(b_diagnostic(3.0 * u * v.transpose(), 1) == doctest::Approx(1.0).epsilon(1e-6));

  // Column space spanned by the ones vector.
  const Vec w = oracle::gaussian(7, 1, gen);
  const double b = b_diagnostic(Vec::Ones(9) * w.transpose(), 1);
  CHECK(b <= 1e-9);
  CHECK(b >= -1e-6);

  CHECK_THROWS_AS(b_diagnostic(Mat::Ones(3, 4), 0), InvalidArgument);
  CHECK_THROWS_AS(b_diagnostic(Mat::Ones(3, 4), 4), InvalidArgument);
}

TEST_CASE("b diagnostic matches a projector oracle") {
  std::mt19937_64 gen(55);
  for (int t = 0; t < 5; ++t) {
    const Mat m = shift(low_rank(12, 10, 3, gen), 0.4 * t);
    const Mat tm = identify_shift(m).transformed;
    CHECK(std::abs(b_diagnostic(m, 3) - b_oracle(tm, 3)) <= 1e-9);
  }
}

TEST_CASE("non-finite input is rejected") {
  Mat m = Mat::Ones(3, 3);
  m(1, 1) = NAN;
  CHECK_THROWS_AS(identify_shift(m), InvalidArgument);
  CHECK_THROWS_AS(identify_shift(Mat::Ones(3, 3), -1.0), InvalidArgument);
}
