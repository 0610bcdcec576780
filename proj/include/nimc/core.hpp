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

#ifndef NIMC_CORE_HPP_
#define NIMC_CORE_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "nimc/error.hpp"

namespace nimc {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using MaskMat = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Binary observation indicator matrix W.
class Mask {
 public:
  Mask() = default;
  explicit Mask(MaskMat indicators);
  /// Converts a real matrix whose entries are exactly 0 or 1.
  static Mask from_real(const Mat& indicators);
  static Mask full(Eigen::Index rows, Eigen::Index cols);

  Eigen::Index rows() const { return w_.rows(); }
  Eigen::Index cols() const { return w_.cols(); }
  bool operator()(Eigen::Index i, Eigen::Index j) const { return w_(i, j) != 0; }
  const MaskMat& indicators() const { return w_; }
  Mat as_real() const { return w_.cast<double>(); }
  std::int64_t count() const;

 private:
  MaskMat w_;
};

/// One observed entry with its stored value.
struct Entry {
  Eigen::Index row;
  Eigen::Index col;
  double value;
};

/// The pair {X, W}. Unobserved values are stored as 0 and never read.
///
/// Per-row and per-column lists of observed positions are built once on
/// construction; every pairwise loop in the library walks these lists.
class ObservedData {
 public:
  ObservedData(const Mat& values, const Mask& mask);
  static ObservedData from_entries(Eigen::Index n1, Eigen::Index n2,
                                   const std::vector<Entry>& entries);

  Eigen::Index rows() const { return x_.rows(); }
  Eigen::Index cols() const { return x_.cols(); }
  const Mat& values() const { return x_; }
  const Mask& mask() const { return w_; }
  std::int64_t observed_count() const { return count_; }

  /// Column indices observed in row i, ascending.
  const std::vector<Eigen::Index>& row_list(Eigen::Index i) const { return row_lists_[i]; }
  /// Row indices observed in column j, ascending.
  const std::vector<Eigen::Index>& col_list(Eigen::Index j) const { return col_lists_[j]; }

  /// Observed entries in row-major order.
  std::vector<Entry> entries() const;
  std::vector<double> observed_values() const;

 private:
  Mat x_;
  Mask w_;
  std::int64_t count_ = 0;
  std::vector<std::vector<Eigen::Index>> row_lists_;
  std::vector<std::vector<Eigen::Index>> col_lists_;
};

struct SvdResult {
  Mat left;      // n1 x k
  Vec singulars; // k = min(n1, n2), non-increasing
  Mat right;     // n2 x k
  Mat reconstruct() const;
};

struct Norms {
  double frobenius;
  double nuclear;
  double spectral;
  double entry_max;
};

/// Throws InvalidArgument unless M is non-empty with finite entries.
void require_finite(const Mat& m, const char* what);
void require_same_shape(const Mat& a, Eigen::Index rows, Eigen::Index cols, const char* what);

/// M (+) c: adds c to every entry.
Mat shift(const Mat& m, double c);
double mean_value(const Mat& m);
double entry_max(const Mat& m);
Norms norms(const Mat& m);

/// Thin SVD. Each left singular vector is flipped so its first nonzero entry
/// is non-negative; the paired right vector flips with it.
SvdResult svd(const Mat& m);
/// Singular values only, non-increasing.
Vec singular_values(const Mat& m);
double nuclear_norm(const Mat& m);

}  // namespace nimc

#endif  // NIMC_CORE_HPP_
