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

#include "nimc/core.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace nimc {

namespace {

std::string shape_str(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

// Flip singular-vector pairs so the first nonzero entry of each left vector
// is non-negative.
void fix_signs(Mat& left, Mat& right) {
  for (Eigen::Index k = 0; k < left.cols(); ++k) {
    for (Eigen::Index i = 0; i < left.rows(); ++i) {
      const double v = left(i, k);
      if (v != 0.0) {
        if (v < 0.0) {
          left.col(k) *= -1.0;
          right.col(k) *= -1.0;
        }
        break;
      }
    }
  }
}

}  // namespace

Mask::Mask(MaskMat indicators) : w_(std::move(indicators)) {
  for (Eigen::Index j = 0; j < w_.cols(); ++j)
    for (Eigen::Index i = 0; i < w_.rows(); ++i)
      if (w_(i, j) > 1) throw InvalidArgument("mask entries must be 0 or 1");
}

Mask Mask::from_real(const Mat& indicators) {
  MaskMat w(indicators.rows(), indicators.cols());
  for (Eigen::Index j = 0; j < indicators.cols(); ++j) {
    for (Eigen::Index i = 0; i < indicators.rows(); ++i) {
      const double v = indicators(i, j);
      if (v != 0.0 && v != 1.0) throw InvalidArgument("mask entries must be 0 or 1");
      w(i, j) = v == 1.0 ? 1 : 0;
    }
  }
  return Mask(std::move(w));
}

Mask Mask::full(Eigen::Index rows, Eigen::Index cols) {
  return Mask(MaskMat::Ones(rows, cols));
}

std::int64_t Mask::count() const { return w_.cast<std::int64_t>().sum(); }

ObservedData::ObservedData(const Mat& values, const Mask& mask) : x_(values), w_(mask) {
  if (values.rows() < 1 || values.cols() < 1)
    throw InvalidArgument("observed data must have at least one row and one column");
  if (mask.rows() != values.rows() || mask.cols() != values.cols())
    throw InvalidArgument("mask shape " + shape_str(mask.rows(), mask.cols()) +
                          " does not match values " + shape_str(values.rows(), values.cols()));
  const Eigen::Index n1 = rows(), n2 = cols();
  row_lists_.assign(n1, {});
  col_lists_.assign(n2, {});
  for (Eigen::Index i = 0; i < n1; ++i) {
    for (Eigen::Index j = 0; j < n2; ++j) {
      if (w_(i, j)) {
        if (!std::isfinite(x_(i, j)))
          throw InvalidArgument("observed value at (" + std::to_string(i) + "," +
                                std::to_string(j) + ") is not finite");
        row_lists_[i].push_back(j);
        col_lists_[j].push_back(i);
        ++count_;
      } else {
        x_(i, j) = 0.0;
      }
    }
  }
}

ObservedData ObservedData::from_entries(Eigen::Index n1, Eigen::Index n2,
                                        const std::vector<Entry>& entries) {
  if (n1 < 1 || n2 < 1) throw InvalidArgument("shape must be positive");
  Mat x = Mat::Zero(n1, n2);
  MaskMat w = MaskMat::Zero(n1, n2);
  for (const auto& e : entries) {
    if (e.row < 0 || e.row >= n1 || e.col < 0 || e.col >= n2)
      throw InvalidArgument("entry (" + std::to_string(e.row) + "," + std::to_string(e.col) +
                            ") outside " + shape_str(n1, n2));
    if (w(e.row, e.col))
      throw InvalidArgument("duplicate entry (" + std::to_string(e.row) + "," +
                            std::to_string(e.col) + ")");
    x(e.row, e.col) = e.value;
    w(e.row, e.col) = 1;
  }
  return ObservedData(x, Mask(std::move(w)));
}

std::vector<Entry> ObservedData::entries() const {
  std::vector<Entry> out;
  out.reserve(static_cast<std::size_t>(count_));
  for (Eigen::Index i = 0; i < rows(); ++i)
    for (Eigen::Index j : row_lists_[i]) out.push_back({i, j, x_(i, j)});
  return out;
}

std::vector<double> ObservedData::observed_values() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count_));
  for (Eigen::Index i = 0; i < rows(); ++i)
    for (Eigen::Index j : row_lists_[i]) out.push_back(x_(i, j));
  return out;
}

Mat SvdResult::reconstruct() const { return left * singulars.asDiagonal() * right.transpose(); }

void require_finite(const Mat& m, const char* what) {
  if (m.rows() < 1 || m.cols() < 1) throw InvalidArgument(std::string(what) + ": empty matrix");
  if (!m.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite entries");
}

void require_same_shape(const Mat& a, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (a.rows() != rows || a.cols() != cols)
    throw InvalidArgument(std::string(what) + ": shape " + shape_str(a.rows(), a.cols()) +
                          " expected " + shape_str(rows, cols));
}

Mat shift(const Mat& m, double c) {
  if (!std::isfinite(c)) throw InvalidArgument("shift: constant is not finite");
  return m.array() + c;
}

double mean_value(const Mat& m) { return m.mean(); }

double entry_max(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

Norms norms(const Mat& m) {
  require_finite(m, "norms");
  const Vec s = singular_values(m);
  return {m.norm(), s.sum(), s(0), entry_max(m)};
}

SvdResult svd(const Mat& m) {
  require_finite(m, "svd");
  Eigen::BDCSVD<Mat> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success)
    throw NumericalFailure("svd did not converge on " + shape_str(m.rows(), m.cols()) + " input");
  SvdResult out{dec.matrixU(), dec.singularValues(), dec.matrixV()};
  fix_signs(out.left, out.right);
  return out;
}

Vec singular_values(const Mat& m) {
  Eigen::BDCSVD<Mat> dec(m);
  if (dec.info() != Eigen::Success)
    throw NumericalFailure("svd did not converge on " + shape_str(m.rows(), m.cols()) + " input");
  return dec.singularValues();
}

double nuclear_norm(const Mat& m) { return singular_values(m).sum(); }

}  // namespace nimc
