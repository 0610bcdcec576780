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

#ifndef NIMC_IO_HPP_
#define NIMC_IO_HPP_

#include <optional>
#include <string>
#include <vector>

#include "nimc/core.hpp"

namespace nimc {

inline constexpr int kFormatVersion = 1;

// Shape sidecar "<file>.meta": key = value lines with format_version, n1, n2
// and the layout (triplets or dense).
struct Meta {
  int format_version = kFormatVersion;
  Eigen::Index n1 = 0;
  Eigen::Index n2 = 0;
  std::string layout;
};

std::string meta_path(const std::string& data_path);
void write_meta(const std::string& data_path, const Meta& meta);
Meta read_meta(const std::string& data_path);
bool has_meta(const std::string& data_path);

// Triplet CSV, header "row,col,value", 0-based indices, 17 significant digits.
void write_triplets(const std::string& path, Eigen::Index n1, Eigen::Index n2,
                    const std::vector<Entry>& entries);
std::vector<Entry> read_triplets(const std::string& path);

// Reads the shape from the sidecar unless given explicitly; rejects
// duplicates and out-of-range indices.
ObservedData read_observed(const std::string& path, std::optional<Eigen::Index> n1 = std::nullopt,
                           std::optional<Eigen::Index> n2 = std::nullopt);
void write_observed(const std::string& path, const ObservedData& data);

// Dense CSV grid, one matrix row per line, no header.
void write_dense(const std::string& path, const Mat& m);
Mat read_dense(const std::string& path);

// value >= t maps to 1, otherwise 0.
std::vector<Entry> binarize(std::vector<Entry> entries, double threshold);

}  // namespace nimc

#endif  // NIMC_IO_HPP_
