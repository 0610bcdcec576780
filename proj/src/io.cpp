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

#include "nimc/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "nimc/error.hpp"
#include "nimc/report.hpp"

namespace nimc {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

std::vector<std::string> split(const std::string& line, const std::string& where) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  cells.push_back(cur);
  for (auto& c : cells)
    if (c.find_first_not_of(" \t") == std::string::npos) throw IoError(where + ": empty field");
  return cells;
}

Eigen::Index parse_index(const std::string& s, const std::string& where) {
  const double v = parse_number(s);
  if (!(v >= 0) || v != std::floor(v) || v > 1e15) throw IoError(where + ": bad index '" + s + "'");
  return static_cast<Eigen::Index>(v);
}

}  // namespace

std::string meta_path(const std::string& data_path) { return data_path + ".meta"; }

void write_meta(const std::string& data_path, const Meta& meta) {
  const std::string p = meta_path(data_path);
  auto out = open_out(p);
  out << "format_version = " << meta.format_version << "\n"
      << "n1 = " << meta.n1 << "\n"
      << "n2 = " << meta.n2 << "\n"
      << "layout = " << meta.layout << "\n";
  finish(out, p);
}

bool has_meta(const std::string& data_path) {
  return static_cast<bool>(std::ifstream(meta_path(data_path)));
}

Meta read_meta(const std::string& data_path) {
  const std::string p = meta_path(data_path);
  auto in = open_in(p);
  std::ostringstream os;
  os << in.rdbuf();
  // Same key = value grammar as a report preamble, wrapped in a section.
  const Report r = Report::parse("[meta]\n" + os.str());
  const Section& s = *r.find("meta");
  Meta m;
  auto need = [&](const char* key) -> const std::string& {
    const std::string* v = s.get(key);
    if (!v) throw IoError(p + ": missing " + key);
    return *v;
  };
  m.format_version = static_cast<int>(parse_number(need("format_version")));
  if (m.format_version != kFormatVersion)
    throw IoError(p + ": unsupported format_version " + need("format_version"));
  m.n1 = parse_index(need("n1"), p);
  m.n2 = parse_index(need("n2"), p);
  if (const std::string* l = s.get("layout")) m.layout = *l;
  return m;
}

void write_triplets(const std::string& path, Eigen::Index n1, Eigen::Index n2,
                    const std::vector<Entry>& entries) {
  auto out = open_out(path);
  out << "row,col,value\n";
  for (const Entry& e : entries) {
    if (e.row < 0 || e.row >= n1 || e.col < 0 || e.col >= n2)
      throw InvalidArgument("triplet index out of range");
    out << e.row << ',' << e.col << ',' << format_number(e.value) << '\n';
  }
  finish(out, path);
  write_meta(path, Meta{kFormatVersion, n1, n2, "triplets"});
}

std::vector<Entry> read_triplets(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "row,col,value") throw IoError(path + ": expected header row,col,value");
  std::vector<Entry> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    const auto cells = split(line, where);
    if (cells.size() != 3) throw IoError(where + ": expected 3 fields");
    out.push_back({parse_index(cells[0], where), parse_index(cells[1], where), parse_number(cells[2])});
  }
  return out;
}

ObservedData read_observed(const std::string& path, std::optional<Eigen::Index> n1,
                           std::optional<Eigen::Index> n2) {
  if (!n1 || !n2) {
    const Meta m = read_meta(path);
    if (!n1) n1 = m.n1;
    if (!n2) n2 = m.n2;
  }
  return ObservedData::from_entries(*n1, *n2, read_triplets(path));
}

void write_observed(const std::string& path, const ObservedData& data) {
  write_triplets(path, data.rows(), data.cols(), data.entries());
}

void write_dense(const std::string& path, const Mat& m) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_number(m(i, j));
    out << '\n';
  }
  finish(out, path);
  write_meta(path, Meta{kFormatVersion, m.rows(), m.cols(), "dense"});
}

Mat read_dense(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    std::vector<double> r;
    for (const auto& c : split(line, where)) r.push_back(parse_number(c));
    if (!rows.empty() && r.size() != rows.front().size()) throw IoError(where + ": ragged row");
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw IoError(path + ": no data");
  Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  if (has_meta(path)) {
    const Meta meta = read_meta(path);
    if (meta.n1 != m.rows() || meta.n2 != m.cols()) throw IoError(path + ": shape disagrees with sidecar");
  }
  return m;
}

std::vector<Entry> binarize(std::vector<Entry> entries, double threshold) {
  if (!std::isfinite(threshold)) throw InvalidArgument("binarize threshold must be finite");
  for (Entry& e : entries) e.value = e.value >= threshold ? 1.0 : 0.0;
  return entries;
}

}  // namespace nimc
