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

#include "nimc/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nimc/error.hpp"

namespace nimc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

void check_token(const std::string& s, bool allow_comma) {
  for (char ch : s)
    if (ch == '\n' || ch == '\r' || (!allow_comma && ch == ','))
      throw InvalidArgument("report token contains a forbidden character: " + s);
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_optional(std::optional<double> v) { return v ? format_number(*v) : "null"; }

double parse_number(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "nan") return NAN;
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw IoError("not a number: '" + raw + "'");
  return v;
}

std::optional<double> parse_optional(const std::string& s) {
  if (trim(s) == "null") return std::nullopt;
  return parse_number(s);
}

void Section::set(const std::string& key, const std::string& value) {
  check_token(key, false);
  check_token(value, true);
  for (auto& kv : values)
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  values.emplace_back(key, value);
}
void Section::set(const std::string& key, double value) { set(key, format_number(value)); }
void Section::set(const std::string& key, std::optional<double> value) {
  set(key, format_optional(value));
}
void Section::set(const std::string& key, long long value) { set(key, std::to_string(value)); }
void Section::set(const std::string& key, bool value) {
  set(key, std::string(value ? "true" : "false"));
}

const std::string* Section::get(const std::string& key) const {
  for (const auto& kv : values)
    if (kv.first == key) return &kv.second;
  return nullptr;
}

void Section::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw InvalidArgument("row width does not match table " + name);
  for (const auto& c : row) check_token(c, false);
  rows.push_back(std::move(row));
}

std::size_t Section::column(const std::string& col) const {
  for (std::size_t k = 0; k < columns.size(); ++k)
    if (columns[k] == col) return k;
  throw IoError("table " + name + " has no column " + col);
}

Report::Report(std::string kind) : kind_(std::move(kind)) {}

Section& Report::section(const std::string& name) {
  for (auto& s : sections_)
    if (s.name == name && !s.is_table) return s;
  check_token(name, false);
  sections_.push_back(Section{name, false, {}, {}, {}});
  return sections_.back();
}

Section& Report::table(const std::string& name, std::vector<std::string> columns) {
  for (const auto& s : sections_)
    if (s.name == name) throw InvalidArgument("duplicate section " + name);
  for (const auto& c : columns) check_token(c, false);
  sections_.push_back(Section{name, true, {}, std::move(columns), {}});
  return sections_.back();
}

const Section* Report::find(const std::string& name) const {
  for (const auto& s : sections_)
    if (s.name == name) return &s;
  return nullptr;
}

std::string Report::str() const {
  std::ostringstream os;
  os << "# nimc report\n";
  os << "schema_version = " << schema_version_ << "\n";
  os << "kind = " << kind_ << "\n";
  for (const auto& s : sections_) {
    os << "\n[" << (s.is_table ? "table " : "") << s.name << "]\n";
    if (s.is_table) {
      for (std::size_t k = 0; k < s.columns.size(); ++k) os << (k ? "," : "") << s.columns[k];
      os << "\n";
      for (const auto& row : s.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << row[k];
        os << "\n";
      }
    } else {
      for (const auto& [k, v] : s.values) os << k << " = " << v << "\n";
    }
  }
  return os.str();
}

Report Report::parse(const std::string& text) {
  Report r;
  std::istringstream is(text);
  std::string line;
  Section* cur = nullptr;
  bool have_header = false;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw IoError("line " + std::to_string(lineno) + ": bad section header");
      std::string name = trim(t.substr(1, t.size() - 2));
      const bool tab = name.rfind("table ", 0) == 0;
      if (tab) name = trim(name.substr(6));
      if (r.find(name)) throw IoError("duplicate section " + name);
      r.sections_.push_back(Section{name, tab, {}, {}, {}});
      cur = &r.sections_.back();
      have_header = false;
      continue;
    }
    if (cur && cur->is_table) {
      auto cells = split_csv(t);
      if (!have_header) {
        cur->columns = std::move(cells);
        have_header = true;
      } else {
        if (cells.size() != cur->columns.size())
          throw IoError("line " + std::to_string(lineno) + ": row width mismatch");
        cur->rows.push_back(std::move(cells));
      }
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw IoError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
    if (!cur) {
      if (key == "schema_version") {
        r.schema_version_ = static_cast<int>(parse_number(value));
        if (r.schema_version_ != kReportSchemaVersion)
          throw IoError("unsupported schema_version " + value);
      } else if (key == "kind") {
        r.kind_ = value;
      } else {
        throw IoError("line " + std::to_string(lineno) + ": key outside a section");
      }
    } else {
      cur->values.emplace_back(key, value);
    }
  }
  return r;
}

Report Report::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse(os.str());
}

void Report::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << str();
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace nimc
