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

#ifndef NIMC_REPORT_HPP_
#define NIMC_REPORT_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nimc {

inline constexpr int kReportSchemaVersion = 1;

// Plain-text structured document:
//
//   # nimc report
//   schema_version = 1
//   kind = fit
//
//   [config]
//   alpha = 10
//
//   [table trace]
//   iteration,objective
//   0,1.2345
//
// Keys and the header preamble are "key = value"; table sections hold a CSV
// header line followed by rows. Missing numbers are written as null.
struct Section {
  std::string name;
  bool is_table = false;
  std::vector<std::pair<std::string, std::string>> values;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, std::optional<double> value);
  void set(const std::string& key, long long value);
  void set(const std::string& key, int value) { set(key, static_cast<long long>(value)); }
  void set(const std::string& key, bool value);
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  const std::string* get(const std::string& key) const;

  void add_row(std::vector<std::string> row);
  // Index of a column, throws IoError when absent.
  std::size_t column(const std::string& name) const;
};

class Report {
 public:
  explicit Report(std::string kind = "");

  const std::string& kind() const { return kind_; }
  int schema_version() const { return schema_version_; }

  Section& section(const std::string& name);
  Section& table(const std::string& name, std::vector<std::string> columns);
  const Section* find(const std::string& name) const;
  const std::vector<Section>& sections() const { return sections_; }

  std::string str() const;
  static Report parse(const std::string& text);
  static Report load(const std::string& path);
  void save(const std::string& path) const;

 private:
  std::string kind_;
  int schema_version_ = kReportSchemaVersion;
  std::vector<Section> sections_;
};

// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double v);
std::string format_optional(std::optional<double> v);
// Accepts anything format_number emits; throws IoError otherwise.
double parse_number(const std::string& s);
std::optional<double> parse_optional(const std::string& s);

}  // namespace nimc

#endif  // NIMC_REPORT_HPP_
