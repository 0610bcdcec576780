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

#ifndef NIMC_COMMANDS_HPP_
#define NIMC_COMMANDS_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nimc/eval.hpp"
#include "nimc/report.hpp"
#include "nimc/sim.hpp"
#include "nimc/solver.hpp"

namespace nimc {

enum class Method { kRcuPgd, kRcuFista, kBaselineSq };
enum class Selection { kRmseHoldout, kRank1, kRank2, kRank3 };

std::string to_string(Method m);
std::string to_string(Selection s);
Method parse_method(const std::string& s);
Selection parse_selection(const std::string& s);

struct RunConfig {
  DgpSpec dgp;
  SolverConfig solver;
  Method method = Method::kRcuFista;
  // Empty means default_lambda_fractions(). With lambda_relative the entries
  // are multiplied by lambda_max of the data being fitted.
  std::vector<double> lambda_grid;
  bool lambda_relative = true;
  double holdout_fraction = 0.2;
  std::uint64_t split_seed = 0;
  Selection metric = Selection::kRmseHoldout;
  int replications = 10;
  // 0: NIMC_THREADS if set, else hardware concurrency.
  int threads = 0;
  std::optional<double> binarize_threshold;
  // Off writes null into every timing field so reports are reproducible.
  bool timing = true;

  std::string input;
  std::string truth;
  std::string test;
  std::string m_hat;
  std::string out_dir = ".";
  std::string output;

  std::vector<double> resolved_grid() const;
  void validate() const;
};

// Geometric grid from 1 down to 0.1, thirteen points.
std::vector<double> default_lambda_fractions();

// Keys are the config-file names; CLI flags use the same names with dashes.
const std::vector<std::string>& config_keys();
void set_field(RunConfig& cfg, const std::string& key, const std::string& value);
void apply_section(RunConfig& cfg, const Section& section);
RunConfig load_config(const std::string& path);
void write_config(Section& section, const RunConfig& cfg);

int resolve_threads(int requested);

// Smallest lambda whose first prox step from zero returns zero.
double lambda_max(const LossContext& ctx, Method method);
FitResult run_method(const LossContext& ctx, Method method, const SolverConfig& cfg, const Mat& m0);

struct FitOutcome {
  FitResult fit;
  double chosen_lambda = 0.0;
  // Grid entry that won the selection (a fraction when lambda_relative).
  double chosen_grid_value = 0.0;
  double lambda_max_full = 0.0;
  Report report;
};
FitOutcome run_fit(const RunConfig& cfg, const ObservedData& data);

struct MethodRow {
  std::string method;
  std::optional<double> rmse_plain_mean, rmse_plain_sd;
  std::optional<double> rmse_centered_mean, rmse_centered_sd;
  std::optional<double> time_mean, time_sd;
  int n_ok = 0;
};
struct BenchOutcome {
  std::vector<MethodRow> methods;
  int failed_replications = 0;
  Report report;
};
BenchOutcome run_bench(const RunConfig& cfg);

// Subcommands. Return the process exit code: 0 success, 2 invalid input,
// 3 compute failure.
int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_command(const std::string& name, const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace nimc

#endif  // NIMC_COMMANDS_HPP_
