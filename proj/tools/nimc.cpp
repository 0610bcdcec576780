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

// nimc: simulate, fit, eval and bench from the command line.
//
//   nimc simulate --dgp dgp1 --n1 50 --n2 50 --seed 7 --out-dir run
//   nimc fit --input run/observed.csv --out-dir run
//   nimc eval --m-hat run/m_hat.csv --test run/test.csv --truth run/truth.csv
//   nimc bench --dgp dgp1 --replications 10 --no-timing --output bench.txt
//
// Every flag mirrors a key of the [config] section written into reports;
// --config loads such a file first and explicit flags override it.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "nimc/commands.hpp"
#include "nimc/error.hpp"

namespace {

const std::map<std::string, std::string>& help_text() {
  static const std::map<std::string, std::string> h = {
      {"n1", "rows"},
      {"n2", "columns"},
      {"rank", "ground-truth rank"},
      {"dgp", "dgp1 (Bernoulli) or dgp2 (Gaussian)"},
      {"seed", "simulation seed (bench: first replication)"},
      {"mnar_scale", "coefficient on X in the observation logistic"},
      {"mnar_offset", "intercept of the observation logistic, or auto"},
      {"frailty_coef", "frailty coefficient f in a = 1/(1 + f e^Y)"},
      {"method", "rcu_pgd, rcu_fista or baseline_sq"},
      {"lambda", "single absolute penalty (disables selection)"},
      {"lambda_grid", "comma separated penalty grid"},
      {"lambda_relative", "grid entries are fractions of lambda_max"},
      {"alpha", "entrywise bound"},
      {"mu", "step parameter, or auto"},
      {"tol", "objective-change stopping threshold, or auto"},
      {"max_iter", "outer iterations"},
      {"check_descent", "fail on a sufficient-decrease violation (PGD)"},
      {"admm_beta", "ADMM penalty"},
      {"admm_tol", "ADMM residual tolerance, or auto"},
      {"admm_max_iter", "ADMM iteration cap"},
      {"holdout_fraction", "validation share of observed entries"},
      {"split_seed", "seed of the holdout split"},
      {"metric", "rmse_holdout, rank1, rank2 or rank3"},
      {"replications", "bench replications"},
      {"threads", "worker threads (0: NIMC_THREADS or all cores)"},
      {"binarize_threshold", "map values >= t to 1, others to 0"},
      {"timing", "record wall-clock times"},
      {"input", "observed triplets"},
      {"truth", "dense ground truth"},
      {"test", "test triplets"},
      {"m_hat", "dense estimate (fit: output path, eval: input)"},
      {"out_dir", "output directory"},
      {"output", "report path"},
  };
  return h;
}

std::string flag_name(std::string key) {
  for (char& c : key)
    if (c == '_') c = '-';
  return "--" + key;
}

struct Bound {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config_path;
  bool no_timing = false;
};

void bind(CLI::App* sub, Bound& b) {
  for (const std::string& key : nimc::config_keys()) {
    const auto it = help_text().find(key);
    b.options[key] = sub->add_option(flag_name(key), b.values[key], it == help_text().end() ? key : it->second);
  }
  sub->add_option("--config", b.config_path, "config file ([config] section of a report)");
  sub->add_flag("--no-timing", b.no_timing, "write null for timing fields");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix completion under nonignorable missingness"};
  app.require_subcommand(1);
  const char* names[] = {"simulate", "fit", "eval", "bench"};
  const char* about[] = {"draw a simulated instance", "fit a model to observed triplets",
                         "score an estimate on test triplets", "replicated comparison of the three methods"};
  std::map<std::string, Bound> bound;
  for (int k = 0; k < 4; ++k) bind(app.add_subcommand(names[k], about[k]), bound[names[k]]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  for (int k = 0; k < 4; ++k) {
    if (!app.got_subcommand(names[k])) continue;
    Bound& b = bound[names[k]];
    nimc::RunConfig cfg;
    try {
      if (!b.config_path.empty()) cfg = nimc::load_config(b.config_path);
      for (const std::string& key : nimc::config_keys())
        if (b.options[key]->count() > 0) nimc::set_field(cfg, key, b.values[key]);
      if (b.no_timing) cfg.timing = false;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
    return nimc::run_command(names[k], cfg, std::cout, std::cerr);
  }
  return 2;
}
