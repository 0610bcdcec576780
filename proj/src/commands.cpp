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

#include "nimc/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <thread>

#include "nimc/error.hpp"
#include "nimc/io.hpp"
#include "nimc/transform.hpp"

namespace nimc {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw InvalidArgument("not a boolean: " + s);
}

double parse_real(const std::string& s) {
  try {
    return parse_number(s);
  } catch (const IoError&) {
    throw InvalidArgument("not a number: " + s);
  }
}

std::optional<double> parse_auto(const std::string& s) {
  if (s == "auto" || s == "null") return std::nullopt;
  return parse_real(s);
}

long long parse_int(const std::string& s) {
  const double v = parse_real(s);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) throw InvalidArgument("not an integer: " + s);
  return static_cast<long long>(v);
}

std::uint64_t parse_u64(const std::string& s) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    throw InvalidArgument("not an unsigned integer: " + s);
  }
  if (pos != s.size() || s.front() == '-') throw InvalidArgument("not an unsigned integer: " + s);
  return v;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(parse_real(cur));
    cur.clear();
  };
  for (char ch : s) {
    if (ch == ',' || ch == ' ' || ch == ';' || ch == '\t') flush();
    else cur += ch;
  }
  flush();
  return out;
}

std::string auto_or(std::optional<double> v) { return v ? format_number(*v) : "auto"; }

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + format_number(v[k]);
  return s;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;
using Getter = std::function<std::string(const RunConfig&)>;
struct Field {
  std::string key;
  Setter set;
  Getter get;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      {"n1", [](RunConfig& c, const std::string& v) { c.dgp.n1 = parse_int(v); },
       [](const RunConfig& c) { return std::to_string(c.dgp.n1); }},
      {"n2", [](RunConfig& c, const std::string& v) { c.dgp.n2 = parse_int(v); },
       [](const RunConfig& c) { return std::to_string(c.dgp.n2); }},
      {"rank", [](RunConfig& c, const std::string& v) { c.dgp.rank = static_cast<int>(parse_int(v)); },
       [](const RunConfig& c) { return std::to_string(c.dgp.rank); }},
      {"dgp", [](RunConfig& c, const std::string& v) { c.dgp.dgp = parse_dgp(v); },
       [](const RunConfig& c) { return to_string(c.dgp.dgp); }},
      {"seed", [](RunConfig& c, const std::string& v) { c.dgp.seed = parse_u64(v); },
       [](const RunConfig& c) { return std::to_string(c.dgp.seed); }},
      {"mnar_scale", [](RunConfig& c, const std::string& v) { c.dgp.mnar_scale = parse_real(v); },
       [](const RunConfig& c) { return format_number(c.dgp.mnar_scale); }},
      {"mnar_offset", [](RunConfig& c, const std::string& v) { c.dgp.mnar_offset = parse_auto(v); },
       [](const RunConfig& c) { return format_number(c.dgp.resolved_offset()); }},
      {"frailty_coef", [](RunConfig& c, const std::string& v) { c.dgp.frailty_coef = parse_real(v); },
       [](const RunConfig& c) { return format_number(c.dgp.frailty_coef); }},
      {"method", [](RunConfig& c, const std::string& v) { c.method = parse_method(v); },
       [](const RunConfig& c) { return to_string(c.method); }},
      {"lambda", [](RunConfig& c, const std::string& v) {
         c.lambda_grid = {parse_real(v)};
         c.lambda_relative = false;
       },
       nullptr},
      {"lambda_grid", [](RunConfig& c, const std::string& v) { c.lambda_grid = parse_list(v); },
       [](const RunConfig& c) { return join(c.resolved_grid()); }},
      {"lambda_relative", [](RunConfig& c, const std::string& v) { c.lambda_relative = parse_bool(v); },
       [](const RunConfig& c) { return std::string(c.lambda_relative ? "true" : "false"); }},
      {"alpha", [](RunConfig& c, const std::string& v) { c.solver.alpha = parse_real(v); },
       [](const RunConfig& c) { return format_number(c.solver.alpha); }},
      {"mu", [](RunConfig& c, const std::string& v) { c.solver.mu = parse_auto(v); },
       [](const RunConfig& c) { return auto_or(c.solver.mu); }},
      {"tol", [](RunConfig& c, const std::string& v) { c.solver.tol = parse_auto(v); },
       [](const RunConfig& c) { return auto_or(c.solver.tol); }},
      {"max_iter", [](RunConfig& c, const std::string& v) { c.solver.max_iter = static_cast<int>(parse_int(v)); },
       [](const RunConfig& c) { return std::to_string(c.solver.max_iter); }},
      {"check_descent", [](RunConfig& c, const std::string& v) { c.solver.check_descent = parse_bool(v); },
       [](const RunConfig& c) { return std::string(c.solver.check_descent ? "true" : "false"); }},
      {"admm_beta", [](RunConfig& c, const std::string& v) { c.solver.admm.beta = parse_real(v); },
       [](const RunConfig& c) { return format_number(c.solver.admm.beta); }},
      {"admm_tol", [](RunConfig& c, const std::string& v) { c.solver.admm.tol = parse_auto(v); },
       [](const RunConfig& c) { return auto_or(c.solver.admm.tol); }},
      {"admm_max_iter",
       [](RunConfig& c, const std::string& v) { c.solver.admm.max_iter = static_cast<int>(parse_int(v)); },
       [](const RunConfig& c) { return std::to_string(c.solver.admm.max_iter); }},
      {"holdout_fraction", [](RunConfig& c, const std::string& v) { c.holdout_fraction = parse_real(v); },
       [](const RunConfig& c) { return format_number(c.holdout_fraction); }},
      {"split_seed", [](RunConfig& c, const std::string& v) { c.split_seed = parse_u64(v); },
       [](const RunConfig& c) { return std::to_string(c.split_seed); }},
      {"metric", [](RunConfig& c, const std::string& v) { c.metric = parse_selection(v); },
       [](const RunConfig& c) { return to_string(c.metric); }},
      {"replications", [](RunConfig& c, const std::string& v) { c.replications = static_cast<int>(parse_int(v)); },
       [](const RunConfig& c) { return std::to_string(c.replications); }},
      {"threads", [](RunConfig& c, const std::string& v) { c.threads = static_cast<int>(parse_int(v)); },
       [](const RunConfig& c) { return std::to_string(c.threads); }},
      {"binarize_threshold",
       [](RunConfig& c, const std::string& v) { c.binarize_threshold = parse_auto(v); },
       [](const RunConfig& c) { return c.binarize_threshold ? format_number(*c.binarize_threshold) : "null"; }},
      {"timing", [](RunConfig& c, const std::string& v) { c.timing = parse_bool(v); },
       [](const RunConfig& c) { return std::string(c.timing ? "true" : "false"); }},
      {"input", [](RunConfig& c, const std::string& v) { c.input = v; }, [](const RunConfig& c) { return c.input; }},
      {"truth", [](RunConfig& c, const std::string& v) { c.truth = v; }, [](const RunConfig& c) { return c.truth; }},
      {"test", [](RunConfig& c, const std::string& v) { c.test = v; }, [](const RunConfig& c) { return c.test; }},
      {"m_hat", [](RunConfig& c, const std::string& v) { c.m_hat = v; }, [](const RunConfig& c) { return c.m_hat; }},
      {"out_dir", [](RunConfig& c, const std::string& v) { c.out_dir = v; },
       [](const RunConfig& c) { return c.out_dir; }},
      {"output", [](RunConfig& c, const std::string& v) { c.output = v; },
       [](const RunConfig& c) { return c.output; }},
  };
  return f;
}

Mat zeros(const ObservedData& d) { return Mat::Zero(d.rows(), d.cols()); }

std::string opt_time(const RunConfig& cfg, double t) { return cfg.timing ? format_number(t) : "null"; }

void write_trace(Report& r, const RunConfig& cfg, const FitResult& fit) {
  Section& t = r.table("trace", {"iteration", "objective", "step_norm", "admm_iters", "admm_converged",
                                 "descent_margin", "wall_time"});
  const auto& tr = fit.trace;
  for (std::size_t k = 0; k < tr.objectives.size(); ++k) {
    const bool step = k > 0 && k - 1 < tr.step_norms.size();
    const bool margin = k > 0 && k - 1 < tr.descent_margins.size();
    t.add_row({std::to_string(k), format_number(tr.objectives[k]),
               step ? format_number(tr.step_norms[k - 1]) : "null",
               step ? std::to_string(tr.admm_iters[k - 1]) : "null",
               step ? (tr.admm_converged[k - 1] ? "true" : "false") : "null",
               margin ? format_number(tr.descent_margins[k - 1]) : "null",
               step ? opt_time(cfg, tr.wall_times[k - 1]) : "null"});
  }
}

void write_fit_summary(Section& s, const FitResult& fit) {
  s.set("converged", fit.converged);
  s.set("iterations", fit.iterations);
  s.set("objective_initial", fit.trace.objectives.front());
  s.set("objective_final", fit.trace.objectives.back());
  s.set("mu", fit.mu);
  s.set("l_f", fit.l_f);
  s.set("tol", fit.tol);
  s.set("n_warnings", static_cast<long long>(fit.warnings.size()));
}

void write_warnings(Report& r, const std::vector<std::string>& warnings) {
  if (warnings.empty()) return;
  Section& s = r.section("warnings");
  for (std::size_t k = 0; k < warnings.size(); ++k) {
    std::string w = warnings[k];
    std::replace(w.begin(), w.end(), '\n', ' ');
    s.set("w" + std::to_string(k), w);
  }
}

double holdout_score(Selection metric, const Mat& m_hat, const TestSet& validation) {
  if (metric == Selection::kRmseHoldout) {
    // Centered: the U-statistic fit is only identified up to a constant.
    double mean = 0.0;
    for (const Entry& e : validation) mean += m_hat(e.row, e.col) - e.value;
    mean /= static_cast<double>(validation.size());
    double ss = 0.0;
    for (const Entry& e : validation) {
      const double d = m_hat(e.row, e.col) - e.value - mean;
      ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(validation.size()));
  }
  const RankMetrics r = rank_metrics(m_hat, validation);
  return metric == Selection::kRank1 ? r.rank1 : metric == Selection::kRank2 ? r.rank2 : r.rank3;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir);
}

std::string report_path(const RunConfig& cfg, const std::string& fallback) {
  if (!cfg.output.empty()) return cfg.output;
  ensure_dir(cfg.out_dir);
  return out_path(cfg, fallback);
}

ObservedData load_input(const RunConfig& cfg) {
  if (cfg.input.empty()) throw InvalidArgument("--input is required");
  std::optional<Eigen::Index> n1, n2;
  if (!has_meta(cfg.input)) {
    n1 = cfg.dgp.n1;
    n2 = cfg.dgp.n2;
  }
  if (!cfg.binarize_threshold) return read_observed(cfg.input, n1, n2);
  if (!n1) {
    const Meta m = read_meta(cfg.input);
    n1 = m.n1;
    n2 = m.n2;
  }
  return ObservedData::from_entries(*n1, *n2, binarize(read_triplets(cfg.input), *cfg.binarize_threshold));
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::optional<double> sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return std::nullopt;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

template <class F>
void parallel_for(int n, int threads, F&& body) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int k = 0; k < n; ++k) body(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int k = next++; k < n; k = next++) body(k);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::kRcuPgd: return "rcu_pgd";
    case Method::kRcuFista: return "rcu_fista";
    case Method::kBaselineSq: return "baseline_sq";
  }
  return "?";
}

std::string to_string(Selection s) {
  switch (s) {
    case Selection::kRmseHoldout: return "rmse_holdout";
    case Selection::kRank1: return "rank1";
    case Selection::kRank2: return "rank2";
    case Selection::kRank3: return "rank3";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  for (Method m : {Method::kRcuPgd, Method::kRcuFista, Method::kBaselineSq})
    if (to_string(m) == s) return m;
  throw InvalidArgument("unknown method '" + s + "' (rcu_pgd, rcu_fista, baseline_sq)");
}

Selection parse_selection(const std::string& s) {
  for (Selection m : {Selection::kRmseHoldout, Selection::kRank1, Selection::kRank2, Selection::kRank3})
    if (to_string(m) == s) return m;
  throw InvalidArgument("unknown metric '" + s + "' (rmse_holdout, rank1, rank2, rank3)");
}

std::vector<double> default_lambda_fractions() {
  std::vector<double> g;
  for (int k = 0; k <= 12; ++k) g.push_back(std::pow(10.0, -k / 12.0));
  return g;
}

std::vector<double> RunConfig::resolved_grid() const {
  return lambda_grid.empty() ? default_lambda_fractions() : lambda_grid;
}

void RunConfig::validate() const {
  dgp.validate();
  solver.validate();
  for (double l : resolved_grid())
    if (!(l >= 0) || !std::isfinite(l)) throw InvalidArgument("lambda grid entries must be finite and >= 0");
  if (!(holdout_fraction > 0 && holdout_fraction < 1)) throw InvalidArgument("holdout_fraction must be in (0, 1)");
  if (replications < 1) throw InvalidArgument("replications must be >= 1");
  if (threads < 0) throw InvalidArgument("threads must be >= 0");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const Field& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void set_field(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const Field& f : fields())
    if (f.key == key) {
      f.set(cfg, value);
      return;
    }
  throw InvalidArgument("unknown config key '" + key + "'");
}

void apply_section(RunConfig& cfg, const Section& section) {
  for (const auto& [k, v] : section.values) set_field(cfg, k, v);
}

RunConfig load_config(const std::string& path) {
  const Report r = Report::load(path);
  const Section* s = r.find("config");
  if (!s) throw IoError(path + ": no [config] section");
  RunConfig cfg;
  apply_section(cfg, *s);
  return cfg;
}

void write_config(Section& section, const RunConfig& cfg) {
  for (const Field& f : fields())
    if (f.get) section.set(f.key, f.get(cfg));
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NIMC_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double lambda_max(const LossContext& ctx, Method method) {
  const Mat g = method == Method::kBaselineSq ? squared_term(ctx.data()).gradient(zeros(ctx.data()))
                                              : gradient(ctx, zeros(ctx.data()));
  return svd(g).singulars(0);
}

FitResult run_method(const LossContext& ctx, Method method, const SolverConfig& cfg, const Mat& m0) {
  switch (method) {
    case Method::kRcuPgd: return fit_pgd(ctx, cfg, m0);
    case Method::kRcuFista: return fit_fista(ctx, cfg, m0);
    case Method::kBaselineSq: return fit_baseline_sq(ctx, cfg, m0);
  }
  throw InvalidArgument("unknown method");
}

FitOutcome run_fit(const RunConfig& cfg_in, const ObservedData& data) {
  RunConfig cfg = cfg_in;
  cfg.validate();
  const std::vector<double> grid = cfg.resolved_grid();
  SolverConfig sc = cfg.solver;
  FitOutcome out;
  out.report = Report("fit");
  Report& rep = out.report;
  write_config(rep.section("config"), cfg);

  const LossContext full(data, sc.alpha);
  out.lambda_max_full = lambda_max(full, cfg.method);
  auto absolute = [&](double g, double lmax) { return cfg.lambda_relative ? g * lmax : g; };

  std::size_t chosen = 0;
  if (grid.size() > 1) {
    std::vector<Entry> obs = data.entries();
    const std::size_t n_val = static_cast<std::size_t>(std::llround(cfg.holdout_fraction * obs.size()));
    if (n_val < 1 || n_val >= obs.size())
      throw InvalidArgument("holdout split leaves an empty training or validation set");
    std::mt19937_64 gen(cfg.split_seed);
    std::shuffle(obs.begin(), obs.end(), gen);
    const TestSet validation(obs.begin(), obs.begin() + static_cast<std::ptrdiff_t>(n_val));
    const std::vector<Entry> train(obs.begin() + static_cast<std::ptrdiff_t>(n_val), obs.end());
    const LossContext tctx(ObservedData::from_entries(data.rows(), data.cols(), train), sc.alpha);
    const double lmax_train = lambda_max(tctx, cfg.method);

    Section& tab = rep.table("selection", {"grid_value", "lambda", "holdout_metric", "iterations", "converged"});
    double best = INFINITY;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      sc.lambda = absolute(grid[k], lmax_train);
      const FitResult f = run_method(tctx, cfg.method, sc, zeros(data));
      const double score = holdout_score(cfg.metric, f.m_hat, validation);
      if (score < best) {
        best = score;
        chosen = k;
      }
      tab.add_row({format_number(grid[k]), format_number(sc.lambda), format_number(score),
                   std::to_string(f.iterations), f.converged ? "true" : "false"});
    }
    Section& sel = rep.section("selection_summary");
    sel.set("metric", to_string(cfg.metric));
    sel.set("n_train", static_cast<long long>(train.size()));
    sel.set("n_validation", static_cast<long long>(n_val));
    sel.set("lambda_max_train", lmax_train);
    sel.set("best_holdout_metric", best);
  }

  out.chosen_grid_value = grid[chosen];
  out.chosen_lambda = absolute(grid[chosen], out.lambda_max_full);
  sc.lambda = out.chosen_lambda;
  out.fit = run_method(full, cfg.method, sc, zeros(data));

  Section& res = rep.section("result");
  res.set("method", to_string(cfg.method));
  res.set("n1", static_cast<long long>(data.rows()));
  res.set("n2", static_cast<long long>(data.cols()));
  res.set("n_observed", static_cast<long long>(data.observed_count()));
  res.set("chosen_grid_value", out.chosen_grid_value);
  res.set("chosen_lambda", out.chosen_lambda);
  res.set("lambda_max", out.lambda_max_full);
  write_fit_summary(res, out.fit);

  const TransformResult tr = identify_shift(out.fit.m_hat);
  Section& sh = rep.section("shift");
  sh.set("c_hat", tr.c_hat);
  sh.set("nuclear_at_c", tr.nuclear_at_c);
  sh.set("nuclear_at_zero", nuclear_norm(out.fit.m_hat));
  sh.set("bracket_lo", tr.bracket.first);
  sh.set("bracket_hi", tr.bracket.second);
  sh.set("evals", tr.evals);

  write_warnings(rep, out.fit.warnings);
  write_trace(rep, cfg, out.fit);
  return out;
}

BenchOutcome run_bench(const RunConfig& cfg_in) {
  RunConfig cfg = cfg_in;
  cfg.validate();
  const std::vector<double> grid = cfg.resolved_grid();
  const std::vector<Method> methods = {Method::kRcuPgd, Method::kRcuFista, Method::kBaselineSq};
  struct Cell {
    bool ok = false;
    std::string error;
    double grid_value = 0, lambda = 0, rmse_plain = 0, rmse_centered = 0, time = 0;
    int iterations = 0;
    bool converged = false;
  };
  const int reps = cfg.replications;
  std::vector<std::vector<Cell>> cells(reps, std::vector<Cell>(methods.size()));
  std::vector<double> fractions(reps, 0.0);

  parallel_for(reps, resolve_threads(cfg.threads), [&](int r) {
    DgpSpec spec = cfg.dgp;
    spec.seed = cfg.dgp.seed + static_cast<std::uint64_t>(r);
    std::optional<SimInstance> sim;
    try {
      sim.emplace(sample_instance(spec));
    } catch (const std::exception& e) {
      for (auto& c : cells[r]) c.error = e.what();
      return;
    }
    const SimInstance& inst = *sim;
    fractions[r] = inst.observed_fraction;
    const LossContext ctx(inst.data, cfg.solver.alpha);
    for (std::size_t m = 0; m < methods.size(); ++m) {
      Cell& cell = cells[r][m];
      try {
        const double lmax = lambda_max(ctx, methods[m]);
        SolverConfig sc = cfg.solver;
        double best = INFINITY;
        // Oracle selection against the simulated truth, identical for all methods.
        for (double g : grid) {
          sc.lambda = cfg.lambda_relative ? g * lmax : g;
          const auto t0 = Clock::now();
          const FitResult f = run_method(ctx, methods[m], sc, zeros(inst.data));
          const double dt = seconds_since(t0);
          const double rp = rmse(f.m_hat, inst.m_true, false);
          if (rp < best) {
            best = rp;
            cell = Cell{true, "", g, sc.lambda, rp, rmse(f.m_hat, inst.m_true, true), dt, f.iterations,
                        f.converged};
          }
        }
        if (!cell.ok) throw NumericalFailure("no finite rmse on the grid");
      } catch (const std::exception& e) {
        cell = Cell{};
        cell.error = e.what();
      }
    }
  });

  BenchOutcome out;
  out.report = Report("bench");
  Report& rep = out.report;
  write_config(rep.section("config"), cfg);

  Section& per = rep.table("replications", {"replication", "seed", "observed_fraction", "method", "grid_value",
                                            "lambda", "rmse_plain", "rmse_centered", "time", "iterations",
                                            "converged", "ok"});
  std::vector<std::string> errors;
  for (int r = 0; r < reps; ++r) {
    bool rep_ok = true;
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const Cell& c = cells[r][m];
      rep_ok = rep_ok && c.ok;
      if (!c.ok) errors.push_back("replication " + std::to_string(r) + " " + to_string(methods[m]) + ": " + c.error);
      auto num = [&](double v) { return c.ok ? format_number(v) : std::string("null"); };
      per.add_row({std::to_string(r), std::to_string(cfg.dgp.seed + static_cast<std::uint64_t>(r)),
                   format_number(fractions[r]), to_string(methods[m]), num(c.grid_value), num(c.lambda),
                   num(c.rmse_plain), num(c.rmse_centered), c.ok ? opt_time(cfg, c.time) : "null",
                   c.ok ? std::to_string(c.iterations) : "null", c.ok ? (c.converged ? "true" : "false") : "null",
                   c.ok ? "true" : "false"});
    }
    if (!rep_ok) ++out.failed_replications;
  }

  Section& sum = rep.table("methods", {"method", "rmse_plain_mean", "rmse_plain_sd", "rmse_centered_mean",
                                       "rmse_centered_sd", "time_mean", "time_sd", "n_ok"});
  for (std::size_t m = 0; m < methods.size(); ++m) {
    std::vector<double> rp, rc, tm;
    for (int r = 0; r < reps; ++r)
      if (cells[r][m].ok) {
        rp.push_back(cells[r][m].rmse_plain);
        rc.push_back(cells[r][m].rmse_centered);
        tm.push_back(cells[r][m].time);
      }
    MethodRow row;
    row.method = to_string(methods[m]);
    row.n_ok = static_cast<int>(rp.size());
    if (!rp.empty()) {
      row.rmse_plain_mean = mean(rp);
      row.rmse_plain_sd = sample_sd(rp);
      row.rmse_centered_mean = mean(rc);
      row.rmse_centered_sd = sample_sd(rc);
      if (cfg.timing) {
        row.time_mean = mean(tm);
        row.time_sd = sample_sd(tm);
      }
    }
    sum.add_row({row.method, format_optional(row.rmse_plain_mean), format_optional(row.rmse_plain_sd),
                 format_optional(row.rmse_centered_mean), format_optional(row.rmse_centered_sd),
                 format_optional(row.time_mean), format_optional(row.time_sd), std::to_string(row.n_ok)});
    out.methods.push_back(row);
  }

  Section& res = rep.section("result");
  res.set("replications", reps);
  res.set("failed_replications", out.failed_replications);
  if (!errors.empty()) {
    Section& es = rep.section("errors");
    for (std::size_t k = 0; k < errors.size(); ++k) {
      std::string e = errors[k];
      std::replace(e.begin(), e.end(), '\n', ' ');
      std::replace(e.begin(), e.end(), ',', ';');
      es.set("e" + std::to_string(k), e);
    }
  }
  return out;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  cfg.dgp.validate();
  ensure_dir(cfg.out_dir);
  const SimInstance inst = sample_instance(cfg.dgp);
  write_dense(out_path(cfg, "truth.csv"), inst.m_true);
  write_dense(out_path(cfg, "x_full.csv"), inst.x_full);
  write_dense(out_path(cfg, "mask.csv"), inst.data.mask().as_real());
  write_observed(out_path(cfg, "observed.csv"), inst.data);
  std::vector<Entry> test;
  for (Eigen::Index j = 0; j < inst.x_full.cols(); ++j)
    for (Eigen::Index i = 0; i < inst.x_full.rows(); ++i)
      if (!inst.data.mask()(i, j)) test.push_back({i, j, inst.x_full(i, j)});
  std::sort(test.begin(), test.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  write_triplets(out_path(cfg, "test.csv"), inst.x_full.rows(), inst.x_full.cols(), test);

  Report rep("simulate");
  write_config(rep.section("config"), cfg);
  Section& res = rep.section("result");
  res.set("observed_fraction", inst.observed_fraction);
  res.set("n_observed", static_cast<long long>(inst.data.observed_count()));
  res.set("n_test", static_cast<long long>(test.size()));
  rep.save(report_path(cfg, "simulate_report.txt"));
  out << "observed_fraction = " << format_number(inst.observed_fraction) << "\n";
  return 0;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ObservedData data = load_input(cfg);
  const FitOutcome fo = run_fit(cfg, data);
  const std::string rp = report_path(cfg, "fit_report.txt");
  const std::string mp = cfg.m_hat.empty() ? out_path(cfg, "m_hat.csv") : cfg.m_hat;
  write_dense(mp, fo.fit.m_hat);
  fo.report.save(rp);
  for (const auto& w : fo.fit.warnings) err << "warning: " << w << "\n";
  out << "chosen_lambda = " << format_number(fo.chosen_lambda) << "\n"
      << "converged = " << (fo.fit.converged ? "true" : "false") << "\n"
      << "objective = " << format_number(fo.fit.trace.objectives.back()) << "\n";
  return 0;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.m_hat.empty()) throw InvalidArgument("--m-hat is required");
  if (cfg.test.empty()) throw InvalidArgument("--test is required");
  const Mat m_hat = read_dense(cfg.m_hat);
  std::vector<Entry> test = read_triplets(cfg.test);
  if (cfg.binarize_threshold) test = binarize(std::move(test), *cfg.binarize_threshold);
  for (const Entry& e : test)
    if (e.row >= m_hat.rows() || e.col >= m_hat.cols()) throw InvalidArgument("test entry outside m_hat");
  std::optional<Mat> truth;
  if (!cfg.truth.empty()) truth = read_dense(cfg.truth);
  const EvalReport ev = evaluate(m_hat, truth ? &*truth : nullptr, test);

  Report rep("eval");
  write_config(rep.section("config"), cfg);
  Section& res = rep.section("result");
  res.set("rmse_plain", ev.rmse_plain);
  res.set("rmse_centered", ev.rmse_centered);
  res.set("rank1", ev.rank1);
  res.set("rank2", ev.rank2);
  res.set("rank3", ev.rank3);
  res.set("n_test", static_cast<long long>(ev.n_test));
  if (!ev.note.empty()) res.set("note", ev.note);
  rep.save(report_path(cfg, "eval_report.txt"));
  for (const auto& [k, v] : res.values) out << k << " = " << v << "\n";
  return 0;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const BenchOutcome bo = run_bench(cfg);
  bo.report.save(report_path(cfg, "bench_report.txt"));
  for (const MethodRow& m : bo.methods)
    out << m.method << ": rmse_plain " << format_optional(m.rmse_plain_mean) << " +- "
        << format_optional(m.rmse_plain_sd) << ", time " << format_optional(m.time_mean) << "\n";
  if (2 * bo.failed_replications >= cfg.replications) {
    err << bo.failed_replications << " of " << cfg.replications << " replications failed\n";
    return 3;
  }
  return 0;
}

int run_command(const std::string& name, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (name == "simulate") return cmd_simulate(cfg, out, err);
    if (name == "fit") return cmd_fit(cfg, out, err);
    if (name == "eval") return cmd_eval(cfg, out, err);
    if (name == "bench") return cmd_bench(cfg, out, err);
    err << "unknown command " << name << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const UndefinedMetric& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace nimc
