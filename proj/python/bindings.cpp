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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nimc/commands.hpp"
#include "nimc/error.hpp"
#include "nimc/eval.hpp"
#include "nimc/loss.hpp"
#include "nimc/prox.hpp"
#include "nimc/sim.hpp"
#include "nimc/solver.hpp"
#include "nimc/transform.hpp"

namespace py = pybind11;
using namespace nimc;

namespace {

ObservedData make_data(const Mat& values, const Mat& mask) {
  return ObservedData(values, Mask::from_real(mask));
}

SolverConfig solver_config(double lambda, double alpha, std::optional<double> mu, std::optional<double> tol,
                           int max_iter, bool accelerate, bool check_descent) {
  SolverConfig c;
  c.lambda = lambda;
  c.alpha = alpha;
  c.mu = mu;
  c.tol = tol;
  c.max_iter = max_iter;
  c.accelerate = accelerate;
  c.check_descent = check_descent;
  return c;
}

py::dict fit_dict(const FitResult& f) {
  py::dict d;
  d["m_hat"] = f.m_hat;
  d["converged"] = f.converged;
  d["iterations"] = f.iterations;
  d["objectives"] = f.trace.objectives;
  d["step_norms"] = f.trace.step_norms;
  d["descent_margins"] = f.trace.descent_margins;
  d["mu"] = f.mu;
  d["l_f"] = f.l_f;
  d["tol"] = f.tol;
  d["warnings"] = f.warnings;
  return d;
}

// Owns the data so the solver's reference into it stays valid.
class Problem {
 public:
  Problem(const Mat& values, const Mat& mask, double alpha) : ctx_(make_data(values, mask), alpha) {}

  double loss(const Mat& m) const { return nimc::loss(ctx_, m); }
  Mat gradient(const Mat& m) const { return nimc::gradient(ctx_, m); }
  double seminorm_sq(const Mat& d) const { return sample_seminorm_sq(ctx_, d); }
  double objective(const Mat& m, double lambda) const { return nimc::objective(ctx_, m, lambda); }
  py::dict lipschitz(double lo, double hi) const {
    const LipschitzInfo l = nimc::lipschitz(ctx_, lo, hi);
    py::dict d;
    d["l_x"] = l.l_x;
    d["l_w"] = l.l_w;
    d["l_f"] = l.l_f;
    return d;
  }
  double lambda_max(const std::string& method) const { return nimc::lambda_max(ctx_, parse_method(method)); }
  py::dict fit(const std::string& method, double lambda, std::optional<double> mu, std::optional<double> tol,
               int max_iter, bool check_descent, std::optional<Mat> m0) const {
    const Method m = parse_method(method);
    const SolverConfig c =
        solver_config(lambda, ctx_.alpha(), mu, tol, max_iter, m != Method::kRcuPgd, check_descent);
    const Mat start = m0 ? *m0 : Mat::Zero(ctx_.rows(), ctx_.cols());
    FitResult f;
    {
      py::gil_scoped_release release;
      f = run_method(ctx_, m, c, start);
    }
    return fit_dict(f);
  }
  Eigen::Index rows() const { return ctx_.rows(); }
  Eigen::Index cols() const { return ctx_.cols(); }
  Eigen::Index observed_count() const { return ctx_.data().observed_count(); }

 private:
  LossContext ctx_;
};

TestSet to_test(const std::vector<std::tuple<Eigen::Index, Eigen::Index, double>>& t) {
  TestSet out;
  for (const auto& [i, j, x] : t) out.push_back({i, j, x});
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Low-rank matrix completion under nonignorable missingness.";

  py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_RuntimeError);
  py::register_exception<DescentViolation>(m, "DescentViolation", PyExc_RuntimeError);
  py::register_exception<UndefinedMetric>(m, "UndefinedMetric", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<Problem>(m, "Problem")
      .def(py::init<const Mat&, const Mat&, double>(), py::arg("values"), py::arg("mask"), py::arg("alpha") = 10.0)
      .def("loss", &Problem::loss, py::arg("m"))
      .def("gradient", &Problem::gradient, py::arg("m"))
      .def("seminorm_sq", &Problem::seminorm_sq, py::arg("d"))
      .def("objective", &Problem::objective, py::arg("m"), py::arg("lam"))
      .def("lipschitz", &Problem::lipschitz, py::arg("lo") = 0.0, py::arg("hi") = 1.0)
      .def("lambda_max", &Problem::lambda_max, py::arg("method") = "rcu_fista")
      .def("fit", &Problem::fit, py::arg("method") = "rcu_fista", py::arg("lam") = 0.0,
           py::arg("mu") = py::none(), py::arg("tol") = py::none(), py::arg("max_iter") = 100,
           py::arg("check_descent") = false, py::arg("m0") = py::none())
      .def_property_readonly("shape", [](const Problem& p) { return py::make_tuple(p.rows(), p.cols()); })
      .def_property_readonly("observed_count", &Problem::observed_count);

  m.def("pair_loss", &pair_loss, py::arg("x1"), py::arg("x2"), py::arg("m1"), py::arg("m2"));
  m.def("pair_weight", &pair_weight, py::arg("x1"), py::arg("x2"), py::arg("alpha"));
  m.def("shift", &shift, py::arg("m"), py::arg("c"));
  m.def("nuclear_norm", &nuclear_norm, py::arg("m"));
  m.def("svt", py::overload_cast<const Mat&, double>(&svt), py::arg("a"), py::arg("tau"));
  m.def("clip", &clip, py::arg("a"), py::arg("alpha"));
  m.def(
      "prox_nuclear_box",
      [](const Mat& a, double lambda, double alpha, double beta, int max_iter) {
        AdmmConfig c;
        c.beta = beta;
        c.max_iter = max_iter;
        const ProxResult r = prox_nuclear_box(a, lambda, alpha, c);
        py::dict d;
        d["x"] = r.x;
        d["iterations"] = r.report.iterations;
        d["converged"] = r.report.converged;
        d["fast_path"] = r.report.fast_path;
        return d;
      },
      py::arg("a"), py::arg("lam"), py::arg("alpha"), py::arg("beta") = 1.0, py::arg("max_iter") = 500);
  m.def("fista_t_sequence", &fista_t_sequence, py::arg("count"));

  m.def(
      "identify_shift",
      [](const Mat& mat, std::optional<double> tol) {
        const TransformResult r = identify_shift(mat, tol);
        py::dict d;
        d["c_hat"] = r.c_hat;
        d["transformed"] = r.transformed;
        d["nuclear_at_c"] = r.nuclear_at_c;
        d["bracket"] = r.bracket;
        d["evals"] = r.evals;
        return d;
      },
      py::arg("m"), py::arg("tol") = py::none());
  m.def("b_diagnostic", &b_diagnostic, py::arg("m_star"), py::arg("d"));

  m.def(
      "sample_instance",
      [](Eigen::Index n1, Eigen::Index n2, int rank, const std::string& dgp, std::uint64_t seed, double mnar_scale,
         std::optional<double> mnar_offset, double frailty_coef) {
        DgpSpec s;
        s.n1 = n1;
        s.n2 = n2;
        s.rank = rank;
        s.dgp = parse_dgp(dgp);
        s.seed = seed;
        s.mnar_scale = mnar_scale;
        s.mnar_offset = mnar_offset;
        s.frailty_coef = frailty_coef;
        const SimInstance inst = sample_instance(s);
        py::dict d;
        d["m_true"] = inst.m_true;
        d["x_full"] = inst.x_full;
        d["values"] = inst.data.values();
        d["mask"] = Mat(inst.data.mask().as_real());
        d["observed_fraction"] = inst.observed_fraction;
        return d;
      },
      py::arg("n1") = 100, py::arg("n2") = 100, py::arg("rank") = 3, py::arg("dgp") = "dgp1", py::arg("seed") = 0,
      py::arg("mnar_scale") = 2.0, py::arg("mnar_offset") = py::none(), py::arg("frailty_coef") = 0.1);

  m.def("rmse", &rmse, py::arg("m_hat"), py::arg("m_true"), py::arg("centered") = false);
  m.def(
      "rank_metrics",
      [](const Mat& m_hat, const std::vector<std::tuple<Eigen::Index, Eigen::Index, double>>& test) {
        const RankMetrics r = rank_metrics(m_hat, to_test(test));
        return py::make_tuple(r.rank1, r.rank2, r.rank3);
      },
      py::arg("m_hat"), py::arg("test"));
  m.def("default_lambda_fractions", &default_lambda_fractions);
}
