#include "slpg/bench.hpp"
#include "slpg/driver.hpp"
#include "slpg/geometry.hpp"
#include "slpg/oracles.hpp"
#include "slpg/problems.hpp"
#include "slpg/tangential.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace slpg;

namespace {

py::tuple run_command(int code, const std::ostringstream &out, const std::ostringstream &err) {
  return py::make_tuple(code, out.str(), err.str());
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sequential linearized proximal gradient solver for f(X) + r(X) s.t. X^T X = I";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", error.ptr());
  py::register_exception<ParameterError>(m, "ParameterError", error.ptr());
  py::register_exception<SingularityError>(m, "SingularityError", error.ptr());
  py::register_exception<UnsupportedError>(m, "UnsupportedError", error.ptr());
  py::register_exception<NonFiniteError>(m, "NonFiniteError", error.ptr());
  py::register_exception<NumericalFailure>(m, "NumericalFailure", error.ptr());
  py::register_exception<bench::ConfigError>(m, "ConfigError", error.ptr());

  // geometry
  py::class_<FeasibilityReport>(m, "FeasibilityReport")
      .def_readonly("fro_violation", &FeasibilityReport::fro_violation)
      .def_readonly("spectral_violation", &FeasibilityReport::spectral_violation)
      .def("__repr__", [](const FeasibilityReport &r) {
        return "FeasibilityReport(fro=" + bench::format_real(r.fro_violation) +
               ", spectral=" + bench::format_real(r.spectral_violation) + ")";
      });
  m.def("sym", &sym, py::arg("m"));
  m.def("feasibility", &feasibility, py::arg("x"));
  m.def("normal_step", &normal_step, py::arg("y"));
  m.def("polar_project", &polar_project, py::arg("x"));

  // oracles
  py::class_<SmoothObjective, std::shared_ptr<SmoothObjective>>(m, "SmoothObjective")
      .def("value", &SmoothObjective::value)
      .def("gradient", &SmoothObjective::gradient);
  py::class_<QuadraticTraceObjective, SmoothObjective, std::shared_ptr<QuadraticTraceObjective>>(
      m, "QuadraticTraceObjective")
      .def(py::init<Matrix>(), py::arg("L"))
      .def_property_readonly("covariance", &QuadraticTraceObjective::covariance)
      .def_property_readonly("spectral_norm", &QuadraticTraceObjective::spectral_norm);

  py::class_<Regularizer, std::shared_ptr<Regularizer>>(m, "Regularizer")
      .def("value", &Regularizer::value)
      .def_property_readonly("kind", [](const Regularizer &r) { return to_string(r.kind()); });
  py::class_<ZeroRegularizer, Regularizer, std::shared_ptr<ZeroRegularizer>>(m, "ZeroRegularizer")
      .def(py::init<>());
  py::class_<EntrywiseL1, Regularizer, std::shared_ptr<EntrywiseL1>>(m, "EntrywiseL1")
      .def(py::init<double>(), py::arg("gamma"))
      .def_property_readonly("gamma", &EntrywiseL1::gamma);
  py::class_<RowwiseL21, Regularizer, std::shared_ptr<RowwiseL21>>(m, "RowwiseL21")
      .def(py::init<Vector>(), py::arg("gamma"))
      .def_property_readonly("gamma", &RowwiseL21::gamma);

  m.def(
      "smooth_eval",
      [](const SmoothObjective &obj, const Matrix &x) {
        SmoothEval e = smooth_eval(obj, x);
        return py::make_tuple(e.value, e.grad);
      },
      py::arg("obj"), py::arg("x"));
  m.def("reg_value", &reg_value, py::arg("r"), py::arg("x"));
  m.def("prox", &prox, py::arg("r"), py::arg("g"), py::arg("x"), py::arg("eta"));
  m.def("tangential_objective", &tangential_objective, py::arg("obj"), py::arg("r"),
        py::arg("x"), py::arg("eta"), py::arg("d"));

  // tangential
  py::class_<TangentialResult>(m, "TangentialResult")
      .def_readonly("y", &TangentialResult::y)
      .def_property_readonly("lam",
                             [](const TangentialResult &t) { return t.lambda.lambda(); })
      .def_readonly("inner_iters", &TangentialResult::inner_iters)
      .def_readonly("ts_feasibility", &TangentialResult::ts_feasibility)
      .def_readonly("condition_met", &TangentialResult::condition_met);
  m.def(
      "multiplier_residual",
      [](const SmoothObjective &obj, const Regularizer &r, const Matrix &x, double eta,
         const Matrix &lam) {
        ResidualEval ev = multiplier_residual(obj, r, x, eta, MultiplierState(lam));
        return py::make_tuple(ev.residual, ev.d);
      },
      py::arg("obj"), py::arg("r"), py::arg("x"), py::arg("eta"), py::arg("lam"));
  m.def(
      "solve_fixed_point",
      [](const SmoothObjective &obj, const Regularizer &r, const Matrix &x, double eta, double c,
         int max_inner, std::optional<Matrix> warm) {
        std::optional<MultiplierState> w;
        if (warm)
          w = MultiplierState(*warm);
        return solve_fixed_point(obj, r, x, eta, c, max_inner, w);
      },
      py::arg("obj"), py::arg("r"), py::arg("x"), py::arg("eta"), py::arg("c") = 1000.0,
      py::arg("max_inner") = 10, py::arg("warm") = py::none());
  m.def(
      "explicit_multiplier",
      [](const SmoothObjective &obj, const Regularizer &r, const Matrix &x) {
        return explicit_multiplier(obj, r, x).lambda();
      },
      py::arg("obj"), py::arg("r"), py::arg("x"));
  m.def("solve_explicit",
        py::overload_cast<const SmoothObjective &, const Regularizer &, const Matrix &, double,
                          double>(&solve_explicit),
        py::arg("obj"), py::arg("r"), py::arg("x"), py::arg("eta"), py::arg("c") = 1000.0);
  m.def("ts_feasibility", &ts_feasibility, py::arg("y"), py::arg("x"));

  // driver
  py::enum_<InnerSolver>(m, "InnerSolver")
      .value("FixedPoint", InnerSolver::FixedPoint)
      .value("Explicit", InnerSolver::Explicit);
  py::enum_<NormalKind>(m, "NormalKind")
      .value("FirstOrder", NormalKind::FirstOrder)
      .value("ExactPolar", NormalKind::ExactPolar);
  py::enum_<Termination>(m, "Termination")
      .value("Converged", Termination::Converged)
      .value("MaxIter", Termination::MaxIter);

  py::class_<MeritConstants>(m, "MeritConstants")
      .def(py::init<>())
      .def(py::init([](double lf, double lfp, double lr) { return MeritConstants{lf, lfp, lr}; }),
           py::arg("lf"), py::arg("lfp"), py::arg("lr"))
      .def_readwrite("lf", &MeritConstants::lf)
      .def_readwrite("lfp", &MeritConstants::lfp)
      .def_readwrite("lr", &MeritConstants::lr);

  py::class_<SolveOptions>(m, "SolveOptions")
      .def(py::init<>())
      .def_readwrite("tol", &SolveOptions::tol)
      .def_readwrite("max_iter", &SolveOptions::max_iter)
      .def_readwrite("inner_cap", &SolveOptions::inner_cap)
      .def_readwrite("c", &SolveOptions::c)
      .def_readwrite("inner_solver", &SolveOptions::inner_solver)
      .def_readwrite("normal_kind", &SolveOptions::normal_kind)
      .def_readwrite("eta0", &SolveOptions::eta0)
      .def_readwrite("eta_min", &SolveOptions::eta_min)
      .def_readwrite("eta_max", &SolveOptions::eta_max)
      .def_readwrite("post_process", &SolveOptions::post_process)
      .def_readwrite("fixed_eta", &SolveOptions::fixed_eta)
      .def_readwrite("merit_constants", &SolveOptions::merit_constants)
      .def_readwrite("seed", &SolveOptions::seed);

  py::class_<IterRecord>(m, "IterRecord")
      .def_readonly("k", &IterRecord::k)
      .def_readonly("eta", &IterRecord::eta)
      .def_readonly("fval", &IterRecord::fval)
      .def_readonly("rval", &IterRecord::rval)
      .def_readonly("merit", &IterRecord::merit)
      .def_readonly("substationarity", &IterRecord::substationarity)
      .def_readonly("feasibility", &IterRecord::feasibility)
      .def_readonly("ts_feasibility", &IterRecord::ts_feasibility)
      .def_readonly("inner_iters", &IterRecord::inner_iters)
      .def_readonly("condition_met", &IterRecord::condition_met)
      .def_readonly("elapsed_s", &IterRecord::elapsed_s);

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("x_final", &SolveResult::x_final)
      .def_readonly("terminated", &SolveResult::terminated)
      .def_readonly("trace", &SolveResult::trace)
      .def_readonly("post_processed", &SolveResult::post_processed)
      .def_readonly("fval_before_post", &SolveResult::fval_before_post)
      .def_readonly("rval_before_post", &SolveResult::rval_before_post)
      .def_readonly("fval_after_post", &SolveResult::fval_after_post)
      .def_readonly("rval_after_post", &SolveResult::rval_after_post)
      .def_readonly("feasibility_before_post", &SolveResult::feasibility_before_post)
      .def_readonly("feasibility_after_post", &SolveResult::feasibility_after_post)
      .def_property_readonly("iterations", &SolveResult::iterations);

  m.def("certified_constants", &certified_constants, py::arg("obj"), py::arg("r"), py::arg("n"),
        py::arg("p"));
  m.def("theoretical_stepsize", &theoretical_stepsize, py::arg("constants"), py::arg("c"));
  m.def("projected_gradient", &projected_gradient, py::arg("x"), py::arg("grad"));
  m.def(
      "bb_stepsize",
      [](const Matrix &xk, const Matrix &xp, const Matrix &gk, const Matrix &gp, double eta_min,
         double eta_max, double fallback) {
        return bb_stepsize(xk, xp, gk, gp, StepClamp{eta_min, eta_max}, fallback);
      },
      py::arg("x_k"), py::arg("x_prev"), py::arg("grad_k"), py::arg("grad_prev"),
      py::arg("eta_min") = 1e-10, py::arg("eta_max") = 1e3, py::arg("fallback") = 1.0);
  m.def("merit", &merit, py::arg("obj"), py::arg("r"), py::arg("constants"), py::arg("x"));
  m.def("substationarity", &substationarity, py::arg("y"), py::arg("x"), py::arg("eta"));
  m.def("smooth_stationarity_residual", &smooth_stationarity_residual, py::arg("obj"),
        py::arg("r"), py::arg("x"));
  m.def(
      "slpg_solve",
      [](const SmoothObjective &obj, const Regularizer &r, const Matrix &x0,
         const SolveOptions &opts) {
        py::gil_scoped_release release;
        return slpg_solve(obj, r, x0, opts);
      },
      py::arg("obj"), py::arg("r"), py::arg("x0"), py::arg("opts") = SolveOptions{});

  // problems
  m.def("gen_covariance", &gen_covariance, py::arg("n"), py::arg("num_samples"), py::arg("seed"));
  m.def(
      "leading_eigenvectors",
      [](const Matrix &l, Eigen::Index p) {
        EigenBasis b = leading_eigenvectors(l, p);
        return py::make_tuple(b.x, b.values, b.gap_warning);
      },
      py::arg("L"), py::arg("p"));
  m.def("random_orthonormal", &random_orthonormal, py::arg("n"), py::arg("p"), py::arg("seed"));

  py::class_<InstanceSpec>(m, "InstanceSpec")
      .def(py::init([](const std::string &kind, Eigen::Index n, Eigen::Index p,
                       Eigen::Index num_samples, std::optional<double> gamma,
                       std::optional<double> b, std::uint64_t seed, bool random_init) {
             InstanceSpec s;
             if (kind == "PCA")
               s.kind = ProblemKind::PCA;
             else if (kind == "SparsePCA")
               s.kind = ProblemKind::SparsePCA;
             else if (kind == "L21PCA")
               s.kind = ProblemKind::L21PCA;
             else
               throw ParameterError("InstanceSpec: unknown kind '" + kind + "'");
             s.n = n;
             s.p = p;
             s.num_samples = num_samples;
             if (gamma && b)
               throw ParameterError("InstanceSpec: give gamma or b, not both");
             if (b) {
               s.gamma_rule.kind = GammaRule::Kind::BSqrt;
               s.gamma_rule.value = *b;
             } else if (gamma) {
               s.gamma_rule.value = *gamma;
             }
             s.seed = seed;
             s.init = random_init ? InitKind::RandomOrthonormal : InitKind::LeadingEigenvectors;
             s.validate();
             return s;
           }),
           py::arg("kind") = "SparsePCA", py::arg("n") = 100, py::arg("p") = 4,
           py::arg("num_samples") = 200, py::arg("gamma") = py::none(), py::arg("b") = py::none(),
           py::arg("seed") = 0, py::arg("random_init") = false)
      .def_readonly("n", &InstanceSpec::n)
      .def_readonly("p", &InstanceSpec::p)
      .def_readonly("seed", &InstanceSpec::seed);

  py::class_<GeneratedInstance>(m, "GeneratedInstance")
      .def_readonly("L", &GeneratedInstance::l)
      .def_readonly("x0", &GeneratedInstance::x0)
      .def_readonly("gamma", &GeneratedInstance::gamma)
      .def_readonly("eigengap_warning", &GeneratedInstance::eigengap_warning)
      .def_property_readonly("objective",
                             [](const GeneratedInstance &g) {
                               return std::const_pointer_cast<QuadraticTraceObjective>(
                                   g.objective);
                             })
      .def_property_readonly("regularizer", [](const GeneratedInstance &g) {
        return std::const_pointer_cast<Regularizer>(g.regularizer);
      });
  m.def("make_instance", &make_instance, py::arg("spec"));

  // bench
  m.def(
      "parse_config",
      [](const std::string &text) { return bench::to_json(bench::parse_config(text)).dump(); },
      py::arg("text"), "Validate a run configuration and return its normalized JSON text.");
  m.def("trace_csv", &bench::trace_csv, py::arg("trace"));
  m.def(
      "cmd_solve",
      [](const std::string &path) {
        std::ostringstream out, err;
        const int code = bench::cmd_solve(path, out, err);
        return run_command(code, out, err);
      },
      py::arg("config_path"), "Returns (exit_code, stdout, stderr).");
  m.def(
      "cmd_compare",
      [](const std::string &path) {
        std::ostringstream out, err;
        const int code = bench::cmd_compare(path, out, err);
        return run_command(code, out, err);
      },
      py::arg("config_path"));
  m.def(
      "cmd_multistart",
      [](const std::string &path, int runs, int threads) {
        std::ostringstream out, err;
        const int code = bench::cmd_multistart(path, runs, out, err, threads);
        return run_command(code, out, err);
      },
      py::arg("config_path"), py::arg("runs"), py::arg("threads") = 1);
}
