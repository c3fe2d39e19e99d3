#include "slpg/driver.hpp"

#include "slpg/geometry.hpp"
#include "slpg/tangential.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace slpg {

std::string to_string(InnerSolver s) {
  return s == InnerSolver::FixedPoint ? "FixedPoint" : "Explicit";
}

std::string to_string(NormalKind k) {
  return k == NormalKind::FirstOrder ? "FirstOrder" : "ExactPolar";
}

std::string to_string(Termination t) {
  return t == Termination::Converged ? "Converged" : "MaxIter";
}

MeritConstants certified_constants(const SmoothObjective &obj, const Regularizer &r,
                                   Eigen::Index n, Eigen::Index p) {
  MeritConstants k;
  k.lf = obj.gradient_bound(p).value_or(0.0);
  k.lfp = obj.gradient_lipschitz().value_or(0.0);
  k.lr = r.lipschitz_bound(n, p);
  return k;
}

double theoretical_stepsize(const MeritConstants &k, double c) {
  const double a = 1.0 / (6.0 * (1.0 + c) * (k.lf + k.lr + c + 1.0));
  const double b = 1.0 / (2.0 * k.lfp + 8.0 * (k.lf + k.lr) + 3.0);
  return std::min(a, b);
}

void SolveOptions::validate() const {
  if (!(tol > 0.0))
    throw ParameterError("SolveOptions: tol must be positive");
  if (max_iter < 1)
    throw ParameterError("SolveOptions: max_iter must be at least 1");
  if (inner_cap < 1)
    throw ParameterError("SolveOptions: inner_cap must be at least 1");
  if (!(c > 0.0))
    throw ParameterError("SolveOptions: c must be positive");
  if (!(eta_min > 0.0) || !(eta_min < eta_max) || !std::isfinite(eta_max))
    throw ParameterError("SolveOptions: need 0 < eta_min < eta_max < inf");
  if (eta0 && !(*eta0 > 0.0))
    throw ParameterError("SolveOptions: eta0 must be positive");
  if (fixed_eta && !(*fixed_eta > 0.0))
    throw ParameterError("SolveOptions: fixed_eta must be positive");
}

Matrix projected_gradient(const Matrix &x, const Matrix &grad) {
  require_same_shape(x, grad, "projected_gradient");
  return grad - x * sym(x.transpose() * grad);
}

double bb_stepsize(const Matrix &x_k, const Matrix &x_prev, const Matrix &grad_k,
                   const Matrix &grad_prev, const StepClamp &clamp, double fallback) {
  const Matrix s = x_k - x_prev;
  const Matrix v = projected_gradient(x_k, grad_k) - projected_gradient(x_prev, grad_prev);
  const double vv = inner(v, v);
  const double sv = inner(s, v);
  if (!(vv > 1e-30) || !(sv > 0.0))
    return fallback;
  return std::clamp(sv / vv, clamp.eta_min, clamp.eta_max);
}

double merit(const SmoothObjective &obj, const Regularizer &r, const MeritConstants &k,
             const Matrix &x) {
  return obj.value(x) + r.value(x) + (2.0 * k.lf + 2.0 * k.lr + 1.5) * feasibility_fro(x);
}

double substationarity(const Matrix &y, const Matrix &x, double eta) {
  if (!(eta > 0.0))
    throw ParameterError("substationarity: eta must be positive");
  require_same_shape(y, x, "substationarity");
  return (y - x).norm() / eta;
}

double smooth_stationarity_residual(const SmoothObjective &obj, const Regularizer &r,
                                    const Matrix &x) {
  const Matrix g = obj.gradient(x);
  std::optional<Matrix> corr = r.multiplier_correction(x);
  std::optional<Matrix> w = r.canonical_subgradient(x);
  if (!corr || !w)
    throw UnsupportedError("smooth_stationarity_residual: no closed-form multiplier for " +
                           to_string(r.kind()));
  const Matrix lambda = sym(x.transpose() * g) + *corr;
  return (g + *w - x * lambda).norm();
}

namespace {

bool record_finite(const IterRecord &rec) {
  return std::isfinite(rec.eta) && std::isfinite(rec.fval) && std::isfinite(rec.rval) &&
         std::isfinite(rec.merit) && std::isfinite(rec.substationarity) &&
         std::isfinite(rec.feasibility) && std::isfinite(rec.ts_feasibility);
}

} // namespace

SolveResult slpg_solve(const SmoothObjective &obj, const Regularizer &r, const Matrix &x0,
                       const SolveOptions &opts, IterationObserver *observer) {
  opts.validate();
  require_finite(x0, "slpg_solve");
  if (x0.cols() < 1 || x0.rows() < x0.cols())
    throw DimensionError("slpg_solve: X0 must be n x p with n >= p >= 1");
  if (x0.rows() != obj.dim())
    throw DimensionError("slpg_solve: X0 has " + std::to_string(x0.rows()) +
                         " rows, objective expects " + std::to_string(obj.dim()));
  if (opts.inner_solver == InnerSolver::Explicit && !r.multiplier_correction(x0))
    throw UnsupportedError("slpg_solve: the explicit inner solver does not support " +
                           to_string(r.kind()));

  const MeritConstants consts =
      opts.merit_constants.value_or(certified_constants(obj, r, x0.rows(), x0.cols()));
  const StepClamp clamp{opts.eta_min, opts.eta_max};
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();

  SolveResult result;
  Matrix x = x0;
  SmoothEval fe = obj.eval(x);
  Matrix x_prev;
  Matrix g_prev;
  std::optional<MultiplierState> warm;

  double eta = 0.0;
  if (opts.fixed_eta) {
    eta = *opts.fixed_eta;
  } else if (opts.eta0) {
    eta = std::clamp(*opts.eta0, clamp.eta_min, clamp.eta_max);
  } else {
    const double pg = projected_gradient(x, fe.grad).norm();
    eta = std::clamp(1.0 / std::max(1.0, pg), clamp.eta_min, clamp.eta_max);
  }

  for (int k = 0;; ++k) {
    if (k > 0 && !opts.fixed_eta)
      eta = bb_stepsize(x, x_prev, fe.grad, g_prev, clamp, eta);

    TangentialResult tr;
    if (opts.inner_solver == InnerSolver::FixedPoint) {
      tr = solve_fixed_point(r, x, fe.grad, eta, opts.c, opts.inner_cap, warm);
      warm = tr.lambda;
    } else {
      tr = solve_explicit(r, x, fe.grad, eta, opts.c);
    }

    IterRecord rec;
    rec.k = k;
    rec.eta = eta;
    rec.fval = fe.value;
    rec.rval = r.value(x);
    rec.feasibility = feasibility_fro(x);
    rec.merit = rec.fval + rec.rval + (2.0 * consts.lf + 2.0 * consts.lr + 1.5) * rec.feasibility;
    rec.substationarity = (tr.y - x).norm() / eta;
    rec.ts_feasibility = tr.ts_feasibility;
    rec.inner_iters = tr.inner_iters;
    rec.condition_met = tr.condition_met;
    rec.elapsed_s = std::chrono::duration<double>(clock::now() - t0).count();
    if (!record_finite(rec) || !tr.y.allFinite()) {
      result.trace.push_back(rec);
      throw NumericalFailure("slpg_solve: non-finite value at iteration " + std::to_string(k),
                             std::move(result.trace));
    }
    result.trace.push_back(rec);
    if (observer)
      observer->on_iteration(rec, x, tr.y);

    if (rec.substationarity <= opts.tol) {
      result.terminated = Termination::Converged;
      break;
    }
    if (k >= opts.max_iter) {
      result.terminated = Termination::MaxIter;
      break;
    }

    Matrix x_next =
        opts.normal_kind == NormalKind::FirstOrder ? normal_step(tr.y) : polar_project(tr.y);
    x_prev = std::move(x);
    g_prev = std::move(fe.grad);
    x = std::move(x_next);
    fe = obj.eval(x);
    if (!x.allFinite() || !std::isfinite(fe.value) || !fe.grad.allFinite())
      throw NumericalFailure("slpg_solve: non-finite iterate after iteration " +
                                 std::to_string(k),
                             std::move(result.trace));
  }

  result.fval_before_post = fe.value;
  result.rval_before_post = r.value(x);
  result.feasibility_before_post = feasibility_fro(x);
  if (opts.post_process) {
    x = polar_project(x);
    result.post_processed = true;
    result.fval_after_post = obj.value(x);
    result.rval_after_post = r.value(x);
    result.feasibility_after_post = feasibility_fro(x);
  } else {
    result.fval_after_post = result.fval_before_post;
    result.rval_after_post = result.rval_before_post;
    result.feasibility_after_post = result.feasibility_before_post;
  }
  result.x_final = std::move(x);
  return result;
}

} // namespace slpg
