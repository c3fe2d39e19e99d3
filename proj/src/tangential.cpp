#include "slpg/tangential.hpp"

#include "slpg/errors.hpp"
#include "slpg/geometry.hpp"

#include <algorithm>
#include <string>

namespace slpg {

MultiplierState::MultiplierState(const Matrix &lambda) : lambda_(sym(lambda)) {}

MultiplierState MultiplierState::zero(Eigen::Index p) {
  MultiplierState s;
  s.lambda_ = Matrix::Zero(p, p);
  return s;
}

double InexactnessRule::threshold(double eta, double feasibility) const {
  return std::max(c * eta * feasibility, abs_floor);
}

double ts_feasibility(const Matrix &y, const Matrix &x) {
  require_same_shape(y, x, "ts_feasibility");
  return sym(x.transpose() * (y - x)).norm();
}

ResidualEval multiplier_residual(const Regularizer &r, const Matrix &x, const Matrix &grad,
                                 double eta, const MultiplierState &lambda) {
  if (lambda.size() != x.cols())
    throw DimensionError("multiplier_residual: multiplier is " +
                         std::to_string(lambda.size()) + "x" + std::to_string(lambda.size()) +
                         ", expected p = " + std::to_string(x.cols()));
  ResidualEval out;
  out.d = prox(r, grad - x * lambda.lambda(), x, eta);
  out.residual = sym((out.d - x).transpose() * x);
  return out;
}

ResidualEval multiplier_residual(const SmoothObjective &obj, const Regularizer &r,
                                 const Matrix &x, double eta, const MultiplierState &lambda) {
  return multiplier_residual(r, x, obj.gradient(x), eta, lambda);
}

double default_abs_floor(const Matrix &grad) { return 1e-12 * (1.0 + grad.norm()); }

TangentialResult solve_fixed_point(const Regularizer &r, const Matrix &x, const Matrix &grad,
                                   double eta, double c, int max_inner,
                                   const std::optional<MultiplierState> &warm) {
  if (!(c > 0.0))
    throw ParameterError("solve_fixed_point: c must be positive");
  if (max_inner < 1)
    throw ParameterError("solve_fixed_point: max_inner must be at least 1");
  const Eigen::Index p = x.cols();
  MultiplierState lambda = warm ? *warm : MultiplierState::zero(p);
  if (lambda.size() != p)
    lambda = MultiplierState::zero(p);

  const InexactnessRule rule{c, default_abs_floor(grad)};
  const double thr = rule.threshold(eta, feasibility_fro(x));

  // At least one multiplier update per call: the returned point is always the
  // prox at a refreshed multiplier, never the bare warm start.
  ResidualEval ev = multiplier_residual(r, x, grad, eta, lambda);
  TangentialResult res;
  for (int j = 1; j <= max_inner; ++j) {
    lambda = MultiplierState(lambda.lambda() - ev.residual / eta);
    ev = multiplier_residual(r, x, grad, eta, lambda);
    res.inner_iters = j;
    res.ts_feasibility = ev.residual.norm();
    res.condition_met = res.ts_feasibility <= thr;
    if (res.condition_met)
      break;
  }
  res.y = std::move(ev.d);
  res.lambda = std::move(lambda);
  return res;
}

TangentialResult solve_fixed_point(const SmoothObjective &obj, const Regularizer &r,
                                   const Matrix &x, double eta, double c, int max_inner,
                                   const std::optional<MultiplierState> &warm) {
  return solve_fixed_point(r, x, obj.gradient(x), eta, c, max_inner, warm);
}

MultiplierState explicit_multiplier(const Regularizer &r, const Matrix &x, const Matrix &grad) {
  require_same_shape(x, grad, "explicit_multiplier");
  std::optional<Matrix> corr = r.multiplier_correction(x);
  if (!corr)
    throw UnsupportedError("explicit_multiplier: no closed-form multiplier for regularizer " +
                           to_string(r.kind()));
  return MultiplierState(x.transpose() * grad + *corr);
}

MultiplierState explicit_multiplier(const SmoothObjective &obj, const Regularizer &r,
                                    const Matrix &x) {
  return explicit_multiplier(r, x, obj.gradient(x));
}

TangentialResult solve_explicit(const Regularizer &r, const Matrix &x, const Matrix &grad,
                                double eta, double c) {
  MultiplierState lambda = explicit_multiplier(r, x, grad);
  ResidualEval ev = multiplier_residual(r, x, grad, eta, lambda);
  const InexactnessRule rule{c, default_abs_floor(grad)};
  TangentialResult res;
  res.y = std::move(ev.d);
  res.lambda = std::move(lambda);
  res.inner_iters = 1;
  res.ts_feasibility = ev.residual.norm();
  res.condition_met = res.ts_feasibility <= rule.threshold(eta, feasibility_fro(x));
  return res;
}

TangentialResult solve_explicit(const SmoothObjective &obj, const Regularizer &r,
                                const Matrix &x, double eta, double c) {
  return solve_explicit(r, x, obj.gradient(x), eta, c);
}

} // namespace slpg
