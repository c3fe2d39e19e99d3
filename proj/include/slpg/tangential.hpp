#pragma once

#include "slpg/oracles.hpp"
#include "slpg/types.hpp"

#include <optional>

namespace slpg {

/// Lagrange multiplier of the linear constraint sym(D^T X) = X^T X.
/// Always exactly symmetric: the constructor symmetrizes its argument.
class MultiplierState {
public:
  MultiplierState() = default;
  explicit MultiplierState(const Matrix &lambda);
  static MultiplierState zero(Eigen::Index p);

  const Matrix &lambda() const { return lambda_; }
  Eigen::Index size() const { return lambda_.rows(); }

private:
  Matrix lambda_;
};

/// E(Lambda) together with the proximal point D it was computed from.
struct ResidualEval {
  Matrix residual; ///< E(Lambda) = sym((D - X)^T X), p x p
  Matrix d;        ///< D = prox(grad f(X) - X Lambda; X, eta)
};

struct TangentialResult {
  Matrix y;
  MultiplierState lambda; ///< multiplier that produced y
  int inner_iters = 0;
  double ts_feasibility = 0.0; ///< ||sym(X^T (Y - X))||_F
  bool condition_met = false;
};

/// Inexactness test for the tangential step:
///   ts <= max(c * eta * ||X^T X - I||_F, abs_floor).
struct InexactnessRule {
  double c = 1000.0;
  double abs_floor = 0.0;

  double threshold(double eta, double feasibility) const;
};

/// ||sym(X^T (Y - X))||_F.
double ts_feasibility(const Matrix &y, const Matrix &x);

/// E(Lambda) = sym((prox(grad - X Lambda; X, eta) - X)^T X) with grad = grad f(X).
ResidualEval multiplier_residual(const Regularizer &r, const Matrix &x, const Matrix &grad,
                                 double eta, const MultiplierState &lambda);
ResidualEval multiplier_residual(const SmoothObjective &obj, const Regularizer &r,
                                 const Matrix &x, double eta, const MultiplierState &lambda);

/// Absolute floor added to the inexactness test: 1e-12 (1 + ||grad f(X)||_F).
double default_abs_floor(const Matrix &grad);

/// Fixed-point (Arrow-Hurwicz) iteration on the multiplier,
///   Lambda_{j+1} = Lambda_j - E(Lambda_j) / eta,
/// started from `warm` (zero if absent). Performs at least one and at most
/// `max_inner` updates, stopping at the first updated multiplier whose
/// proximal point passes the inexactness test. inner_iters counts updates;
/// the returned y is the proximal point of the returned multiplier.
TangentialResult solve_fixed_point(const Regularizer &r, const Matrix &x, const Matrix &grad,
                                   double eta, double c, int max_inner,
                                   const std::optional<MultiplierState> &warm = std::nullopt);
TangentialResult solve_fixed_point(const SmoothObjective &obj, const Regularizer &r,
                                   const Matrix &x, double eta, double c, int max_inner,
                                   const std::optional<MultiplierState> &warm = std::nullopt);

/// Closed-form multiplier sym(X^T grad) (+ sum_i gamma_i S(X_i.) for l2,1).
/// Throws UnsupportedError for regularizers without a closed form.
MultiplierState explicit_multiplier(const Regularizer &r, const Matrix &x, const Matrix &grad);
MultiplierState explicit_multiplier(const SmoothObjective &obj, const Regularizer &r,
                                    const Matrix &x);

/// One proximal evaluation at the closed-form multiplier. The inexactness
/// test is evaluated a posteriori and reported in condition_met.
TangentialResult solve_explicit(const Regularizer &r, const Matrix &x, const Matrix &grad,
                                double eta, double c = 1000.0);
TangentialResult solve_explicit(const SmoothObjective &obj, const Regularizer &r,
                                const Matrix &x, double eta, double c = 1000.0);

} // namespace slpg
