#pragma once

#include "slpg/types.hpp"

#include <memory>
#include <optional>
#include <string>

namespace slpg {

/// Value and gradient of the smooth part f.
struct SmoothEval {
  double value = 0.0;
  Matrix grad;
};

/// Smooth part f of the composite objective f(X) + r(X).
class SmoothObjective {
public:
  virtual ~SmoothObjective() = default;

  virtual Eigen::Index dim() const = 0;
  virtual SmoothEval eval(const Matrix &x) const = 0;

  double value(const Matrix &x) const { return eval(x).value; }
  Matrix gradient(const Matrix &x) const { return eval(x).grad; }

  /// Upper bound on sup ||grad f(X)||_F over {X : ||X^T X - I||_F <= 1/2},
  /// if the objective can certify one.
  virtual std::optional<double> gradient_bound(Eigen::Index p) const {
    (void)p;
    return std::nullopt;
  }
  /// Upper bound on the Lipschitz constant of grad f over the same region.
  virtual std::optional<double> gradient_lipschitz() const { return std::nullopt; }
};

/// f(X) = -(1/2) tr(X^T L X) with L symmetric positive semidefinite.
class QuadraticTraceObjective final : public SmoothObjective {
public:
  /// Throws ParameterError if L is not square, not symmetric to 1e-12
  /// relative tolerance, or has an eigenvalue below -1e-12 ||L||_2.
  explicit QuadraticTraceObjective(Matrix l);

  const Matrix &covariance() const { return l_; }
  double spectral_norm() const { return norm2_; }

  Eigen::Index dim() const override { return l_.rows(); }
  SmoothEval eval(const Matrix &x) const override;
  std::optional<double> gradient_bound(Eigen::Index p) const override;
  std::optional<double> gradient_lipschitz() const override { return norm2_; }

private:
  Matrix l_;
  double norm2_ = 0.0;
};

enum class RegularizerKind { Zero, EntrywiseL1, RowwiseL21 };

std::string to_string(RegularizerKind kind);

/// Convex nonsmooth term r with a closed-form proximal map
///   prox(G; X, eta) = argmin_D <G, D> + r(D) + ||D - X||_F^2 / (2 eta).
/// New regularizers must supply both value() and prox().
class Regularizer {
public:
  virtual ~Regularizer() = default;

  virtual RegularizerKind kind() const = 0;
  virtual double value(const Matrix &x) const = 0;
  virtual Matrix prox(const Matrix &g, const Matrix &x, double eta) const = 0;

  /// Lipschitz constant of r with respect to ||.||_F on n x p matrices.
  virtual double lipschitz_bound(Eigen::Index n, Eigen::Index p) const = 0;

  /// Sum_i gamma_i S(X_i.) style correction to the smooth multiplier, when
  /// the multiplier has a closed form at stationary points. nullopt otherwise.
  virtual std::optional<Matrix> multiplier_correction(const Matrix &x) const {
    (void)x;
    return std::nullopt;
  }
  /// A canonical subgradient W in the subdifferential of r at X, when one is
  /// single-valued away from zero rows. nullopt otherwise.
  virtual std::optional<Matrix> canonical_subgradient(const Matrix &x) const {
    (void)x;
    return std::nullopt;
  }
};

class ZeroRegularizer final : public Regularizer {
public:
  RegularizerKind kind() const override { return RegularizerKind::Zero; }
  double value(const Matrix &x) const override;
  Matrix prox(const Matrix &g, const Matrix &x, double eta) const override;
  double lipschitz_bound(Eigen::Index, Eigen::Index) const override { return 0.0; }
  std::optional<Matrix> multiplier_correction(const Matrix &x) const override;
  std::optional<Matrix> canonical_subgradient(const Matrix &x) const override;
};

/// gamma * sum_ij |X_ij|.
class EntrywiseL1 final : public Regularizer {
public:
  explicit EntrywiseL1(double gamma);
  double gamma() const { return gamma_; }

  RegularizerKind kind() const override { return RegularizerKind::EntrywiseL1; }
  double value(const Matrix &x) const override;
  Matrix prox(const Matrix &g, const Matrix &x, double eta) const override;
  double lipschitz_bound(Eigen::Index n, Eigen::Index p) const override;

private:
  double gamma_;
};

/// sum_i gamma_i ||X_i.||_2 (row sparsity).
class RowwiseL21 final : public Regularizer {
public:
  explicit RowwiseL21(Vector gamma);
  const Vector &gamma() const { return gamma_; }

  RegularizerKind kind() const override { return RegularizerKind::RowwiseL21; }
  double value(const Matrix &x) const override;
  Matrix prox(const Matrix &g, const Matrix &x, double eta) const override;
  double lipschitz_bound(Eigen::Index n, Eigen::Index p) const override;
  std::optional<Matrix> multiplier_correction(const Matrix &x) const override;
  std::optional<Matrix> canonical_subgradient(const Matrix &x) const override;

private:
  void check_rows(const Matrix &x, const char *what) const;
  Vector gamma_;
};

/// sign(t) max(|t| - tau, 0).
double soft_threshold(double t, double tau);

SmoothEval smooth_eval(const SmoothObjective &obj, const Matrix &x);
double reg_value(const Regularizer &r, const Matrix &x);
/// Throws ParameterError for eta <= 0 and DimensionError on shape mismatch.
Matrix prox(const Regularizer &r, const Matrix &g, const Matrix &x, double eta);

/// <grad f(X), D> + r(D) + ||D - X||_F^2 / (2 eta), the model minimized by
/// the tangential step.
double tangential_objective(const SmoothObjective &obj, const Regularizer &r, const Matrix &x,
                            double eta, const Matrix &d);

using ObjectivePtr = std::shared_ptr<const SmoothObjective>;
using RegularizerPtr = std::shared_ptr<const Regularizer>;

} // namespace slpg
