#include "slpg/oracles.hpp"

#include "slpg/errors.hpp"
#include "slpg/geometry.hpp"

#include <cmath>
#include <string>

namespace slpg {

namespace {

void check_eta(double eta, const char *what) {
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw ParameterError(std::string(what) + ": eta must be positive and finite, got " +
                         std::to_string(eta));
}

} // namespace

QuadraticTraceObjective::QuadraticTraceObjective(Matrix l) : l_(std::move(l)) {
  if (l_.rows() == 0 || l_.rows() != l_.cols())
    throw ParameterError("QuadraticTraceObjective: L must be square and nonempty");
  require_finite(l_, "QuadraticTraceObjective");
  const double scale = std::max(1.0, l_.cwiseAbs().maxCoeff());
  if ((l_ - l_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ParameterError("QuadraticTraceObjective: L is not symmetric");
  l_ = sym(l_);
  Eigen::SelfAdjointEigenSolver<Matrix> es(l_, Eigen::EigenvaluesOnly);
  const Vector &ev = es.eigenvalues();
  norm2_ = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  if (ev(0) < -1e-12 * std::max(norm2_, 1e-300))
    throw ParameterError("QuadraticTraceObjective: L is not positive semidefinite");
}

SmoothEval QuadraticTraceObjective::eval(const Matrix &x) const {
  if (x.rows() != l_.rows())
    throw DimensionError("QuadraticTraceObjective: X has " + std::to_string(x.rows()) +
                         " rows, L is " + std::to_string(l_.rows()) + "x" +
                         std::to_string(l_.cols()));
  SmoothEval out;
  Matrix lx = l_ * x;
  out.value = -0.5 * (x.array() * lx.array()).sum();
  out.grad = -lx;
  return out;
}

std::optional<double> QuadraticTraceObjective::gradient_bound(Eigen::Index p) const {
  // ||L X||_F <= ||L||_2 ||X||_F and ||X||_F^2 <= 1.5 p on the region.
  return norm2_ * std::sqrt(1.5 * static_cast<double>(p));
}

std::string to_string(RegularizerKind kind) {
  switch (kind) {
  case RegularizerKind::Zero:
    return "Zero";
  case RegularizerKind::EntrywiseL1:
    return "EntrywiseL1";
  case RegularizerKind::RowwiseL21:
    return "RowwiseL21";
  }
  return "Unknown";
}

double soft_threshold(double t, double tau) {
  const double m = std::abs(t) - tau;
  if (m <= 0.0)
    return 0.0;
  return t > 0.0 ? m : -m;
}

// --- Zero -------------------------------------------------------------------

double ZeroRegularizer::value(const Matrix &) const { return 0.0; }

Matrix ZeroRegularizer::prox(const Matrix &g, const Matrix &x, double eta) const {
  return x - eta * g;
}

std::optional<Matrix> ZeroRegularizer::multiplier_correction(const Matrix &x) const {
  return Matrix::Zero(x.cols(), x.cols());
}

std::optional<Matrix> ZeroRegularizer::canonical_subgradient(const Matrix &x) const {
  return Matrix::Zero(x.rows(), x.cols());
}

// --- l1 ---------------------------------------------------------------------

EntrywiseL1::EntrywiseL1(double gamma) : gamma_(gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw ParameterError("EntrywiseL1: gamma must be nonnegative and finite");
}

double EntrywiseL1::value(const Matrix &x) const { return gamma_ * x.cwiseAbs().sum(); }

Matrix EntrywiseL1::prox(const Matrix &g, const Matrix &x, double eta) const {
  const double tau = eta * gamma_;
  Matrix v = x - eta * g;
  return v.unaryExpr([tau](double t) { return soft_threshold(t, tau); });
}

double EntrywiseL1::lipschitz_bound(Eigen::Index n, Eigen::Index p) const {
  return gamma_ * std::sqrt(static_cast<double>(n) * static_cast<double>(p));
}

// --- l2,1 -------------------------------------------------------------------

RowwiseL21::RowwiseL21(Vector gamma) : gamma_(std::move(gamma)) {
  if (gamma_.size() == 0)
    throw ParameterError("RowwiseL21: gamma must be nonempty");
  for (Eigen::Index i = 0; i < gamma_.size(); ++i)
    if (!(gamma_(i) >= 0.0) || !std::isfinite(gamma_(i)))
      throw ParameterError("RowwiseL21: gamma entries must be nonnegative and finite");
}

void RowwiseL21::check_rows(const Matrix &x, const char *what) const {
  if (x.rows() != gamma_.size())
    throw DimensionError(std::string(what) + ": gamma has length " +
                         std::to_string(gamma_.size()) + " but X has " +
                         std::to_string(x.rows()) + " rows");
}

double RowwiseL21::value(const Matrix &x) const {
  check_rows(x, "RowwiseL21::value");
  return gamma_.dot(x.rowwise().norm());
}

Matrix RowwiseL21::prox(const Matrix &g, const Matrix &x, double eta) const {
  check_rows(x, "RowwiseL21::prox");
  Matrix d = x - eta * g;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    const double nv = d.row(i).norm();
    const double thr = eta * gamma_(i);
    if (nv <= thr)
      d.row(i).setZero();
    else
      d.row(i) *= 1.0 - thr / nv;
  }
  return d;
}

double RowwiseL21::lipschitz_bound(Eigen::Index, Eigen::Index) const { return gamma_.norm(); }

std::optional<Matrix> RowwiseL21::multiplier_correction(const Matrix &x) const {
  check_rows(x, "RowwiseL21::multiplier_correction");
  const Eigen::Index p = x.cols();
  Matrix acc = Matrix::Zero(p, p);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double nx = x.row(i).norm();
    if (nx == 0.0 || gamma_(i) == 0.0)
      continue;
    const Vector row = x.row(i).transpose();
    acc.noalias() += (gamma_(i) / nx) * (row * row.transpose());
  }
  return sym(acc);
}

std::optional<Matrix> RowwiseL21::canonical_subgradient(const Matrix &x) const {
  check_rows(x, "RowwiseL21::canonical_subgradient");
  Matrix w = Matrix::Zero(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double nx = x.row(i).norm();
    if (nx > 0.0)
      w.row(i) = (gamma_(i) / nx) * x.row(i);
  }
  return w;
}

// --- free functions ---------------------------------------------------------

SmoothEval smooth_eval(const SmoothObjective &obj, const Matrix &x) { return obj.eval(x); }

double reg_value(const Regularizer &r, const Matrix &x) { return r.value(x); }

Matrix prox(const Regularizer &r, const Matrix &g, const Matrix &x, double eta) {
  check_eta(eta, "prox");
  require_same_shape(g, x, "prox");
  return r.prox(g, x, eta);
}

double tangential_objective(const SmoothObjective &obj, const Regularizer &r, const Matrix &x,
                            double eta, const Matrix &d) {
  check_eta(eta, "tangential_objective");
  require_same_shape(x, d, "tangential_objective");
  const Matrix g = obj.gradient(x);
  return inner(g, d) + r.value(d) + (d - x).squaredNorm() / (2.0 * eta);
}

} // namespace slpg
