#include "slpg/geometry.hpp"

#include "slpg/errors.hpp"

#include <cmath>
#include <string>

namespace slpg {

void require_finite(const Matrix &m, std::string_view what) {
  if (!m.allFinite())
    throw NonFiniteError(std::string(what) + ": matrix contains NaN or Inf");
}

void require_square(const Matrix &m, std::string_view what) {
  if (m.rows() != m.cols())
    throw DimensionError(std::string(what) + ": expected a square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

void require_same_shape(const Matrix &a, const Matrix &b, std::string_view what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) +
                         "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                         "x" + std::to_string(b.cols()));
}

Matrix sym(const Matrix &m) {
  require_square(m, "sym");
  const Eigen::Index p = m.rows();
  Matrix out(p, p);
  // Fill both triangles from the same expression so (i,j) and (j,i) agree bitwise.
  for (Eigen::Index j = 0; j < p; ++j) {
    out(j, j) = m(j, j);
    for (Eigen::Index i = j + 1; i < p; ++i) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

double inner(const Matrix &a, const Matrix &b) {
  require_same_shape(a, b, "inner");
  return (a.array() * b.array()).sum();
}

namespace {

Matrix gram_minus_identity(const Matrix &x) {
  Matrix g = x.transpose() * x;
  g.diagonal().array() -= 1.0;
  return sym(g);
}

} // namespace

FeasibilityReport feasibility(const Matrix &x) {
  const Matrix e = gram_minus_identity(x);
  FeasibilityReport rep;
  rep.fro_violation = e.norm();
  if (e.size() == 0)
    return rep;
  Eigen::SelfAdjointEigenSolver<Matrix> es(e, Eigen::EigenvaluesOnly);
  rep.spectral_violation = es.eigenvalues().cwiseAbs().maxCoeff();
  // Eigenvalue round-off can push the spectral norm a hair above the Frobenius norm.
  if (rep.spectral_violation > rep.fro_violation)
    rep.spectral_violation = rep.fro_violation;
  return rep;
}

double feasibility_fro(const Matrix &x) { return gram_minus_identity(x).norm(); }

Matrix normal_step(const Matrix &y) {
  Matrix m = -0.5 * sym(y.transpose() * y);
  m.diagonal().array() += 1.5;
  return y * m;
}

Matrix polar_project(const Matrix &x) {
  require_finite(x, "polar_project");
  if (x.cols() == 0 || x.rows() < x.cols())
    throw DimensionError("polar_project: expected n >= p >= 1");
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector &s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smax > 0.0) || smin <= 1e-12 * smax)
    throw SingularityError("polar_project: matrix is rank deficient (sigma_min/sigma_max = " +
                           std::to_string(smax > 0.0 ? smin / smax : 0.0) + ")");
  return svd.matrixU() * svd.matrixV().transpose();
}

} // namespace slpg
