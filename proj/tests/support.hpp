#pragma once

// Shared helpers for the unit and acceptance tests: random instances and
// brute-force reference implementations that avoid Eigen expression code.

#include "slpg/geometry.hpp"
#include "slpg/oracles.hpp"
#include "slpg/problems.hpp"
#include "slpg/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace slpg::testing {

inline Matrix randn(Rng &rng, Eigen::Index rows, Eigen::Index cols) {
  return rng.normal_matrix(rows, cols);
}

inline Matrix random_spd(Rng &rng, Eigen::Index n) {
  Matrix s = rng.normal_matrix(n, n + 2);
  Matrix l = s * s.transpose();
  return 0.5 * (l + l.transpose()) / static_cast<double>(n);
}

// X with orthonormal columns perturbed so that ||X^T X - I||_2 equals `target`.
inline Matrix near_stiefel(Rng &rng, Eigen::Index n, Eigen::Index p, double target) {
  Matrix q = random_orthonormal(n, p, static_cast<std::uint64_t>(rng.uniform() * 1e15));
  Matrix e = rng.normal_matrix(p, p);
  e = 0.5 * (e + e.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(e);
  const double m = es.eigenvalues().cwiseAbs().maxCoeff();
  // X = Q (I + t E)^(1/2) has X^T X - I = t E exactly.
  const Matrix shift = Matrix::Identity(p, p) + (target / m) * e;
  Eigen::SelfAdjointEigenSolver<Matrix> ss(shift);
  const Matrix root =
      ss.eigenvectors() * ss.eigenvalues().cwiseSqrt().asDiagonal() * ss.eigenvectors().transpose();
  return q * root;
}

// A^T B by explicit triple loop.
inline Matrix loop_atb(const Matrix &a, const Matrix &b) {
  Matrix out(a.cols(), b.cols());
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < a.rows(); ++k)
        s += a(k, i) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

// A B by explicit triple loop.
inline Matrix loop_ab(const Matrix &a, const Matrix &b) {
  Matrix out(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < a.cols(); ++k)
        s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

inline double loop_fro(const Matrix &a) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

inline double loop_inner(const Matrix &a, const Matrix &b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      s += a(i, j) * b(i, j);
  return s;
}

inline Matrix loop_sym(const Matrix &m) {
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out(i, j) = 0.5 * (m(i, j) + m(j, i));
  return out;
}

inline double loop_feasibility(const Matrix &x) {
  Matrix g = loop_atb(x, x);
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    g(i, i) -= 1.0;
  return loop_fro(g);
}

// grad - X sym(X^T grad)
inline Matrix loop_projected_gradient(const Matrix &x, const Matrix &grad) {
  const Matrix s = loop_sym(loop_atb(x, grad));
  Matrix out = grad;
  const Matrix xs = loop_ab(x, s);
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      out(i, j) -= xs(i, j);
  return out;
}

// Minimizer of phi over the lattice lo + i * step in [lo, hi]^dim (dim 1 or 2).
// One dimension is searched exhaustively. In two dimensions phi must be
// convex: the search refines a coarse grid by factors of 10 down to `step`,
// each level scanning +-2 cells of the previous level around its winner.
inline std::vector<double> grid_argmin(const std::function<double(const std::vector<double> &)> &phi,
                                       int dim, double lo, double hi, double step) {
  const long m = std::lround((hi - lo) / step);
  std::vector<double> cur(dim, 0.0);
  double best_val = std::numeric_limits<double>::infinity();
  if (dim == 1) {
    double best = lo;
    for (long i = 0; i <= m; ++i) {
      cur[0] = lo + i * step;
      const double v = phi(cur);
      if (v < best_val) {
        best_val = v;
        best = cur[0];
      }
    }
    return {best};
  }
  long stride = 1;
  while (m / (stride * 10) >= 50)
    stride *= 10;
  long bi = 0, bj = 0, lo_i = 0, hi_i = m, lo_j = 0, hi_j = m;
  for (;;) {
    best_val = std::numeric_limits<double>::infinity();
    for (long i = lo_i; i <= hi_i; i += stride)
      for (long j = lo_j; j <= hi_j; j += stride) {
        cur[0] = lo + i * step;
        cur[1] = lo + j * step;
        const double v = phi(cur);
        if (v < best_val) {
          best_val = v;
          bi = i;
          bj = j;
        }
      }
    if (stride == 1)
      break;
    lo_i = std::max(0L, bi - 2 * stride);
    hi_i = std::min(m, bi + 2 * stride);
    lo_j = std::max(0L, bj - 2 * stride);
    hi_j = std::min(m, bj + 2 * stride);
    stride /= 10;
  }
  return {lo + bi * step, lo + bj * step};
}

// The prox model <G, D> + r(D) + ||D - X||^2 / (2 eta).
inline double prox_model(const Regularizer &r, const Matrix &g, const Matrix &x, double eta,
                         const Matrix &d) {
  return loop_inner(g, d) + r.value(d) + std::pow(loop_fro(d - x), 2) / (2.0 * eta);
}

} // namespace slpg::testing
