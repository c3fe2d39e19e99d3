#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace slpg {

/// Ambient n x p (or p x p) real matrix used for iterates, gradients,
/// directions and multipliers.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Throws NonFiniteError if any entry of `m` is NaN or Inf.
void require_finite(const Matrix &m, std::string_view what);

/// Throws DimensionError unless `m` is square.
void require_square(const Matrix &m, std::string_view what);

/// Throws DimensionError unless `a` and `b` have identical shapes.
void require_same_shape(const Matrix &a, const Matrix &b, std::string_view what);

} // namespace slpg
