#pragma once

#include "slpg/types.hpp"

namespace slpg {

/// Violation of the orthonormality constraint, measured on X^T X - I.
struct FeasibilityReport {
  double fro_violation = 0.0;      ///< ||X^T X - I||_F
  double spectral_violation = 0.0; ///< ||X^T X - I||_2
};

/// (M + M^T) / 2. The result is bit-exactly symmetric.
Matrix sym(const Matrix &m);

/// Frobenius inner product <A, B> = tr(A^T B).
double inner(const Matrix &a, const Matrix &b);

/// ||X^T X - I||_F and ||X^T X - I||_2. The spectral norm comes from the
/// eigenvalues of the p x p Gram matrix.
FeasibilityReport feasibility(const Matrix &x);

/// ||X^T X - I||_F only; cheaper than feasibility() on hot paths.
double feasibility_fro(const Matrix &x);

/// First-order approximation of the polar factor:
///   X = Y ((3/2) I - (1/2) sym(Y^T Y)).
/// Total on any input. Contracts the violation quadratically when
/// ||Y^T Y - I||_2 <= 1/4:  ||X^T X - I||_F <= (13/16) ||Y^T Y - I||_F^2.
Matrix normal_step(const Matrix &y);

/// U V^T from the thin SVD X = U S V^T (the closest matrix with orthonormal
/// columns). Throws SingularityError when sigma_min <= 1e-12 * sigma_max.
Matrix polar_project(const Matrix &x);

} // namespace slpg
