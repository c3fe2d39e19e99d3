#include "slpg/problems.hpp"

#include "slpg/errors.hpp"
#include "slpg/geometry.hpp"

#include <cmath>
#include <numbers>

namespace slpg {

double Rng::uniform() {
  const std::uint64_t bits = engine_() >> 11;
  return static_cast<double>(bits + 1) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  cached_ = rad * std::sin(ang);
  has_cached_ = true;
  return rad * std::cos(ang);
}

Matrix Rng::normal_matrix(Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = normal();
  return m;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Matrix gen_covariance(Eigen::Index n, Eigen::Index num_samples, std::uint64_t seed) {
  if (n < 1 || num_samples < 1)
    throw ParameterError("gen_covariance: n and num_samples must be positive");
  Rng rng(seed);
  const Matrix s = rng.normal_matrix(n, num_samples);
  Matrix l = sym(s * s.transpose());
  // ||S||_2^2 is the largest eigenvalue of S S^T.
  Eigen::SelfAdjointEigenSolver<Matrix> es(l, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues()(n - 1);
  l /= top;
  return l;
}

EigenBasis leading_eigenvectors(const Matrix &l, Eigen::Index p) {
  require_square(l, "leading_eigenvectors");
  const Eigen::Index n = l.rows();
  if (p < 1 || p > n)
    throw DimensionError("leading_eigenvectors: need 1 <= p <= n");
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(l));
  EigenBasis out;
  out.x.resize(n, p);
  out.values.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const Eigen::Index src = n - 1 - j;
    Vector v = es.eigenvectors().col(src);
    const double vmax = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(v(i)) > 1e-12 * vmax) {
        if (v(i) < 0.0)
          v = -v;
        break;
      }
    }
    out.x.col(j) = v;
    out.values(j) = es.eigenvalues()(src);
  }
  if (p < n)
    out.gap_warning = es.eigenvalues()(n - p) - es.eigenvalues()(n - p - 1) < 1e-12;
  return out;
}

Matrix random_orthonormal(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  if (p < 1 || p > n)
    throw DimensionError("random_orthonormal: need 1 <= p <= n");
  Rng rng(seed);
  const Matrix g = rng.normal_matrix(n, p);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(n, p);
}

std::string to_string(ProblemKind k) {
  switch (k) {
  case ProblemKind::PCA:
    return "PCA";
  case ProblemKind::SparsePCA:
    return "SparsePCA";
  case ProblemKind::L21PCA:
    return "L21PCA";
  }
  return "Unknown";
}

std::string to_string(InitKind k) {
  return k == InitKind::LeadingEigenvectors ? "LeadingEigenvectors" : "RandomOrthonormal";
}

double GammaRule::resolve(Eigen::Index n, Eigen::Index p) const {
  if (kind == Kind::Direct)
    return value;
  return value * std::sqrt(static_cast<double>(p) + std::log(static_cast<double>(n)));
}

void InstanceSpec::validate() const {
  if (n < 1 || p < 1 || p > n)
    throw ParameterError("InstanceSpec: need 1 <= p <= n");
  if (num_samples < 1)
    throw ParameterError("InstanceSpec: num_samples must be positive");
  if (kind != ProblemKind::PCA && (!(gamma_rule.value > 0.0) || !std::isfinite(gamma_rule.value)))
    throw ParameterError("InstanceSpec: gamma / b must be positive");
}

GeneratedInstance make_instance(const InstanceSpec &spec) {
  spec.validate();
  GeneratedInstance inst;
  inst.l = gen_covariance(spec.n, spec.num_samples, spec.seed);
  inst.objective = std::make_shared<QuadraticTraceObjective>(inst.l);
  if (spec.init == InitKind::LeadingEigenvectors) {
    EigenBasis eb = leading_eigenvectors(inst.l, spec.p);
    inst.x0 = std::move(eb.x);
    inst.eigengap_warning = eb.gap_warning;
  } else {
    inst.x0 = random_orthonormal(spec.n, spec.p, derive_seed(spec.seed, 0x1417));
  }
  switch (spec.kind) {
  case ProblemKind::PCA:
    inst.regularizer = std::make_shared<ZeroRegularizer>();
    break;
  case ProblemKind::SparsePCA:
    inst.gamma = spec.gamma_rule.resolve(spec.n, spec.p);
    inst.regularizer = std::make_shared<EntrywiseL1>(inst.gamma);
    break;
  case ProblemKind::L21PCA:
    inst.gamma = spec.gamma_rule.resolve(spec.n, spec.p);
    inst.regularizer = std::make_shared<RowwiseL21>(Vector::Constant(spec.n, inst.gamma));
    break;
  }
  return inst;
}

} // namespace slpg
