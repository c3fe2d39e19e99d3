#pragma once

#include "slpg/oracles.hpp"
#include "slpg/types.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <string>

namespace slpg {

/// Reproducible random stream, version 1:
///   - engine: std::mt19937_64 seeded with the 64-bit seed (fully specified
///     by the C++ standard, identical on every conforming platform);
///   - uniform: u = ((x >> 11) + 1) * 2^-53 in (0, 1];
///   - normal: Box-Muller on two uniforms, both outputs used in order
///     (cos branch first).
class Rng {
public:
  static constexpr int kVersion = 1;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double normal();
  /// n x p matrix filled row by row with standard normals.
  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols);

private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// SplitMix64 finalizer, used to derive independent child seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// L = S S^T / ||S||_2^2 with S an n x num_samples standard-normal matrix.
Matrix gen_covariance(Eigen::Index n, Eigen::Index num_samples, std::uint64_t seed);

struct EigenBasis {
  Matrix x;                 ///< n x p, orthonormal columns, eigenvalues descending
  Vector values;            ///< the p leading eigenvalues
  bool gap_warning = false; ///< lambda_p - lambda_{p+1} < 1e-12: basis not unique
};

/// Eigenvectors of the p largest eigenvalues of the symmetric matrix L. Each
/// column's first entry with |v_i| > 1e-12 max|v| is made positive.
EigenBasis leading_eigenvectors(const Matrix &l, Eigen::Index p);

/// Q factor of the thin QR decomposition of an n x p standard-normal matrix.
Matrix random_orthonormal(Eigen::Index n, Eigen::Index p, std::uint64_t seed);

/// PCA is the smooth case (zero regularizer); gamma is ignored for it.
enum class ProblemKind { PCA, SparsePCA, L21PCA };
enum class InitKind { LeadingEigenvectors, RandomOrthonormal };

std::string to_string(ProblemKind k);
std::string to_string(InitKind k);

struct GammaRule {
  enum class Kind { Direct, BSqrt };
  Kind kind = Kind::Direct;
  double value = 0.05; ///< gamma for Direct, b for BSqrt

  /// Direct: value. BSqrt: b sqrt(p + ln n) (natural logarithm).
  double resolve(Eigen::Index n, Eigen::Index p) const;
};

struct InstanceSpec {
  ProblemKind kind = ProblemKind::SparsePCA;
  Eigen::Index n = 100;
  Eigen::Index p = 4;
  Eigen::Index num_samples = 200;
  GammaRule gamma_rule;
  std::uint64_t seed = 0;
  InitKind init = InitKind::LeadingEigenvectors;

  /// Throws ParameterError on p > n, zero sizes or non-positive gamma/b.
  void validate() const;
};

struct GeneratedInstance {
  Matrix l;
  Matrix x0;
  double gamma = 0.0;
  bool eigengap_warning = false;
  std::shared_ptr<const QuadraticTraceObjective> objective;
  RegularizerPtr regularizer;
};

/// PCA -> Zero; SparsePCA -> EntrywiseL1(gamma); L21PCA -> RowwiseL21 with
/// gamma_i = gamma. A pure function of the spec.
GeneratedInstance make_instance(const InstanceSpec &spec);

} // namespace slpg
