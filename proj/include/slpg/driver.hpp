#pragma once

#include "slpg/errors.hpp"
#include "slpg/oracles.hpp"
#include "slpg/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace slpg {

enum class InnerSolver { FixedPoint, Explicit };
enum class NormalKind { FirstOrder, ExactPolar };
enum class Termination { Converged, MaxIter };

std::string to_string(InnerSolver s);
std::string to_string(NormalKind k);
std::string to_string(Termination t);

/// Constants of the merit function h(X) = f + r + (2 L_f + 2 L_r + 3/2) ||X^T X - I||_F.
struct MeritConstants {
  double lf = 0.0;  ///< bound on ||grad f||_F near the Stiefel manifold
  double lfp = 0.0; ///< Lipschitz constant of grad f near the manifold
  double lr = 0.0;  ///< Lipschitz constant of r
};

/// Certified upper bounds for the given oracles on n x p iterates. Missing
/// smooth-objective bounds are reported as zero.
MeritConstants certified_constants(const SmoothObjective &obj, const Regularizer &r,
                                   Eigen::Index n, Eigen::Index p);

/// Upper end of the stepsize interval under which the merit function
/// provably decreases:
///   min{ 1 / (6 (1+c)(L_f + L_r + c + 1)), 1 / (2 L_f' + 8 (L_f + L_r) + 3) }.
double theoretical_stepsize(const MeritConstants &k, double c);

struct SolveOptions {
  double tol = 1e-4;
  int max_iter = 10000;
  int inner_cap = 10;
  double c = 1000.0;
  InnerSolver inner_solver = InnerSolver::FixedPoint;
  NormalKind normal_kind = NormalKind::FirstOrder;
  std::optional<double> eta0; ///< nullopt = Auto
  double eta_min = 1e-10;
  double eta_max = 1e3;
  bool post_process = true;
  /// Fixed stepsize for every iteration (disables BB). Used for the
  /// theoretical-stepsize regime.
  std::optional<double> fixed_eta;
  /// Constants used for the merit column of the trace. Certified bounds are
  /// computed from the oracles when absent.
  std::optional<MeritConstants> merit_constants;
  std::uint64_t seed = 0;

  /// Throws ParameterError when the options are inconsistent.
  void validate() const;
};

struct IterRecord {
  int k = 0;
  double eta = 0.0;
  double fval = 0.0;
  double rval = 0.0;
  double merit = 0.0;
  double substationarity = 0.0;
  double feasibility = 0.0;
  double ts_feasibility = 0.0;
  int inner_iters = 0;
  bool condition_met = false;
  double elapsed_s = 0.0;
};

struct SolveResult {
  Matrix x_final;
  Termination terminated = Termination::MaxIter;
  std::vector<IterRecord> trace;
  bool post_processed = false;
  double fval_before_post = 0.0;
  double rval_before_post = 0.0;
  double fval_after_post = 0.0;
  double rval_after_post = 0.0;
  double feasibility_before_post = 0.0;
  double feasibility_after_post = 0.0;

  int iterations() const { return trace.empty() ? 0 : trace.back().k; }
};

/// Raised when the solve produces NaN/Inf; carries the trace up to the failure.
class NumericalFailure : public Error {
public:
  NumericalFailure(const std::string &msg, std::vector<IterRecord> trace)
      : Error(msg), trace_(std::move(trace)) {}
  const std::vector<IterRecord> &trace() const { return trace_; }

private:
  std::vector<IterRecord> trace_;
};

/// grad - X sym(X^T grad).
Matrix projected_gradient(const Matrix &x, const Matrix &grad);

struct StepClamp {
  double eta_min = 1e-10;
  double eta_max = 1e3;
};

/// Barzilai-Borwein ratio <S, V> / <V, V> with S = X_k - X_prev and V the
/// difference of projected gradients, clamped to [eta_min, eta_max]. Returns
/// `fallback` when <V, V> <= 1e-30 or <S, V> <= 0.
double bb_stepsize(const Matrix &x_k, const Matrix &x_prev, const Matrix &grad_k,
                   const Matrix &grad_prev, const StepClamp &clamp, double fallback);

double merit(const SmoothObjective &obj, const Regularizer &r, const MeritConstants &k,
             const Matrix &x);

/// ||Y - X||_F / eta.
double substationarity(const Matrix &y, const Matrix &x, double eta);

/// ||grad f(X) + W(X) - X Lambda(X)||_F with the closed-form multiplier and
/// the canonical subgradient (zero rows contribute zero). Throws
/// UnsupportedError for regularizers without a closed-form multiplier.
double smooth_stationarity_residual(const SmoothObjective &obj, const Regularizer &r,
                                    const Matrix &x);

/// Observer invoked after each trace record; receives the iterate X_k and
/// the tangential point Y_k of that record.
struct IterationObserver {
  virtual ~IterationObserver() = default;
  virtual void on_iteration(const IterRecord &rec, const Matrix &x, const Matrix &y) = 0;
};

/// Sequential linearized proximal gradient loop: BB stepsize, inexact
/// tangential step, cheap normal step, optional SVD post-process.
SolveResult slpg_solve(const SmoothObjective &obj, const Regularizer &r, const Matrix &x0,
                       const SolveOptions &opts, IterationObserver *observer = nullptr);

} // namespace slpg
