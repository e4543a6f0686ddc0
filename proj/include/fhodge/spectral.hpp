#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fhodge/dec.hpp"
#include "fhodge/errors.hpp"

namespace fhodge {

struct EigenOptions {
  int k = 4;
  /// Converged when every requested pair has residual <= tol.
  double tol = 1e-9;
  std::uint64_t seed = 1234;
  int max_iterations = 400;
  /// 0 picks max(2k, k + 8).
  int block_size = 0;
  /// Shift s of the factored operator (A + s B); 0 picks a scale-aware default.
  double shift = 0.0;
  /// Iterates are kept B-orthogonal to these vectors.
  std::vector<VectorXd> constraints;
};

/// Ascending eigenpairs of A x = lambda B x with B-orthonormal eigenvectors.
/// residuals[i] = |A x - lambda B x|_{B^{-1}} / |x|_B.
struct EigenResult {
  VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  std::vector<double> residuals;
  int iterations = 0;
  int block_size = 0;
  double shift = 0.0;
  bool converged = false;
};

class EigenConvergenceError : public Error {
 public:
  EigenConvergenceError(const std::string& what, EigenResult partial) : Error(what), partial_(std::move(partial)) {}
  const EigenResult& partial() const { return partial_; }

 private:
  EigenResult partial_;
};

/// k smallest eigenpairs of the symmetric positive semidefinite pencil (A, diag(B)) by block
/// shift-invert subspace iteration with Rayleigh-Ritz. Deterministic for a fixed seed.
EigenResult smallest_eigenpairs(const SparseMatrix& A, const VectorXd& B, const EigenOptions& options);

struct KernelThresholds {
  double absolute = 1e-10;
  double relative = 1e-8;
  double min_gap_ratio = 1e4;
};

/// Number of leading eigenvalues counted as kernel: lambda_i <= max(absolute, relative * lambda_{i+1}),
/// scanning upward from the smallest. Returns -1 when every eigenvalue is below `absolute` (more
/// eigenpairs are needed).
int kernel_dimension(const VectorXd& ascending, const KernelThresholds& thresholds);

/// (first non-kernel eigenvalue) / max(largest kernel eigenvalue, machine epsilon).
double gap_ratio(const VectorXd& ascending, int kernel_dim);

struct HarmonicOptions {
  KernelThresholds kernel;
  /// Closed/co-closed tolerance relative to |omega|_f.
  double closed_tol = 1e-8;
  int initial_k = 6;
  double eigen_tol = 1e-9;
  std::uint64_t seed = 1234;
};

struct HarmonicBasis {
  int dimension = 0;
  /// M1-orthonormal harmonic one-cochains.
  std::vector<VectorXd> forms;
  double gap_ratio = 0.0;
  bool resolved = true;
  /// Smallest L_f_1 eigenvalues computed to certify the kernel.
  VectorXd spectrum;
  std::vector<double> eigen_residuals;
  /// Per member: |d omega|_f / |omega|_f and |delta_f omega|_f / |omega|_f.
  std::vector<double> closed_residuals;
  std::vector<double> coclosed_residuals;
  std::string note;

  /// First eigenvalue above the kernel, the artifact's proxy for "the 1-form spectrum is bounded away from 0".
  double smallest_nonkernel() const { return spectrum.size() > dimension ? spectrum[dimension] : 0.0; }
};

HarmonicBasis harmonic_one_forms(const OperatorSet& ops, const HarmonicOptions& options = {});

/// Smallest Rayleigh quotients of L_f_0.
struct Lambda1Estimate {
  /// Infimum over the admissible space: 0 when constants are admissible (closed or natural
  /// boundary), otherwise the lowest Dirichlet eigenvalue.
  double infimum = 0.0;
  /// Lowest eigenvalue over functions M0-orthogonal to constants.
  double first_nonconstant = 0.0;
  bool constants_admissible = false;
  double infimum_residual = 0.0;
  double nonconstant_residual = 0.0;
};

Lambda1Estimate lambda1_estimate(const OperatorSet& ops, double tol = 1e-9, std::uint64_t seed = 1234);

struct HodgeParts {
  VectorXd exact;
  VectorXd coexact;
  VectorXd harmonic;
  /// exact = d0 alpha, coexact = delta_f_2 beta.
  VectorXd alpha;
  VectorXd beta;
  bool solves_converged = true;
};

/// Weighted Hodge decomposition omega = d alpha + delta_f beta + h with M1-orthogonal parts.
HodgeParts hodge_decompose(const OperatorSet& ops, const VectorXd& omega);

}  // namespace fhodge
