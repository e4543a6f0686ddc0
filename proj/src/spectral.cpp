#include "fhodge/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

namespace fhodge {

namespace {

using Eigen::MatrixXd;

void b_project(const std::vector<VectorXd>& constraints, const VectorXd& B, Eigen::Ref<VectorXd> v) {
  for (const auto& c : constraints) {
    const double cc = c.dot(B.cwiseProduct(c));
    v -= (c.dot(B.cwiseProduct(v)) / cc) * c;
  }
}

// B-orthonormalizes the columns in place (modified Gram-Schmidt, two passes). Columns that
// collapse are replaced by fresh random directions.
void b_orthonormalize(MatrixXd& X, const VectorXd& B, const std::vector<VectorXd>& constraints, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    for (int attempt = 0; attempt < 3; ++attempt) {
      const double before = std::sqrt(X.col(j).dot(B.cwiseProduct(X.col(j))));
      for (int pass = 0; pass < 2; ++pass) {
        b_project(constraints, B, X.col(j));
        for (Eigen::Index i = 0; i < j; ++i) {
          X.col(j) -= X.col(i).dot(B.cwiseProduct(X.col(j))) * X.col(i);
        }
      }
      const double after = std::sqrt(X.col(j).dot(B.cwiseProduct(X.col(j))));
      if (after > 1e-10 * before && after > 0.0) {
        X.col(j) /= after;
        break;
      }
      for (Eigen::Index r = 0; r < X.rows(); ++r) X(r, j) = normal(rng);
    }
  }
}

void normalize_sign(Eigen::Ref<VectorXd> v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v[arg] < 0.0) v = -v;
}

}  // namespace

EigenResult smallest_eigenpairs(const SparseMatrix& A, const VectorXd& B, const EigenOptions& options) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.size() != n) throw Error("smallest_eigenpairs: dimension mismatch");
  if (options.k < 1) throw Error("smallest_eigenpairs: k must be at least 1");
  if (!(options.tol > 0.0)) throw Error("smallest_eigenpairs: tol must be positive");
  if ((B.array() <= 0.0).any()) throw Error("smallest_eigenpairs: B must be positive");

  const Eigen::Index free_dim = n - static_cast<Eigen::Index>(options.constraints.size());
  const int k = static_cast<int>(std::min<Eigen::Index>(options.k, free_dim));
  int p = options.block_size > 0 ? options.block_size : std::max(2 * k, k + 8);
  p = static_cast<int>(std::min<Eigen::Index>(p, free_dim));

  double shift = options.shift;
  if (shift <= 0.0) {
    double scale = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) scale = std::max(scale, A.coeff(i, i) / B[i]);
    shift = std::max(1e-6 * scale, 1e-12);
  }

  SparseMatrix shifted = A;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += shift * B[i];
  Eigen::SimplicialLDLT<SparseMatrix> solver(shifted);
  if (solver.info() != Eigen::Success) throw Error("smallest_eigenpairs: factorization of A + sB failed");

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd X(n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = normal(rng);
  b_orthonormalize(X, B, options.constraints, rng);

  EigenResult result;
  result.block_size = p;
  result.shift = shift;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    MatrixXd Y(n, p);
    for (Eigen::Index j = 0; j < p; ++j) Y.col(j) = solver.solve(B.cwiseProduct(X.col(j)));
    b_orthonormalize(Y, B, options.constraints, rng);

    const MatrixXd AY = A * Y;
    MatrixXd H = Y.transpose() * AY;
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> small(H);
    X = Y * small.eigenvectors();
    const MatrixXd AX = AY * small.eigenvectors();

    result.iterations = iter;
    result.eigenvalues = small.eigenvalues().head(k);
    result.residuals.assign(k, 0.0);
    bool done = true;
    for (int i = 0; i < k; ++i) {
      const VectorXd r = AX.col(i) - result.eigenvalues[i] * B.cwiseProduct(X.col(i));
      const double res = std::sqrt(r.cwiseAbs2().cwiseQuotient(B).sum());
      result.residuals[i] = res;
      done = done && res <= options.tol;
    }
    if (done) {
      result.converged = true;
      break;
    }
  }
  result.eigenvectors = X.leftCols(k);
  for (int i = 0; i < k; ++i) normalize_sign(result.eigenvectors.col(i));
  if (!result.converged) {
    throw EigenConvergenceError("smallest_eigenpairs: no convergence within " +
                                    std::to_string(options.max_iterations) + " iterations",
                                result);
  }
  return result;
}

int kernel_dimension(const VectorXd& ascending, const KernelThresholds& t) {
  const Eigen::Index n = ascending.size();
  if (n == 0 || ascending[n - 1] <= t.absolute) return -1;
  // walk up while each eigenvalue is negligible next to its successor
  int m = 0;
  while (m + 1 < n && ascending[m] <= std::max(t.absolute, t.relative * ascending[m + 1])) ++m;
  return m;
}

double gap_ratio(const VectorXd& ascending, int kernel_dim) {
  const double eps = std::numeric_limits<double>::epsilon();
  if (kernel_dim >= ascending.size()) return 0.0;
  const double largest_kernel = kernel_dim > 0 ? std::max(ascending[kernel_dim - 1], eps) : eps;
  return ascending[kernel_dim] / largest_kernel;
}

HodgeParts hodge_decompose(const OperatorSet& ops, const VectorXd& omega) {
  HodgeParts parts;
  using CG = Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper>;

  CG cg0;
  cg0.setTolerance(1e-14);
  cg0.setMaxIterations(static_cast<int>(10 * ops.K0.rows()));
  cg0.compute(ops.K0);
  const VectorXd rhs0 = ops.d0.transpose() * ops.M1.cwiseProduct(omega);
  parts.alpha = cg0.solve(rhs0);
  parts.solves_converged = cg0.info() == Eigen::Success;
  if (ops.bc == BoundaryCondition::natural) {
    // constants are in the kernel of L_f_0
    parts.alpha.array() -= parts.alpha.dot(ops.M0) / ops.M0.sum();
  }
  parts.exact = ops.d0 * parts.alpha;

  // coexact part M1^{-1} d1^T gamma with (d1 M1^{-1} d1^T) gamma = d1 omega
  const SparseMatrix m1_inv_d1t = ops.M1.cwiseInverse().asDiagonal() * SparseMatrix(ops.d1.transpose());
  const SparseMatrix S = ops.d1 * m1_inv_d1t;
  CG cg2;
  cg2.setTolerance(1e-14);
  cg2.setMaxIterations(static_cast<int>(10 * S.rows()));
  cg2.compute(S);
  const VectorXd gamma = cg2.solve(ops.d1 * omega);
  parts.solves_converged = parts.solves_converged && cg2.info() == Eigen::Success;
  parts.beta = gamma.cwiseQuotient(ops.M2);
  parts.coexact = m1_inv_d1t * gamma;
  parts.harmonic = omega - parts.exact - parts.coexact;
  return parts;
}

HarmonicBasis harmonic_one_forms(const OperatorSet& ops, const HarmonicOptions& options) {
  HarmonicBasis basis;
  const Eigen::Index n = ops.count(1);
  int k = options.initial_k;
  EigenResult eig;
  int dim = -1;
  for (;;) {
    EigenOptions eo;
    eo.k = static_cast<int>(std::min<Eigen::Index>(k, n));
    eo.tol = options.eigen_tol;
    eo.seed = options.seed;
    eig = smallest_eigenpairs(ops.K1, ops.M1, eo);
    dim = kernel_dimension(eig.eigenvalues, options.kernel);
    if (dim >= 0 && dim < eig.eigenvalues.size()) break;
    if (eo.k >= n) break;
    k *= 2;
  }
  basis.spectrum = eig.eigenvalues;
  basis.eigen_residuals = eig.residuals;
  if (dim < 0) {
    basis.dimension = static_cast<int>(eig.eigenvalues.size());
    basis.resolved = false;
    basis.gap_ratio = 0.0;
    basis.note = "every computed eigenvalue is below the kernel floor";
    return basis;
  }
  basis.gap_ratio = gap_ratio(eig.eigenvalues, dim);
  basis.dimension = dim;

  std::vector<VectorXd> accepted;
  int rejected = 0;
  for (int i = 0; i < dim; ++i) {
    VectorXd w = eig.eigenvectors.col(i);
    auto residuals = [&](const VectorXd& v) {
      const double nv = ops.norm(1, v);
      return std::pair{ops.norm(2, ops.d1 * v) / nv, ops.norm(0, ops.delta_f_1 * v) / nv};
    };
    auto [closed, coclosed] = residuals(w);
    if (closed + coclosed > options.closed_tol) {
      w = hodge_decompose(ops, w).harmonic;
      std::tie(closed, coclosed) = residuals(w);
    }
    if (closed + coclosed > options.closed_tol) {
      ++rejected;
      continue;
    }
    accepted.push_back(w);
  }
  // M1-orthonormalize the accepted members
  for (std::size_t j = 0; j < accepted.size(); ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < j; ++i) accepted[j] -= ops.inner(1, accepted[i], accepted[j]) * accepted[i];
    accepted[j] /= ops.norm(1, accepted[j]);
  }
  for (auto& w : accepted) {
    const double nv = ops.norm(1, w);
    basis.closed_residuals.push_back(ops.norm(2, ops.d1 * w) / nv);
    basis.coclosed_residuals.push_back(ops.norm(0, ops.delta_f_1 * w) / nv);
  }
  basis.forms = std::move(accepted);
  if (rejected > 0) {
    basis.resolved = false;
    basis.note = std::to_string(rejected) + " kernel vector(s) failed the closed/co-closed check";
  }
  if (basis.gap_ratio < options.kernel.min_gap_ratio) {
    basis.resolved = false;
    basis.note = "spectral gap ratio below threshold";
  }
  return basis;
}

Lambda1Estimate lambda1_estimate(const OperatorSet& ops, double tol, std::uint64_t seed) {
  Lambda1Estimate est;
  est.constants_admissible = ops.bc == BoundaryCondition::natural;

  EigenOptions eo;
  eo.k = 1;
  eo.tol = tol;
  eo.seed = seed;
  if (est.constants_admissible) {
    est.infimum = 0.0;
    est.infimum_residual = ops.norm(0, ops.L_f_0 * VectorXd::Ones(ops.count(0)));
  } else {
    const EigenResult ground = smallest_eigenpairs(ops.K0, ops.M0, eo);
    est.infimum = ground.eigenvalues[0];
    est.infimum_residual = ground.residuals[0];
  }
  eo.constraints = {VectorXd::Ones(ops.count(0))};
  const EigenResult rest = smallest_eigenpairs(ops.K0, ops.M0, eo);
  est.first_nonconstant = rest.eigenvalues[0];
  est.nonconstant_residual = rest.residuals[0];
  return est;
}

}  // namespace fhodge
