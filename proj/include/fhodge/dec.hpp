#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "fhodge/geometry.hpp"

namespace fhodge {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Eigen::VectorXd;

/// natural: every simplex is a degree of freedom (absolute cohomology).
/// dirichlet: boundary vertices and edges are removed (relative subcomplex), which is how
/// truncated non-compact factors are closed off for spectral problems.
enum class BoundaryCondition { natural, dirichlet };

/// Degree-k cochain: one integrated value per active simplex of that degree.
struct Cochain {
  int degree = 0;
  VectorXd values;
};

struct MassDiagonals {
  VectorXd M0;
  VectorXd M1;
  VectorXd M2;
};

/// Weighted discrete exterior calculus on one mesh. Sign convention: L_f = d delta_f + delta_f d
/// is positive semidefinite, i.e. minus the f-Hodge Laplacian.
struct OperatorSet {
  BoundaryCondition bc = BoundaryCondition::natural;
  SparseMatrix d0;  // edges x vertices
  SparseMatrix d1;  // faces x edges
  VectorXd M0, M1, M2;
  SparseMatrix delta_f_1;  // M0^{-1} d0^T M1
  SparseMatrix delta_f_2;  // M1^{-1} d1^T M2
  SparseMatrix L_f_0;
  SparseMatrix L_f_1;
  /// Symmetric stiffness forms M_k L_f_k, used with M_k in generalized eigenproblems.
  SparseMatrix K0;
  SparseMatrix K1;
  /// Active simplex -> mesh index.
  std::vector<int> vertex_map;
  std::vector<int> edge_map;

  Eigen::Index count(int degree) const;
  const VectorXd& mass(int degree) const;
  double inner(int degree, const VectorXd& a, const VectorXd& b) const;
  double norm(int degree, const VectorXd& a) const;
  /// Exterior derivative from degree k-1 into degree k (k = 1, 2).
  const SparseMatrix& d(int k) const { return k == 1 ? d0 : d1; }
  /// Weighted codifferential from degree k into degree k-1 (k = 1, 2).
  const SparseMatrix& delta(int k) const { return k == 1 ? delta_f_1 : delta_f_2; }
};

/// Signed incidence matrices. Throws StructuralError naming the edge when two faces traverse it
/// in the same direction or more than two faces share it.
std::pair<SparseMatrix, SparseMatrix> incidence_matrices(const SimplicialMesh& mesh);

/// Lumped e^{-f}-weighted Hodge stars with circumcentric duals, barycentric on obtuse faces.
MassDiagonals weighted_mass_matrices(const SimplicialMesh& mesh);

OperatorSet assemble_operators(const SimplicialMesh& mesh, BoundaryCondition bc = BoundaryCondition::natural);

/// |<d w, e>_{M_k} - <w, delta_f e>_{M_{k-1}}| / (|w| |e|) for one pair; 0 when either is zero.
double adjointness_pair_residual(const OperatorSet& ops, int degree, const VectorXd& omega, const VectorXd& eta);

/// Max of the pair residual over `trials` random Gaussian pairs in both degrees 1 and 2.
double adjointness_residual(const OperatorSet& ops, int trials, std::uint64_t seed);

/// Chart displacement of every mesh edge along its stored orientation (chart meshes only).
std::vector<Vec2> edge_displacements(const SimplicialMesh& mesh);

/// Discrete d(x_axis): integral of the coordinate differential over each active edge.
VectorXd coordinate_differential(const SimplicialMesh& mesh, const OperatorSet& ops, int axis);

/// Integrates a one-form with the given covariant components over each active edge (midpoint rule).
VectorXd integrate_one_form(const SimplicialMesh& mesh, const OperatorSet& ops,
                            const std::function<Vec2(const Vec2&)>& components);

/// Per-face constant covector whose edge integrals best match the cochain (exact for closed cochains).
std::vector<Vec2> reconstruct_face_covectors(const SimplicialMesh& mesh, const OperatorSet& ops,
                                             const VectorXd& omega);

/// Pointwise metric norm of the reconstructed covector on each face.
std::vector<double> face_norms(const SimplicialMesh& mesh, const OperatorSet& ops, const VectorXd& omega);

}  // namespace fhodge
