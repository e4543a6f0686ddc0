#include "fhodge/dec.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "fhodge/errors.hpp"

namespace fhodge {

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMatrix diag(const VectorXd& v) {
  SparseMatrix m(v.size(), v.size());
  m.reserve(Eigen::VectorXi::Constant(v.size(), 1));
  for (Eigen::Index i = 0; i < v.size(); ++i) m.insert(i, i) = v[i];
  m.makeCompressed();
  return m;
}

SparseMatrix symmetrize(const SparseMatrix& a) {
  SparseMatrix t = a.transpose();
  SparseMatrix s = 0.5 * (a + t);
  s.prune(0.0);
  return s;
}

// Selects rows/cols of a full incidence matrix through active->full maps.
SparseMatrix restrict_matrix(const SparseMatrix& full, const std::vector<int>& row_map, const std::vector<int>& col_map) {
  std::vector<int> col_active(full.cols(), -1);
  for (std::size_t k = 0; k < col_map.size(); ++k) col_active[col_map[k]] = static_cast<int>(k);
  SparseMatrix rows_t = SparseMatrix(full.transpose());  // full rows as columns
  std::vector<Triplet> trip;
  for (std::size_t r = 0; r < row_map.size(); ++r) {
    for (SparseMatrix::InnerIterator it(rows_t, row_map[r]); it; ++it) {
      const int c = col_active[it.row()];
      if (c >= 0) trip.emplace_back(static_cast<int>(r), c, it.value());
    }
  }
  SparseMatrix out(static_cast<Eigen::Index>(row_map.size()), static_cast<Eigen::Index>(col_map.size()));
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

double weighted_dot(const VectorXd& w, const VectorXd& a, const VectorXd& b) {
  long double s = 0.0L;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += static_cast<long double>(w[i]) * a[i] * b[i];
  return static_cast<double>(s);
}

}  // namespace

Eigen::Index OperatorSet::count(int degree) const {
  return mass(degree).size();
}

const VectorXd& OperatorSet::mass(int degree) const {
  switch (degree) {
    case 0: return M0;
    case 1: return M1;
    case 2: return M2;
    default: throw Error("no cochains of degree " + std::to_string(degree));
  }
}

double OperatorSet::inner(int degree, const VectorXd& a, const VectorXd& b) const {
  return weighted_dot(mass(degree), a, b);
}

double OperatorSet::norm(int degree, const VectorXd& a) const { return std::sqrt(std::max(0.0, inner(degree, a, a))); }

std::pair<SparseMatrix, SparseMatrix> incidence_matrices(const SimplicialMesh& mesh) {
  const auto nv = static_cast<Eigen::Index>(mesh.vertex_count());
  const auto ne = static_cast<Eigen::Index>(mesh.edge_count());
  const auto nf = static_cast<Eigen::Index>(mesh.face_count());

  std::vector<int> positive(ne, 0), negative(ne, 0);
  std::vector<Triplet> t1;
  t1.reserve(3 * nf);
  for (Eigen::Index t = 0; t < nf; ++t) {
    for (int k = 0; k < 3; ++k) {
      const int e = mesh.face_edges[t][k];
      const int s = mesh.face_edge_signs[t][k];
      (s > 0 ? positive : negative)[e]++;
      t1.emplace_back(static_cast<int>(t), e, static_cast<double>(s));
    }
  }
  for (Eigen::Index e = 0; e < ne; ++e) {
    const auto [a, b] = mesh.edges[e];
    if (positive[e] + negative[e] > 2) {
      std::ostringstream os;
      os << "non-manifold edge " << e << " (" << a << ", " << b << ") shared by " << positive[e] + negative[e]
         << " faces";
      throw StructuralError(os.str());
    }
    if (positive[e] > 1 || negative[e] > 1) {
      std::ostringstream os;
      os << "inconsistent orientation at edge " << e << " (" << a << ", " << b
         << "): both adjacent faces traverse it in the same direction";
      throw StructuralError(os.str());
    }
  }

  std::vector<Triplet> t0;
  t0.reserve(2 * ne);
  for (Eigen::Index e = 0; e < ne; ++e) {
    t0.emplace_back(static_cast<int>(e), mesh.edges[e][0], -1.0);
    t0.emplace_back(static_cast<int>(e), mesh.edges[e][1], 1.0);
  }
  SparseMatrix d0(ne, nv), d1(nf, ne);
  d0.setFromTriplets(t0.begin(), t0.end());
  d1.setFromTriplets(t1.begin(), t1.end());
  return {std::move(d0), std::move(d1)};
}

MassDiagonals weighted_mass_matrices(const SimplicialMesh& mesh) {
  const std::size_t nv = mesh.vertex_count();
  const std::size_t ne = mesh.edge_count();
  const std::size_t nf = mesh.face_count();
  std::vector<double> dual_area(nv, 0.0), dual_length(ne, 0.0);

  for (std::size_t t = 0; t < nf; ++t) {
    const auto& tri = mesh.triangles[t];
    const auto& fe = mesh.face_edges[t];
    // Edge k runs from corner k to corner k+1; the corner opposite edge k is k+2.
    std::array<double, 3> l{}, l2{}, cot{};
    for (int k = 0; k < 3; ++k) {
      l[k] = mesh.edge_length[fe[k]];
      l2[k] = l[k] * l[k];
    }
    const double area = mesh.face_area[t];
    bool obtuse = false;
    for (int k = 0; k < 3; ++k) {
      const int a = (k + 1) % 3, b = (k + 2) % 3;
      cot[k] = (l2[a] + l2[b] - l2[k]) / (4.0 * area);  // angle opposite edge k
      obtuse = obtuse || cot[k] < 0.0;
    }
    if (!obtuse) {
      for (int k = 0; k < 3; ++k) {
        dual_length[fe[k]] += 0.5 * l[k] * cot[k];
        // corner k touches edges k and k+2
        const int prev = (k + 2) % 3;
        dual_area[tri[k]] += 0.125 * (l2[k] * cot[k] + l2[prev] * cot[prev]);
      }
    } else {
      for (int k = 0; k < 3; ++k) {
        const int a = (k + 1) % 3, b = (k + 2) % 3;
        const double median = 0.5 * std::sqrt(std::max(0.0, 2.0 * l2[a] + 2.0 * l2[b] - l2[k]));
        dual_length[fe[k]] += median / 3.0;
        dual_area[tri[k]] += area / 3.0;
      }
    }
  }

  MassDiagonals m;
  m.M0.resize(static_cast<Eigen::Index>(nv));
  m.M1.resize(static_cast<Eigen::Index>(ne));
  m.M2.resize(static_cast<Eigen::Index>(nf));
  for (std::size_t v = 0; v < nv; ++v) {
    if (!(dual_area[v] > 0.0)) throw StructuralError("non-positive dual area at vertex " + std::to_string(v));
    m.M0[v] = std::exp(-mesh.vertex_weight[v]) * dual_area[v];
  }
  for (std::size_t e = 0; e < ne; ++e) {
    if (!(dual_length[e] > 0.0)) {
      std::ostringstream os;
      os << "non-positive dual length at edge " << e << " (" << mesh.edges[e][0] << ", " << mesh.edges[e][1] << ")";
      throw StructuralError(os.str());
    }
    m.M1[e] = std::exp(-mesh.edge_weight[e]) * dual_length[e] / mesh.edge_length[e];
  }
  for (std::size_t t = 0; t < nf; ++t) m.M2[t] = std::exp(-mesh.face_weight[t]) / mesh.face_area[t];
  return m;
}

OperatorSet assemble_operators(const SimplicialMesh& mesh, BoundaryCondition bc) {
  auto [d0_full, d1_full] = incidence_matrices(mesh);
  const MassDiagonals mass = weighted_mass_matrices(mesh);

  OperatorSet ops;
  ops.bc = bc;
  const bool dirichlet = bc == BoundaryCondition::dirichlet;
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    if (!(dirichlet && mesh.boundary_vertex[v])) ops.vertex_map.push_back(static_cast<int>(v));
  }
  for (std::size_t e = 0; e < mesh.edge_count(); ++e) {
    if (!(dirichlet && mesh.boundary_edge[e])) ops.edge_map.push_back(static_cast<int>(e));
  }
  std::vector<int> face_map(mesh.face_count());
  for (std::size_t t = 0; t < face_map.size(); ++t) face_map[t] = static_cast<int>(t);

  if (dirichlet) {
    ops.d0 = restrict_matrix(d0_full, ops.edge_map, ops.vertex_map);
    ops.d1 = restrict_matrix(d1_full, face_map, ops.edge_map);
  } else {
    ops.d0 = std::move(d0_full);
    ops.d1 = std::move(d1_full);
  }
  ops.M0.resize(static_cast<Eigen::Index>(ops.vertex_map.size()));
  for (std::size_t k = 0; k < ops.vertex_map.size(); ++k) ops.M0[k] = mass.M0[ops.vertex_map[k]];
  ops.M1.resize(static_cast<Eigen::Index>(ops.edge_map.size()));
  for (std::size_t k = 0; k < ops.edge_map.size(); ++k) ops.M1[k] = mass.M1[ops.edge_map[k]];
  ops.M2 = mass.M2;

  const SparseMatrix m0 = diag(ops.M0), m1 = diag(ops.M1), m2 = diag(ops.M2);
  const SparseMatrix m0_inv = diag(ops.M0.cwiseInverse());
  const SparseMatrix m1_inv = diag(ops.M1.cwiseInverse());
  const SparseMatrix d0t = ops.d0.transpose();
  const SparseMatrix d1t = ops.d1.transpose();

  ops.delta_f_1 = m0_inv * d0t * m1;
  ops.delta_f_2 = m1_inv * d1t * m2;
  ops.L_f_0 = ops.delta_f_1 * ops.d0;
  ops.L_f_1 = SparseMatrix(ops.d0 * ops.delta_f_1) + SparseMatrix(ops.delta_f_2 * ops.d1);

  ops.K0 = symmetrize(d0t * m1 * ops.d0);
  const SparseMatrix m1d0 = m1 * ops.d0;
  ops.K1 = symmetrize(SparseMatrix(m1d0 * m0_inv * SparseMatrix(m1d0.transpose())) + SparseMatrix(d1t * m2 * ops.d1));
  return ops;
}

double adjointness_pair_residual(const OperatorSet& ops, int degree, const VectorXd& omega, const VectorXd& eta) {
  const double n_omega = ops.norm(degree - 1, omega);
  const double n_eta = ops.norm(degree, eta);
  if (n_omega == 0.0 || n_eta == 0.0) return 0.0;
  const VectorXd d_omega = ops.d(degree) * omega;
  const VectorXd delta_eta = ops.delta(degree) * eta;
  const double lhs = ops.inner(degree, d_omega, eta);
  const double rhs = ops.inner(degree - 1, omega, delta_eta);
  return std::abs(lhs - rhs) / (n_omega * n_eta);
}

double adjointness_residual(const OperatorSet& ops, int trials, std::uint64_t seed) {
  if (trials < 1) throw Error("adjointness_residual needs at least one trial");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&](Eigen::Index n) {
    VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
    return v;
  };
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    for (int degree = 1; degree <= 2; ++degree) {
      const VectorXd omega = draw(ops.count(degree - 1));
      const VectorXd eta = draw(ops.count(degree));
      worst = std::max(worst, adjointness_pair_residual(ops, degree, omega, eta));
    }
  }
  return worst;
}

std::vector<Vec2> edge_displacements(const SimplicialMesh& mesh) {
  if (mesh.face_chart_coords.size() != mesh.face_count()) {
    throw Error("edge displacements need chart coordinates (mesh was not built from a chart)");
  }
  std::vector<Vec2> disp(mesh.edge_count(), Vec2::Zero());
  std::vector<bool> seen(mesh.edge_count(), false);
  for (std::size_t t = 0; t < mesh.face_count(); ++t) {
    const auto& c = mesh.face_chart_coords[t];
    for (int k = 0; k < 3; ++k) {
      const int e = mesh.face_edges[t][k];
      if (seen[e]) continue;
      seen[e] = true;
      disp[e] = mesh.face_edge_signs[t][k] * (c[(k + 1) % 3] - c[k]);
    }
  }
  return disp;
}

VectorXd coordinate_differential(const SimplicialMesh& mesh, const OperatorSet& ops, int axis) {
  const auto disp = edge_displacements(mesh);
  VectorXd out(static_cast<Eigen::Index>(ops.edge_map.size()));
  for (std::size_t k = 0; k < ops.edge_map.size(); ++k) out[k] = disp[ops.edge_map[k]][axis];
  return out;
}

VectorXd integrate_one_form(const SimplicialMesh& mesh, const OperatorSet& ops,
                            const std::function<Vec2(const Vec2&)>& components) {
  if (mesh.face_chart_coords.size() != mesh.face_count()) throw Error("integrate_one_form needs a chart mesh");
  std::vector<double> value(mesh.edge_count(), 0.0);
  std::vector<bool> seen(mesh.edge_count(), false);
  for (std::size_t t = 0; t < mesh.face_count(); ++t) {
    const auto& c = mesh.face_chart_coords[t];
    for (int k = 0; k < 3; ++k) {
      const int e = mesh.face_edges[t][k];
      if (seen[e]) continue;
      seen[e] = true;
      const Vec2 delta = mesh.face_edge_signs[t][k] * (c[(k + 1) % 3] - c[k]);
      const Vec2 start = mesh.face_edge_signs[t][k] > 0 ? c[k] : c[(k + 1) % 3];
      value[e] = components(start + 0.5 * delta).dot(delta);
    }
  }
  VectorXd out(static_cast<Eigen::Index>(ops.edge_map.size()));
  for (std::size_t k = 0; k < ops.edge_map.size(); ++k) out[k] = value[ops.edge_map[k]];
  return out;
}

std::vector<Vec2> reconstruct_face_covectors(const SimplicialMesh& mesh, const OperatorSet& ops,
                                             const VectorXd& omega) {
  if (mesh.face_chart_coords.size() != mesh.face_count()) throw Error("covector reconstruction needs a chart mesh");
  std::vector<double> full(mesh.edge_count(), 0.0);
  for (std::size_t k = 0; k < ops.edge_map.size(); ++k) full[ops.edge_map[k]] = omega[k];
  std::vector<Vec2> out(mesh.face_count());
  for (std::size_t t = 0; t < mesh.face_count(); ++t) {
    const auto& c = mesh.face_chart_coords[t];
    Eigen::Matrix<double, 3, 2> a;
    Eigen::Vector3d b;
    for (int k = 0; k < 3; ++k) {
      const Vec2 delta = c[(k + 1) % 3] - c[k];
      a.row(k) = delta.transpose();
      b[k] = mesh.face_edge_signs[t][k] * full[mesh.face_edges[t][k]];
    }
    out[t] = a.colPivHouseholderQr().solve(b);
  }
  return out;
}

std::vector<double> face_norms(const SimplicialMesh& mesh, const OperatorSet& ops, const VectorXd& omega) {
  const auto w = reconstruct_face_covectors(mesh, ops, omega);
  std::vector<double> out(w.size());
  for (std::size_t t = 0; t < w.size(); ++t) {
    out[t] = std::sqrt(std::max(0.0, mesh.face_metric[t].inverse().apply(w[t], w[t])));
  }
  return out;
}

}  // namespace fhodge
