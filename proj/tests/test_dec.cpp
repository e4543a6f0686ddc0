#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "fhodge/dec.hpp"
#include "fhodge/errors.hpp"
#include "fhodge/mesh_io.hpp"
#include "fhodge/verify.hpp"

using namespace fhodge;

namespace {

SimplicialMesh mesh_for(ScenarioName name, int n) {
  auto s = ScenarioSpec::defaults(name);
  s.resolution = {n, n};
  return triangulate(build_scenario(s));
}

double max_abs(const SparseMatrix& m) {
  double v = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) v = std::max(v, std::abs(it.value()));
  return v;
}

}  // namespace

TEST(Dec, BoundaryOfBoundaryVanishes) {
  for (auto name : all_scenarios())
    for (auto bc : {BoundaryCondition::natural, BoundaryCondition::dirichlet}) {
      const auto ops = assemble_operators(mesh_for(name, 16), bc);
      EXPECT_EQ(max_abs(ops.d1 * ops.d0), 0.0) << to_string(name);
    }
}

TEST(Dec, MassesArePositive) {
  for (auto name : all_scenarios()) {
    const auto ops = assemble_operators(mesh_for(name, 24));
    EXPECT_GT(ops.M0.minCoeff(), 0.0);
    EXPECT_GT(ops.M1.minCoeff(), 0.0);
    EXPECT_GT(ops.M2.minCoeff(), 0.0);
  }
}

TEST(Dec, CodifferentialIsAdjoint) {
  for (auto name : all_scenarios())
    for (auto bc : {BoundaryCondition::natural, BoundaryCondition::dirichlet}) {
      const auto ops = assemble_operators(mesh_for(name, 24), bc);
      EXPECT_LE(adjointness_residual(ops, 100, 7), 1e-12) << to_string(name);
    }
}

TEST(Dec, AdjointnessAgainstExplicitInnerProducts) {
  const auto ops = assemble_operators(mesh_for(ScenarioName::cigar, 16), BoundaryCondition::dirichlet);
  const VectorXd u = VectorXd::LinSpaced(ops.count(0), -1.0, 2.0).array().sin();
  const VectorXd w = VectorXd::LinSpaced(ops.count(1), 0.0, 5.0).array().cos();
  const double lhs = (ops.d0 * u).dot(ops.M1.asDiagonal() * w);
  const double rhs = u.dot(ops.M0.asDiagonal() * (ops.delta_f_1 * w));
  EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(lhs)));
}

TEST(Dec, ConstantsAreInTheKernelWithNaturalBoundary) {
  for (auto name : all_scenarios()) {
    const auto ops = assemble_operators(mesh_for(name, 16));
    const VectorXd one = VectorXd::Ones(ops.count(0));
    EXPECT_LE((ops.L_f_0 * one).cwiseAbs().maxCoeff(), 1e-10) << to_string(name);
  }
}

TEST(Dec, DirichletRemovesBoundarySimplices) {
  const auto mesh = mesh_for(ScenarioName::gaussian_plane, 16);
  const auto ops = assemble_operators(mesh, BoundaryCondition::dirichlet);
  EXPECT_EQ(ops.count(0), 14 * 14);
  for (int v : ops.vertex_map) EXPECT_FALSE(mesh.boundary_vertex[v]);
  for (int e : ops.edge_map) EXPECT_FALSE(mesh.boundary_edge[e]);
}

TEST(Dec, CoordinateDifferentialIsHarmonicOnFlatTorus) {
  const auto mesh = mesh_for(ScenarioName::flat_torus, 32);
  const auto ops = assemble_operators(mesh);
  for (int axis : {0, 1}) {
    const VectorXd dx = coordinate_differential(mesh, ops, axis);
    EXPECT_LE((ops.d1 * dx).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LE((ops.delta_f_1 * dx).cwiseAbs().maxCoeff(), 1e-11);
  }
}

TEST(Dec, ExactFormsIntegrateConsistently) {
  const auto mesh = mesh_for(ScenarioName::weighted_cylinder, 32);
  const auto ops = assemble_operators(mesh);
  // d(sin(theta) t) integrated edge by edge vs d0 applied to vertex samples
  VectorXd u(ops.count(0));
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const auto& p = mesh.vertices[ops.vertex_map[i]];
    u[i] = std::sin(p[0]) * p[1];
  }
  const VectorXd du = ops.d0 * u;
  const VectorXd w = integrate_one_form(mesh, ops, [](const Vec2& p) {
    return Vec2(std::cos(p[0]) * p[1], std::sin(p[0]));
  });
  EXPECT_LE((du - w).cwiseAbs().maxCoeff(), 1e-2);
}

TEST(Dec, MeshVolumeMatchesChartVolume) {
  auto s = ScenarioSpec::defaults(ScenarioName::flat_torus_perturbed);
  s.resolution = {48, 48};
  const auto g = build_scenario(s);
  EXPECT_NEAR(mesh_weighted_volume(triangulate(g)) / weighted_volume(g), 1.0, 1e-3);
}

TEST(Dec, RejectsInconsistentOrientation) {
  std::vector<Eigen::Vector3d> v{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, -1, 0}};
  EXPECT_THROW(
      {
        const auto mesh = make_euclidean_mesh(v, {{0, 1, 2}, {0, 1, 3}}, {0, 0, 0, 0});
        incidence_matrices(mesh);
      },
      StructuralError);
}

TEST(Dec, OffRoundTrip) {
  auto s = ScenarioSpec::defaults(ScenarioName::gaussian_plane);
  s.resolution = {16, 16};
  const auto mesh = triangulate(build_scenario(s));
  const auto path = (std::filesystem::temp_directory_path() / "fhodge_roundtrip.off").string();
  write_off(mesh, path);
  const auto back = read_off(path);
  EXPECT_EQ(back.vertex_count(), mesh.vertex_count());
  EXPECT_EQ(back.face_count(), mesh.face_count());
  EXPECT_EQ(back.euler_characteristic(), 1);
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i)
    EXPECT_NEAR(back.vertex_weight[i], mesh.vertex_weight[i], 1e-12);
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".weights");
}
