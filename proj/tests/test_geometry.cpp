#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fhodge/chart.hpp"
#include "fhodge/dec.hpp"
#include "fhodge/errors.hpp"
#include "fhodge/geometry.hpp"

using namespace fhodge;

namespace {

ScenarioSpec spec_at(ScenarioName name, int n) {
  auto s = ScenarioSpec::defaults(name);
  s.resolution = {n, n};
  return s;
}

}  // namespace

TEST(Geometry, TorusTriangulationCounts) {
  const auto model = scenario_model(ScenarioSpec::defaults(ScenarioName::flat_torus));
  const double L = 2.0 * std::numbers::pi;
  const auto grid = make_grid("torus4", {Axis::periodic_axis(4, L), Axis::periodic_axis(4, L)}, model);
  const auto mesh = triangulate(grid);
  EXPECT_EQ(mesh.vertex_count(), 16u);
  EXPECT_EQ(mesh.edge_count(), 48u);
  EXPECT_EQ(mesh.face_count(), 32u);
  EXPECT_EQ(mesh.euler_characteristic(), 0);
  EXPECT_FALSE(mesh.has_boundary());
}

TEST(Geometry, TruncatedPatchIsADisk) {
  const auto model = scenario_model(ScenarioSpec::defaults(ScenarioName::gaussian_plane));
  const auto grid = make_grid("patch3", {Axis::truncated_axis(3, 1.0), Axis::truncated_axis(3, 1.0)}, model);
  const auto mesh = triangulate(grid);
  EXPECT_EQ(mesh.vertex_count(), 9u);
  EXPECT_EQ(mesh.euler_characteristic(), 1);
  EXPECT_TRUE(mesh.has_boundary());
}

TEST(Geometry, InteriorEdgesTraversedOncePerDirection) {
  for (auto name : all_scenarios()) {
    const auto mesh = triangulate(build_scenario(spec_at(name, 16)));
    std::vector<int> sum(mesh.edge_count(), 0), uses(mesh.edge_count(), 0);
    for (std::size_t t = 0; t < mesh.face_count(); ++t)
      for (int k = 0; k < 3; ++k) {
        sum[mesh.face_edges[t][k]] += mesh.face_edge_signs[t][k];
        ++uses[mesh.face_edges[t][k]];
      }
    for (std::size_t e = 0; e < mesh.edge_count(); ++e) {
      if (mesh.boundary_edge[e]) {
        EXPECT_EQ(uses[e], 1);
      } else {
        EXPECT_EQ(uses[e], 2);
        EXPECT_EQ(sum[e], 0) << to_string(name) << " edge " << e;
      }
    }
    for (double a : mesh.face_area) EXPECT_GT(a, 0.0);
  }
}

TEST(Geometry, FlatTorusFieldsAreTrivial) {
  const auto g = build_scenario(spec_at(ScenarioName::flat_torus, 32));
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    EXPECT_EQ(g.metric[n].xx, 1.0);
    EXPECT_EQ(g.metric[n].xy, 0.0);
    EXPECT_EQ(g.metric[n].yy, 1.0);
    EXPECT_EQ(g.weight[n], 0.0);
  }
}

TEST(Geometry, GaussianWeightValues) {
  const auto g = build_scenario(spec_at(ScenarioName::gaussian_plane, 65));
  EXPECT_NEAR(g.weight[g.index(32, 32)], 0.0, 1e-14);
  EXPECT_NEAR(g.weight[g.index(64, 32)], 18.0, 1e-12);
}

TEST(Geometry, CigarFieldsMatchConformalFormulas) {
  const auto g = build_scenario(spec_at(ScenarioName::cigar, 64));
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    const Vec2 p = g.node(n);
    const double q = 1.0 + p.squaredNorm();
    EXPECT_NEAR(g.metric[n].xx, 1.0 / q, 1e-15);
    EXPECT_NEAR(g.weight[n], -std::log(q), 1e-13);
    // g = e^{2 phi} I with phi = -log(q)/2: Gaussian curvature -e^{-2 phi} Lap(phi) = 2/q.
    const double K = 2.0 / q;
    EXPECT_NEAR((*g.ricci)[n].xx, K / q, 1e-13);
    EXPECT_NEAR((*g.ricci)[n].xy, 0.0, 1e-13);
  }
}

TEST(Geometry, CigarHessianMatchesFiniteDifferenceOracle) {
  const auto spec = spec_at(ScenarioName::cigar, 64);
  const auto model = scenario_model(spec);
  auto f = [](double x, double y) { return -std::log(1.0 + x * x + y * y); };
  auto phi = [](double x, double y) { return -0.5 * std::log(1.0 + x * x + y * y); };
  const double e = 1e-4;
  for (Vec2 p : {Vec2(0.3, -0.7), Vec2(2.0, 1.5), Vec2(-5.0, 3.0)}) {
    const double x = p[0], y = p[1];
    const Vec2 df{(f(x + e, y) - f(x - e, y)) / (2 * e), (f(x, y + e) - f(x, y - e)) / (2 * e)};
    const Vec2 dphi{(phi(x + e, y) - phi(x - e, y)) / (2 * e), (phi(x, y + e) - phi(x, y - e)) / (2 * e)};
    Mat2 d2f;
    d2f(0, 0) = (f(x + e, y) - 2 * f(x, y) + f(x - e, y)) / (e * e);
    d2f(1, 1) = (f(x, y + e) - 2 * f(x, y) + f(x, y - e)) / (e * e);
    d2f(0, 1) = d2f(1, 0) =
        (f(x + e, y + e) - f(x + e, y - e) - f(x - e, y + e) + f(x - e, y - e)) / (4 * e * e);
    const auto pf = model(p);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double h = d2f(i, j);
        for (int k = 0; k < 2; ++k) {
          const double gamma = (i == k ? dphi[j] : 0.0) + (j == k ? dphi[i] : 0.0) - (i == j ? dphi[k] : 0.0);
          h -= gamma * df[k];
        }
        EXPECT_NEAR(pf.weight_hess(i, j), h, 1e-6) << "at " << p.transpose();
        EXPECT_NEAR(pf.ricci(i, j) + pf.weight_hess(i, j), 0.0, 1e-12);
      }
  }
}

TEST(Geometry, AnalyticWeightGradientAgreesWithDifferencesToSecondOrder) {
  std::vector<double> err;
  for (int n : {32, 64}) {
    const auto g = build_scenario(spec_at(ScenarioName::flat_torus_perturbed, n));
    const auto fx = first_derivative(g, 0, Eigen::Map<const Eigen::VectorXd>(g.weight.data(), g.weight.size()));
    double m = 0.0;
    for (std::size_t k = 0; k < g.node_count(); ++k) m = std::max(m, std::abs(fx[k] - (*g.weight_grad)[k][0]));
    err.push_back(m);
  }
  EXPECT_GT(std::log2(err[0] / err[1]), 1.9);
}

TEST(Geometry, WeightedVolumes) {
  const auto torus = build_scenario(spec_at(ScenarioName::flat_torus, 32));
  EXPECT_NEAR(weighted_volume(torus), 4.0 * std::numbers::pi * std::numbers::pi, 1e-10);

  auto s = spec_at(ScenarioName::gaussian_plane, 128);
  s.truncation = 8.0;
  EXPECT_NEAR(weighted_volume(build_scenario(s)) / (2.0 * std::numbers::pi), 1.0, 5e-3);

  const auto cyl = ScenarioSpec::defaults(ScenarioName::weighted_cylinder);
  EXPECT_NEAR(*analytic_weighted_volume(cyl), 2.0 * std::numbers::pi * std::sqrt(std::numbers::pi), 1e-12);
  EXPECT_FALSE(analytic_weighted_volume(ScenarioSpec::defaults(ScenarioName::cigar)).has_value());
}

TEST(Geometry, VolumeConvergesAtSecondOrder) {
  const double exact = 2.0 * std::numbers::pi * std::sqrt(std::numbers::pi);
  auto err = [&](int n) {
    auto s = spec_at(ScenarioName::weighted_cylinder, n);
    s.truncation = 10.0;
    return std::abs(weighted_volume(build_scenario(s)) - exact);
  };
  EXPECT_GT(std::log2(err(16) / err(32)), 1.8);
}

TEST(Geometry, RejectsBadSpecs) {
  EXPECT_THROW(parse_scenario_name("klein_bottle"), ConfigError);
  auto s = ScenarioSpec::defaults(ScenarioName::gaussian_plane);
  s.truncation = 0.0;
  EXPECT_THROW(build_scenario(s), ConfigError);
  s = ScenarioSpec::defaults(ScenarioName::flat_torus);
  s.resolution = {4, 32};
  EXPECT_THROW(build_scenario(s), ConfigError);
  s = ScenarioSpec::defaults(ScenarioName::cigar);
  s.resolution = {64, 8};
  EXPECT_THROW(build_scenario(s), ConfigError);
}

TEST(Geometry, ExpectedDimensions) {
  EXPECT_EQ(expected_harmonic_dim(ScenarioName::flat_torus), 2);
  EXPECT_EQ(expected_harmonic_dim(ScenarioName::flat_torus_perturbed), 2);
  EXPECT_EQ(expected_harmonic_dim(ScenarioName::weighted_cylinder), 1);
  EXPECT_EQ(expected_harmonic_dim(ScenarioName::gaussian_plane), 0);
  EXPECT_EQ(expected_harmonic_dim(ScenarioName::cigar), 0);
  for (auto name : all_scenarios()) EXPECT_EQ(parse_scenario_name(to_string(name)), name);
}
