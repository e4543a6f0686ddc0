#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "fhodge/chart.hpp"
#include "fhodge/errors.hpp"
#include "fhodge/verify.hpp"

using namespace fhodge;

namespace {

ChartGrid grid_for(ScenarioName name, int n) {
  auto s = ScenarioSpec::defaults(name);
  s.resolution = {n, n};
  return build_scenario(s);
}

double order(double coarse, double fine) { return std::log2(coarse / fine); }

}  // namespace

TEST(Chart, ParallelFormHasZeroCovariantDerivative) {
  const auto g = grid_for(ScenarioName::flat_torus, 32);
  const auto w = sample_one_form(g, [](const Vec2&) { return Vec2(1.0, 0.0); });
  const auto t = covariant_derivative(g, w);
  for (const auto& m : t.values) EXPECT_EQ(m.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(parallelism_residual(g, w), 0.0);
}

TEST(Chart, CovariantDerivativeOfCosineConvergesAtSecondOrder) {
  std::vector<double> err;
  for (int n : {32, 64}) {
    const auto g = grid_for(ScenarioName::flat_torus, n);
    const auto t = covariant_derivative(g, sample_one_form(g, [](const Vec2& p) { return Vec2(std::cos(p[0]), 0.0); }));
    double e = 0.0;
    for (std::size_t k = 0; k < g.node_count(); ++k) e = std::max(e, std::abs(t.values[k](0, 0) + std::sin(g.node(k)[0])));
    err.push_back(e);
  }
  EXPECT_LE(err[1], 0.2 * std::pow(2 * M_PI / 64, 2));
  EXPECT_GT(order(err[0], err[1]), 1.9);
}

TEST(Chart, CigarChristoffelSymbolsMatchConformalOracle) {
  std::vector<double> err;
  for (int n : {32, 64}) {
    const auto g = grid_for(ScenarioName::cigar, n);
    const auto gamma = christoffel(g);
    const auto t = covariant_derivative(g, sample_one_form(g, [](const Vec2&) { return Vec2(1.0, 0.0); }));
    double e = 0.0;
    for (std::size_t k = 0; k < g.node_count(); ++k) {
      const Vec2 p = g.node(k);
      // phi = -log(1 + r^2)/2, Gamma^k_ij = delta_ik phi_j + delta_jk phi_i - delta_ij phi_k
      const Vec2 dphi = -p / (1.0 + p.squaredNorm());
      for (int a = 0; a < 2; ++a)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            const double exact = (i == a ? dphi[j] : 0.0) + (j == a ? dphi[i] : 0.0) - (i == j ? dphi[a] : 0.0);
            EXPECT_NEAR(gamma[k][a](i, j), exact, 1e-12);
          }
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const double exact = -((i == 0 ? dphi[j] : 0.0) + (j == 0 ? dphi[i] : 0.0) - (i == j ? dphi[0] : 0.0));
          e = std::max(e, std::abs(t.values[k](i, j) - exact));
        }
    }
    err.push_back(e);
  }
  // dx has constant components, so only the connection term contributes
  EXPECT_LE(err[1], 1e-12);
}

TEST(Chart, BakryEmeryRicciOnBuiltins) {
  for (const auto& m : bakry_emery_ricci(grid_for(ScenarioName::flat_torus, 16))) EXPECT_EQ(m.max_abs(), 0.0);
  for (const auto& m : bakry_emery_ricci(grid_for(ScenarioName::gaussian_plane, 16))) {
    EXPECT_NEAR(m.xx, 1.0, 1e-14);
    EXPECT_NEAR(m.xy, 0.0, 1e-14);
    EXPECT_NEAR(m.yy, 1.0, 1e-14);
  }
  double cigar = 0.0;
  for (const auto& m : bakry_emery_ricci(grid_for(ScenarioName::cigar, 64))) cigar = std::max(cigar, m.max_abs());
  EXPECT_LE(cigar, 1e-6);
}

TEST(Chart, MissingCurvatureIsAnError) {
  auto g = grid_for(ScenarioName::flat_torus, 16);
  g.ricci.reset();
  EXPECT_THROW(bakry_emery_ricci(g), MissingFieldError);
}

TEST(Chart, DriftLaplacianOnConstantsAndOrnsteinUhlenbeck) {
  const auto torus = grid_for(ScenarioName::flat_torus_perturbed, 32);
  const auto c = drift_laplacian_scalar(torus, ScalarField::Constant(torus.node_count(), 3.0));
  EXPECT_LE(c.cwiseAbs().maxCoeff(), 1e-12);

  const auto g = grid_for(ScenarioName::gaussian_plane, 48);
  const auto x = sample_scalar(g, [](const Vec2& p) { return p[0]; });
  EXPECT_LE((drift_laplacian_scalar(g, x) + x).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Chart, DriftLaplacianOfSineOnPerturbedTorus) {
  std::vector<double> err;
  for (int n : {32, 64}) {
    auto s = ScenarioSpec::defaults(ScenarioName::flat_torus_perturbed);
    s.resolution = {n, n};
    const double eps = s.epsilon;
    const auto g = build_scenario(s);
    const auto u = sample_scalar(g, [](const Vec2& p) { return std::sin(p[0]); });
    const auto exact = sample_scalar(g, [eps](const Vec2& p) {
      return -std::sin(p[0]) + eps * std::sin(p[0]) * std::cos(p[0]);
    });
    err.push_back((drift_laplacian_scalar(g, u) - exact).cwiseAbs().maxCoeff());
  }
  EXPECT_GT(order(err[0], err[1]), 1.9);
}

TEST(Chart, BochnerResidualConvergesForManufacturedForms) {
  for (auto name : {ScenarioName::flat_torus_perturbed, ScenarioName::gaussian_plane}) {
    for (const auto& form : manufactured_forms(name)) {
      std::vector<double> res;
      for (int n : {32, 64}) {
        const auto g = grid_for(name, n);
        res.push_back(interior_max_abs(g, bochner_residual(g, sample_one_form(g, form.components)), 2));
      }
      EXPECT_GT(order(res[0], res[1]), 1.7) << to_string(name) << " " << form.label;
    }
  }
}

TEST(Chart, BochnerIdentityIsExactOnFlatPeriodicGrid) {
  const auto g = grid_for(ScenarioName::flat_torus, 32);
  const auto r = bochner_residual(g, sample_one_form(g, [](const Vec2& p) { return Vec2(std::cos(p[0]), 0.0); }));
  EXPECT_LE(r.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Chart, HarmonicFormsAndKatoOnPerturbedTorus) {
  // the only negative Kato gap comes from the squared discretization error of delta_f, O(h^4)
  std::vector<double> worst;
  for (int n : {64, 128}) {
    const auto g = grid_for(ScenarioName::flat_torus_perturbed, n);
    const auto forms = chart_harmonic_forms(g);
    EXPECT_EQ(forms.size(), 2u);
    double w_min = 0.0;
    for (const auto& w : forms) {
      EXPECT_LE(exterior_derivative(g, w).cwiseAbs().maxCoeff(), 1e-10);
      const auto k = kato_gap(g, w, 1e-2);
      EXPECT_FALSE(k.harmonicity_warning);
      w_min = std::min(w_min, k.min_gap);
    }
    worst.push_back(w_min);
  }
  EXPECT_GE(worst[1], -1e-6);
  EXPECT_GT(order(worst[0], worst[1]), 3.5);

  const auto g = grid_for(ScenarioName::flat_torus_perturbed, 128);
  const auto forms = chart_harmonic_forms(g);
  // dx generator: w_0 ~ e^{eps cos x} / mean, proportional to the exact harmonic form
  const double eps = 0.3;
  double ratio_min = std::numeric_limits<double>::infinity(), ratio_max = 0.0;
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    const double r = forms[0].comp[0][n] / std::exp(eps * std::cos(g.node(n)[0]));
    ratio_min = std::min(ratio_min, r);
    ratio_max = std::max(ratio_max, r);
  }
  EXPECT_LE((ratio_max - ratio_min) / ratio_max, 1e-3);
}

TEST(Chart, KatoWarnsOnNonHarmonicInput) {
  const auto g = grid_for(ScenarioName::flat_torus, 64);
  const auto w = sample_one_form(g, [](const Vec2& p) { return Vec2(2.0 + std::cos(p[0]), 0.0); });
  const auto k = kato_gap(g, w);
  EXPECT_TRUE(k.harmonicity_warning);
}

TEST(Chart, ParallelismOfZeroFormThrows) {
  const auto g = grid_for(ScenarioName::flat_torus, 16);
  EXPECT_THROW(parallelism_residual(g, sample_one_form(g, [](const Vec2&) { return Vec2(0.0, 0.0); })), Error);
}
