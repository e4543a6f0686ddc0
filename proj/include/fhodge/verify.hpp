#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fhodge/chart.hpp"
#include "fhodge/dec.hpp"
#include "fhodge/geometry.hpp"
#include "fhodge/spectral.hpp"
#include "fhodge/tolerances.hpp"

namespace fhodge {

enum class Verdict { pass, fail, unresolved, skipped, not_applicable };
std::string_view to_string(Verdict v);

struct CheckReport {
  std::string check_name;
  std::string scenario;
  std::string resolution;
  double value = 0.0;
  double tolerance = 0.0;
  /// "<=", ">=" or "==".
  std::string comparison = "<=";
  Verdict verdict = Verdict::pass;
  /// Operations that produced the value.
  std::string provenance;
  /// Supporting quantities in insertion order.
  std::vector<std::pair<std::string, double>> details;
  std::vector<std::string> notes;
};

struct VerifyOptions {
  ToleranceTable tol;
  std::uint64_t seed = 1234;
  int adjointness_trials = 100;
  std::vector<int> bochner_ladder{32, 64, 128};
  /// Kato gaps are evaluated on a chart grid refined by this factor.
  int kato_refine = 4;
  std::vector<double> cigar_truncations{4.0, 6.0, 8.0};
  /// Nodes excluded next to truncated ends when measuring Bochner residuals.
  int boundary_band = 2;
};

/// Boundary treatment of truncated factors for functions: Dirichlet on the truncated planes,
/// natural elsewhere.
BoundaryCondition function_boundary_condition(ScenarioName name);
/// Boundary treatment for one-forms: absolute (natural) where e^{-f} decays toward the truncation
/// boundary, relative (Dirichlet) where it grows.
BoundaryCondition one_form_boundary_condition(ScenarioName name);

struct ManufacturedForm {
  std::string label;
  std::function<Vec2(const Vec2&)> components;
};
/// Two smooth non-harmonic one-forms per scenario for the Bochner convergence study.
std::vector<ManufacturedForm> manufactured_forms(ScenarioName name);

/// Lazily built grid, mesh and operators for one scenario, shared across checks.
class ScenarioContext {
 public:
  ScenarioContext(ScenarioSpec spec, VerifyOptions options);

  const ScenarioSpec& spec() const { return spec_; }
  const VerifyOptions& options() const { return options_; }
  const ToleranceTable& tol() const { return options_.tol; }
  std::string resolution_label() const;

  const ChartGrid& grid();
  const SimplicialMesh& mesh();
  /// Operators with the boundary condition used for degree `degree` spectral problems.
  const OperatorSet& ops(int degree);
  const HarmonicBasis& harmonic();
  /// Harmonic basis on the coarser (or finer, when the base is minimal) companion mesh.
  const HarmonicBasis& harmonic_companion();
  std::array<int, 2> companion_resolution() const;

  HarmonicOptions harmonic_options() const;

 private:
  ScenarioSpec spec_;
  VerifyOptions options_;
  std::optional<ChartGrid> grid_;
  std::optional<SimplicialMesh> mesh_;
  std::map<BoundaryCondition, OperatorSet> ops_;
  std::optional<HarmonicBasis> harmonic_;
  std::optional<HarmonicBasis> companion_;
};

CheckReport check_adjointness(ScenarioContext& ctx);
CheckReport check_harmonic_dimension(ScenarioContext& ctx);
CheckReport check_closed_coclosed(ScenarioContext& ctx);
CheckReport check_bochner(ScenarioContext& ctx);
CheckReport check_kato(ScenarioContext& ctx);
std::vector<CheckReport> check_constant_norm_and_parallel(ScenarioContext& ctx);
CheckReport check_weighted_volume(ScenarioContext& ctx);
std::vector<CheckReport> check_vanishing(ScenarioContext& ctx);

std::vector<CheckReport> run_all_checks(const ScenarioSpec& spec, const VerifyOptions& options);

/// 0 when every verdict is pass/skipped/not_applicable, 2 when some are unresolved (and none
/// failed), 1 when any failed.
int exit_code_for(const std::vector<CheckReport>& reports);

}  // namespace fhodge
