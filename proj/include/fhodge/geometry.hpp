#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fhodge/tensor.hpp"

namespace fhodge {

enum class ScenarioName { flat_torus, flat_torus_perturbed, gaussian_plane, weighted_cylinder, cigar };

std::string_view to_string(ScenarioName name);
/// Throws ConfigError on an unknown name.
ScenarioName parse_scenario_name(std::string_view text);
const std::array<ScenarioName, 5>& all_scenarios();

struct ScenarioSpec {
  ScenarioName name = ScenarioName::flat_torus;
  std::array<int, 2> resolution{64, 64};
  /// Half-width T of truncated factors [-T, T]; ignored for compact axes.
  double truncation = 0.0;
  /// Amplitude of f = eps * cos(x) on flat_torus_perturbed.
  double epsilon = 0.3;
  /// Cigar only: R + |grad f|^2 = a. The built-in normalization has a = 4.
  std::optional<double> soliton_constant_a;

  static ScenarioSpec defaults(ScenarioName name);
  bool has_truncated_axis() const;
};

/// First Betti number of the scenario's (non-compact) manifold.
int expected_betti(ScenarioName name);
/// Dimension of the L2_f harmonic one-forms the scenario should exhibit.
int expected_harmonic_dim(ScenarioName name);

enum class AxisKind { periodic, truncated };

struct Axis {
  AxisKind kind = AxisKind::periodic;
  int count = 0;
  /// periodic: [lo, lo + period); truncated: [lo, hi] with nodes on both ends.
  double lo = 0.0;
  double hi = 0.0;

  static Axis periodic_axis(int count, double period) { return {AxisKind::periodic, count, 0.0, period}; }
  static Axis truncated_axis(int count, double half_width) {
    return {AxisKind::truncated, count, -half_width, half_width};
  }

  bool periodic() const { return kind == AxisKind::periodic; }
  double length() const { return hi - lo; }
  double spacing() const { return periodic() ? length() / count : length() / (count - 1); }
  double coord(int i) const { return lo + i * spacing(); }
  /// Number of quadrature cells along the axis.
  int cell_count() const { return periodic() ? count : count - 1; }
};

/// Analytic geometry at a chart point. metric_deriv[k] holds d_k g_ij.
struct PointFields {
  Sym2 metric;
  std::array<Sym2, 2> metric_deriv;
  double weight = 0.0;
  Vec2 weight_grad = Vec2::Zero();
  /// Covariant Hessian of f.
  Sym2 weight_hess;
  Sym2 ricci;
};

using FieldModel = std::function<PointFields(const Vec2&)>;

/// Structured two-dimensional grid on a single chart with analytic metric and weight samples.
/// Nodes are indexed with axis 0 fastest.
struct ChartGrid {
  std::string scenario;
  std::array<Axis, 2> axes;
  FieldModel model;

  std::vector<Sym2> metric;
  std::array<std::vector<Sym2>, 2> metric_deriv;
  std::vector<double> weight;
  std::optional<std::vector<Vec2>> weight_grad;
  std::optional<std::vector<Sym2>> weight_hess;
  std::optional<std::vector<Sym2>> ricci;

  int dim() const { return 2; }
  std::size_t node_count() const { return static_cast<std::size_t>(axes[0].count) * axes[1].count; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) + static_cast<std::size_t>(axes[0].count) * j; }
  Vec2 node(int i, int j) const { return {axes[0].coord(i), axes[1].coord(j)}; }
  Vec2 node(std::size_t n) const {
    return node(static_cast<int>(n % axes[0].count), static_cast<int>(n / axes[0].count));
  }
  double spacing(int axis) const { return axes[axis].spacing(); }
  /// Largest grid step, the h used in O(h^2) tolerances.
  double max_spacing() const { return std::max(spacing(0), spacing(1)); }
};

/// Samples the model on the axes. Analytic derivative and curvature fields are always filled.
ChartGrid make_grid(std::string scenario, const std::array<Axis, 2>& axes, FieldModel model);

/// Throws ConfigError when the spec is out of range (T <= 0, too few nodes).
ChartGrid build_scenario(const ScenarioSpec& spec);

/// Analytic model for a built-in scenario, usable off-grid.
FieldModel scenario_model(const ScenarioSpec& spec);

/// Checks the ChartGrid invariants (SPD metric, node minimums when `strict`).
void validate_grid(const ChartGrid& grid, bool strict);

/// Midpoint-rule approximation of the integral of e^{-f} dv over the chart domain.
double weighted_volume(const ChartGrid& grid);

/// Closed-form vol_f of the complete (untruncated) manifold; empty when it is infinite.
std::optional<double> analytic_weighted_volume(const ScenarioSpec& spec);

// ---------------------------------------------------------------------------
// Simplicial meshes

struct SimplicialMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 2>> edges;

  std::vector<double> vertex_weight;
  /// f at edge midpoints and triangle barycenters (dual-cell representative points).
  std::vector<double> edge_weight;
  std::vector<double> face_weight;

  std::vector<double> edge_length;
  std::vector<double> face_area;
  std::vector<std::array<int, 3>> face_edges;
  /// +1 when the face boundary traverses the edge along its stored orientation.
  std::vector<std::array<int, 3>> face_edge_signs;
  std::vector<bool> boundary_edge;
  std::vector<bool> boundary_vertex;

  /// Chart meshes only: unwrapped chart coordinates of each face's corners and the
  /// metric at its barycenter. Empty for meshes read from disk.
  std::vector<std::array<Vec2, 3>> face_chart_coords;
  std::vector<Sym2> face_metric;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t edge_count() const { return edges.size(); }
  std::size_t face_count() const { return triangles.size(); }
  long euler_characteristic() const {
    return static_cast<long>(vertex_count()) - static_cast<long>(edge_count()) + static_cast<long>(face_count());
  }
  bool has_boundary() const;
};

/// Builds edges, incidence signs and boundary flags from triangles. Geometry (lengths, areas)
/// must be filled separately.
void build_connectivity(SimplicialMesh& mesh);

/// Euclidean mesh from raw positions; f at midpoints/barycenters is interpolated linearly.
SimplicialMesh make_euclidean_mesh(std::vector<Eigen::Vector3d> vertices, std::vector<std::array<int, 3>> triangles,
                                   std::vector<double> vertex_weight);

/// Splits every grid cell into two counter-clockwise triangles. Rows along axis 1 are offset by
/// -h0/4 (even) and +h0/4 (odd) along axis 0, so each cell is a parallelogram cut along its short
/// diagonal; this keeps triangles acute for h1 > h0/2. Lengths use midpoint quadrature of the metric.
SimplicialMesh triangulate(const ChartGrid& grid);

/// Sum over faces of e^{-f(barycenter)} * area.
double mesh_weighted_volume(const SimplicialMesh& mesh);

}  // namespace fhodge
