#include "fhodge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <utility>

#include "fhodge/errors.hpp"

namespace fhodge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

PointFields flat_fields(double f, const Vec2& grad, const Sym2& hess) {
  PointFields p;
  p.metric = Sym2::identity();
  p.weight = f;
  p.weight_grad = grad;
  p.weight_hess = hess;
  return p;
}

FieldModel torus_model(double eps) {
  return [eps](const Vec2& x) {
    return flat_fields(eps * std::cos(x[0]), Vec2(-eps * std::sin(x[0]), 0.0), Sym2::diagonal(-eps * std::cos(x[0]), 0.0));
  };
}

FieldModel gaussian_model() {
  return [](const Vec2& x) { return flat_fields(0.5 * x.squaredNorm(), x, Sym2::identity()); };
}

// Coordinates (theta, t), f = t^2.
FieldModel cylinder_model() {
  return [](const Vec2& x) {
    const double t = x[1];
    return flat_fields(t * t, Vec2(0.0, 2.0 * t), Sym2::diagonal(0.0, 2.0));
  };
}

// Plane chart of the cigar: g = c (1+r^2)^{-1} I, f = -log(1+r^2), c = 4/a.
// Ric = 2/(1+r^2)^2 I and Hess f = -2/(1+r^2)^2 I are both invariant under constant rescaling.
FieldModel cigar_model(double a) {
  const double c = 4.0 / a;
  return [c](const Vec2& x) {
    const double q = 1.0 + x.squaredNorm();
    PointFields p;
    p.metric = Sym2::identity(c / q);
    for (int k = 0; k < 2; ++k) p.metric_deriv[k] = Sym2::identity(-2.0 * c * x[k] / (q * q));
    p.weight = -std::log(q);
    p.weight_grad = -2.0 * x / q;
    p.weight_hess = Sym2::identity(-2.0 / (q * q));
    p.ricci = Sym2::identity(2.0 / (q * q));
    return p;
  };
}

double default_truncation(ScenarioName name) {
  switch (name) {
    case ScenarioName::gaussian_plane:
    case ScenarioName::weighted_cylinder:
      return 6.0;
    case ScenarioName::cigar:
      return 8.0;
    default:
      return 0.0;
  }
}

std::array<Axis, 2> scenario_axes(const ScenarioSpec& spec) {
  const auto [n0, n1] = spec.resolution;
  const double T = spec.truncation;
  switch (spec.name) {
    case ScenarioName::flat_torus:
    case ScenarioName::flat_torus_perturbed:
      return {Axis::periodic_axis(n0, kTwoPi), Axis::periodic_axis(n1, kTwoPi)};
    case ScenarioName::weighted_cylinder:
      return {Axis::periodic_axis(n0, kTwoPi), Axis::truncated_axis(n1, T)};
    case ScenarioName::gaussian_plane:
    case ScenarioName::cigar:
      return {Axis::truncated_axis(n0, T), Axis::truncated_axis(n1, T)};
  }
  throw ConfigError("unhandled scenario");
}

// Kahan's stable Heron formula.
double triangle_area(double a, double b, double c) {
  std::array<double, 3> l{a, b, c};
  std::sort(l.begin(), l.end(), std::greater<>());
  const auto [x, y, z] = l;
  const double p = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
  return p > 0.0 ? 0.25 * std::sqrt(p) : 0.0;
}

void fill_face_areas(SimplicialMesh& mesh) {
  mesh.face_area.resize(mesh.face_count());
  for (std::size_t t = 0; t < mesh.face_count(); ++t) {
    const auto& fe = mesh.face_edges[t];
    const double area =
        triangle_area(mesh.edge_length[fe[0]], mesh.edge_length[fe[1]], mesh.edge_length[fe[2]]);
    if (!(area > 0.0)) {
      const auto& tri = mesh.triangles[t];
      std::ostringstream os;
      os << "degenerate triangle " << t << " (" << tri[0] << ", " << tri[1] << ", " << tri[2] << ")";
      throw StructuralError(os.str());
    }
    mesh.face_area[t] = area;
  }
}

}  // namespace

std::string_view to_string(ScenarioName name) {
  switch (name) {
    case ScenarioName::flat_torus: return "flat_torus";
    case ScenarioName::flat_torus_perturbed: return "flat_torus_perturbed";
    case ScenarioName::gaussian_plane: return "gaussian_plane";
    case ScenarioName::weighted_cylinder: return "weighted_cylinder";
    case ScenarioName::cigar: return "cigar";
  }
  return "unknown";
}

const std::array<ScenarioName, 5>& all_scenarios() {
  static const std::array<ScenarioName, 5> names{ScenarioName::flat_torus, ScenarioName::flat_torus_perturbed,
                                                 ScenarioName::gaussian_plane, ScenarioName::weighted_cylinder,
                                                 ScenarioName::cigar};
  return names;
}

ScenarioName parse_scenario_name(std::string_view text) {
  for (auto name : all_scenarios()) {
    if (to_string(name) == text) return name;
  }
  throw ConfigError("unknown scenario '" + std::string(text) + "'");
}

ScenarioSpec ScenarioSpec::defaults(ScenarioName name) {
  ScenarioSpec spec;
  spec.name = name;
  spec.truncation = default_truncation(name);
  if (name == ScenarioName::cigar) spec.soliton_constant_a = 4.0;
  return spec;
}

bool ScenarioSpec::has_truncated_axis() const {
  return name == ScenarioName::gaussian_plane || name == ScenarioName::weighted_cylinder || name == ScenarioName::cigar;
}

int expected_betti(ScenarioName name) {
  switch (name) {
    case ScenarioName::flat_torus:
    case ScenarioName::flat_torus_perturbed:
      return 2;
    case ScenarioName::weighted_cylinder:
      return 1;
    default:
      return 0;
  }
}

int expected_harmonic_dim(ScenarioName name) { return expected_betti(name); }

FieldModel scenario_model(const ScenarioSpec& spec) {
  switch (spec.name) {
    case ScenarioName::flat_torus: return torus_model(0.0);
    case ScenarioName::flat_torus_perturbed: return torus_model(spec.epsilon);
    case ScenarioName::gaussian_plane: return gaussian_model();
    case ScenarioName::weighted_cylinder: return cylinder_model();
    case ScenarioName::cigar: return cigar_model(spec.soliton_constant_a.value_or(4.0));
  }
  throw ConfigError("unhandled scenario");
}

ChartGrid make_grid(std::string scenario, const std::array<Axis, 2>& axes, FieldModel model) {
  ChartGrid grid;
  grid.scenario = std::move(scenario);
  grid.axes = axes;
  grid.model = std::move(model);
  const std::size_t n = grid.node_count();
  grid.metric.resize(n);
  grid.metric_deriv[0].resize(n);
  grid.metric_deriv[1].resize(n);
  grid.weight.resize(n);
  std::vector<Vec2> grad(n);
  std::vector<Sym2> hess(n), ricci(n);
  for (std::size_t k = 0; k < n; ++k) {
    const PointFields p = grid.model(grid.node(k));
    grid.metric[k] = p.metric;
    grid.metric_deriv[0][k] = p.metric_deriv[0];
    grid.metric_deriv[1][k] = p.metric_deriv[1];
    grid.weight[k] = p.weight;
    grad[k] = p.weight_grad;
    hess[k] = p.weight_hess;
    ricci[k] = p.ricci;
  }
  grid.weight_grad = std::move(grad);
  grid.weight_hess = std::move(hess);
  grid.ricci = std::move(ricci);
  return grid;
}

void validate_grid(const ChartGrid& grid, bool strict) {
  for (int a = 0; a < 2; ++a) {
    const Axis& ax = grid.axes[a];
    const int minimum = strict ? (ax.periodic() ? 8 : 16) : (ax.periodic() ? 3 : 2);
    if (ax.count < minimum) {
      std::ostringstream os;
      os << "axis " << a << " has " << ax.count << " nodes; at least " << minimum << " required for a "
         << (ax.periodic() ? "periodic" : "truncated") << " axis";
      throw ConfigError(os.str());
    }
    if (!(ax.length() > 0.0)) throw ConfigError("axis " + std::to_string(a) + " has non-positive extent");
  }
  for (std::size_t k = 0; k < grid.metric.size(); ++k) {
    if (!(grid.metric[k].min_eigenvalue() > 0.0)) {
      throw ConfigError("metric is not positive definite at node " + std::to_string(k));
    }
  }
}

ChartGrid build_scenario(const ScenarioSpec& spec) {
  if (spec.has_truncated_axis() && !(spec.truncation > 0.0)) {
    throw ConfigError("truncation T must be positive for " + std::string(to_string(spec.name)));
  }
  if (spec.name == ScenarioName::cigar && spec.soliton_constant_a && !(*spec.soliton_constant_a > 0.0)) {
    throw ConfigError("soliton constant a must be positive");
  }
  if (!std::isfinite(spec.epsilon)) throw ConfigError("epsilon must be finite");
  ChartGrid grid = make_grid(std::string(to_string(spec.name)), scenario_axes(spec), scenario_model(spec));
  validate_grid(grid, true);
  return grid;
}

double weighted_volume(const ChartGrid& grid) {
  const Axis& a0 = grid.axes[0];
  const Axis& a1 = grid.axes[1];
  const double h0 = a0.spacing();
  const double h1 = a1.spacing();
  double sum = 0.0;
  for (int j = 0; j < a1.cell_count(); ++j) {
    for (int i = 0; i < a0.cell_count(); ++i) {
      const Vec2 center(a0.coord(i) + 0.5 * h0, a1.coord(j) + 0.5 * h1);
      const PointFields p = grid.model(center);
      sum += std::exp(-p.weight) * std::sqrt(p.metric.det());
    }
  }
  return sum * h0 * h1;
}

std::optional<double> analytic_weighted_volume(const ScenarioSpec& spec) {
  switch (spec.name) {
    case ScenarioName::flat_torus:
      return kTwoPi * kTwoPi;
    case ScenarioName::flat_torus_perturbed:
      // int_0^{2pi} e^{-eps cos x} dx = 2 pi I_0(eps)
      return kTwoPi * kTwoPi * std::cyl_bessel_i(0.0, spec.epsilon);
    case ScenarioName::gaussian_plane:
      return kTwoPi;
    case ScenarioName::weighted_cylinder:
      return kTwoPi * std::sqrt(std::numbers::pi);
    case ScenarioName::cigar:
      return std::nullopt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

bool SimplicialMesh::has_boundary() const {
  return std::any_of(boundary_edge.begin(), boundary_edge.end(), [](bool b) { return b; });
}

void build_connectivity(SimplicialMesh& mesh) {
  std::map<std::pair<int, int>, int> lookup;
  mesh.edges.clear();
  mesh.face_edges.assign(mesh.face_count(), {});
  mesh.face_edge_signs.assign(mesh.face_count(), {});
  std::vector<int> face_uses;
  for (std::size_t t = 0; t < mesh.face_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k];
      const int b = tri[(k + 1) % 3];
      if (a == b) throw StructuralError("triangle " + std::to_string(t) + " repeats a vertex");
      const auto key = std::minmax(a, b);
      auto [it, inserted] = lookup.try_emplace({key.first, key.second}, static_cast<int>(mesh.edges.size()));
      if (inserted) {
        mesh.edges.push_back({key.first, key.second});
        face_uses.push_back(0);
      }
      mesh.face_edges[t][k] = it->second;
      mesh.face_edge_signs[t][k] = (a == key.first) ? 1 : -1;
      ++face_uses[it->second];
    }
  }
  mesh.boundary_edge.assign(mesh.edge_count(), false);
  mesh.boundary_vertex.assign(mesh.vertex_count(), false);
  for (std::size_t e = 0; e < mesh.edge_count(); ++e) {
    if (face_uses[e] == 1) {
      mesh.boundary_edge[e] = true;
      mesh.boundary_vertex[mesh.edges[e][0]] = true;
      mesh.boundary_vertex[mesh.edges[e][1]] = true;
    }
  }
}

SimplicialMesh make_euclidean_mesh(std::vector<Eigen::Vector3d> vertices, std::vector<std::array<int, 3>> triangles,
                                   std::vector<double> vertex_weight) {
  SimplicialMesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.triangles = std::move(triangles);
  if (vertex_weight.empty()) vertex_weight.assign(mesh.vertex_count(), 0.0);
  if (vertex_weight.size() != mesh.vertex_count()) throw StructuralError("vertex weight count mismatch");
  mesh.vertex_weight = std::move(vertex_weight);
  for (const auto& tri : mesh.triangles) {
    for (int v : tri) {
      if (v < 0 || static_cast<std::size_t>(v) >= mesh.vertex_count()) {
        throw StructuralError("triangle references vertex " + std::to_string(v) + " out of range");
      }
    }
  }
  build_connectivity(mesh);

  mesh.edge_length.resize(mesh.edge_count());
  mesh.edge_weight.resize(mesh.edge_count());
  for (std::size_t e = 0; e < mesh.edge_count(); ++e) {
    const auto [a, b] = mesh.edges[e];
    mesh.edge_length[e] = (mesh.vertices[b] - mesh.vertices[a]).norm();
    mesh.edge_weight[e] = 0.5 * (mesh.vertex_weight[a] + mesh.vertex_weight[b]);
  }
  fill_face_areas(mesh);

  const bool planar = std::all_of(mesh.vertices.begin(), mesh.vertices.end(),
                                  [](const Eigen::Vector3d& v) { return v.z() == 0.0; });
  mesh.face_weight.resize(mesh.face_count());
  for (std::size_t t = 0; t < mesh.face_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    mesh.face_weight[t] =
        (mesh.vertex_weight[tri[0]] + mesh.vertex_weight[tri[1]] + mesh.vertex_weight[tri[2]]) / 3.0;
    if (planar) {
      std::array<Vec2, 3> c;
      for (int k = 0; k < 3; ++k) c[k] = mesh.vertices[tri[k]].head<2>();
      mesh.face_chart_coords.push_back(c);
      mesh.face_metric.push_back(Sym2::identity());
    }
  }
  return mesh;
}

SimplicialMesh triangulate(const ChartGrid& grid) {
  validate_grid(grid, false);
  const Axis& a0 = grid.axes[0];
  const Axis& a1 = grid.axes[1];
  if (a1.periodic() && a1.count % 2 != 0) {
    throw ConfigError("triangulate needs an even node count on a periodic axis 1 (row offsets alternate)");
  }
  const int n0 = a0.count;
  const int n1 = a1.count;
  const double h0 = a0.spacing();
  auto row_shift = [h0](int j) { return (j % 2 == 0) ? -0.25 * h0 : 0.25 * h0; };
  auto vid = [n0](int i, int j) { return i + n0 * j; };

  SimplicialMesh mesh;
  mesh.vertices.resize(static_cast<std::size_t>(n0) * n1);
  mesh.vertex_weight.resize(mesh.vertices.size());
  for (int j = 0; j < n1; ++j) {
    for (int i = 0; i < n0; ++i) {
      const Vec2 p(a0.coord(i) + row_shift(j), a1.coord(j));
      mesh.vertices[vid(i, j)] = Eigen::Vector3d(p[0], p[1], 0.0);
      mesh.vertex_weight[vid(i, j)] = grid.model(p).weight;
    }
  }

  std::vector<std::array<Vec2, 3>> coords;
  for (int j = 0; j < a1.cell_count(); ++j) {
    const int jp = (j + 1) % n1;
    const double y0 = a1.coord(j);
    const double y1 = y0 + a1.spacing();
    for (int i = 0; i < a0.cell_count(); ++i) {
      const int ip = (i + 1) % n0;
      const Vec2 pa(a0.coord(i) + row_shift(j), y0);
      const Vec2 pb = pa + Vec2(h0, 0.0);
      const Vec2 pd(a0.coord(i) + row_shift(j + 1), y1);
      const Vec2 pc = pd + Vec2(h0, 0.0);
      const int va = vid(i, j), vb = vid(ip, j), vc = vid(ip, jp), vd = vid(i, jp);
      if (j % 2 == 0) {
        mesh.triangles.push_back({va, vb, vd});
        coords.push_back({pa, pb, pd});
        mesh.triangles.push_back({vb, vc, vd});
        coords.push_back({pb, pc, pd});
      } else {
        mesh.triangles.push_back({va, vb, vc});
        coords.push_back({pa, pb, pc});
        mesh.triangles.push_back({va, vc, vd});
        coords.push_back({pa, pc, pd});
      }
    }
  }
  build_connectivity(mesh);

  mesh.edge_length.assign(mesh.edge_count(), -1.0);
  mesh.edge_weight.assign(mesh.edge_count(), 0.0);
  mesh.face_weight.resize(mesh.face_count());
  mesh.face_metric.resize(mesh.face_count());
  for (std::size_t t = 0; t < mesh.face_count(); ++t) {
    const auto& c = coords[t];
    for (int k = 0; k < 3; ++k) {
      const int e = mesh.face_edges[t][k];
      if (mesh.edge_length[e] >= 0.0) continue;
      const Vec2 delta = c[(k + 1) % 3] - c[k];
      const PointFields mid = grid.model(c[k] + 0.5 * delta);
      mesh.edge_length[e] = std::sqrt(mid.metric.apply(delta, delta));
      mesh.edge_weight[e] = mid.weight;
    }
    const PointFields bary = grid.model((c[0] + c[1] + c[2]) / 3.0);
    mesh.face_weight[t] = bary.weight;
    mesh.face_metric[t] = bary.metric;
  }
  mesh.face_chart_coords = std::move(coords);
  fill_face_areas(mesh);
  return mesh;
}

double mesh_weighted_volume(const SimplicialMesh& mesh) {
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.face_count(); ++t) sum += std::exp(-mesh.face_weight[t]) * mesh.face_area[t];
  return sum;
}

}  // namespace fhodge
