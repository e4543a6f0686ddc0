#include "fhodge/chart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "fhodge/errors.hpp"
#include "fhodge/mesh_io.hpp"

namespace fhodge {

namespace {

using Eigen::Index;

struct AxisWalker {
  const ChartGrid& grid;
  int axis;

  int count() const { return grid.axes[axis].count; }
  bool periodic() const { return grid.axes[axis].periodic(); }
  int position(std::size_t n) const {
    const int n0 = grid.axes[0].count;
    return axis == 0 ? static_cast<int>(n % n0) : static_cast<int>(n / n0);
  }
  // Node at offset k along the axis, wrapping on periodic axes.
  std::size_t shifted(std::size_t n, int k) const {
    const int N = count();
    int m = position(n) + k;
    if (periodic()) m = ((m % N) + N) % N;
    const int n0 = grid.axes[0].count;
    const int i = axis == 0 ? m : static_cast<int>(n % n0);
    const int j = axis == 0 ? static_cast<int>(n / n0) : m;
    return grid.index(i, j);
  }
};

ScalarField sqrt_det(const ChartGrid& grid) {
  ScalarField s(grid.node_count());
  for (std::size_t n = 0; n < grid.node_count(); ++n) s[n] = std::sqrt(grid.metric[n].det());
  return s;
}

// X^i = g^ij f_j.
std::vector<Vec2> drift_field(const ChartGrid& grid) {
  const auto df = weight_gradient(grid);
  std::vector<Vec2> x(df.size());
  for (std::size_t n = 0; n < df.size(); ++n) x[n] = grid.metric[n].inverse() * df[n];
  return x;
}

}  // namespace

ScalarField first_derivative(const ChartGrid& grid, int axis, const ScalarField& u) {
  const AxisWalker w{grid, axis};
  const double h = grid.spacing(axis);
  const int N = w.count();
  ScalarField out(u.size());
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const int m = w.position(n);
    auto at = [&](int k) { return u[static_cast<Index>(w.shifted(n, k))]; };
    if (w.periodic() || (m > 0 && m < N - 1)) {
      out[n] = (at(1) - at(-1)) / (2.0 * h);
    } else if (m == 0) {
      out[n] = (-11.0 * at(0) + 18.0 * at(1) - 9.0 * at(2) + 2.0 * at(3)) / (6.0 * h);
    } else {
      out[n] = (11.0 * at(0) - 18.0 * at(-1) + 9.0 * at(-2) - 2.0 * at(-3)) / (6.0 * h);
    }
  }
  return out;
}

ScalarField second_derivative(const ChartGrid& grid, int axis, const ScalarField& u) {
  const AxisWalker w{grid, axis};
  const double h2 = grid.spacing(axis) * grid.spacing(axis);
  const int N = w.count();
  ScalarField out(u.size());
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const int m = w.position(n);
    auto at = [&](int k) { return u[static_cast<Index>(w.shifted(n, k))]; };
    if (w.periodic() || (m > 0 && m < N - 1)) {
      out[n] = (at(1) - 2.0 * at(0) + at(-1)) / h2;
    } else if (m == 0) {
      out[n] = (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / h2;
    } else {
      out[n] = (2.0 * at(0) - 5.0 * at(-1) + 4.0 * at(-2) - at(-3)) / h2;
    }
  }
  return out;
}

ScalarField sample_scalar(const ChartGrid& grid, const std::function<double(const Vec2&)>& fn) {
  ScalarField u(grid.node_count());
  for (std::size_t n = 0; n < grid.node_count(); ++n) u[n] = fn(grid.node(n));
  return u;
}

OneFormField sample_one_form(const ChartGrid& grid, const std::function<Vec2(const Vec2&)>& components) {
  OneFormField w;
  w.comp = {ScalarField(grid.node_count()), ScalarField(grid.node_count())};
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const Vec2 c = components(grid.node(n));
    w.comp[0][n] = c[0];
    w.comp[1][n] = c[1];
  }
  return w;
}

std::vector<Christoffel> christoffel(const ChartGrid& grid) {
  std::vector<Christoffel> out(grid.node_count());
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const Sym2 ginv = grid.metric[n].inverse();
    const auto& dg = grid.metric_deriv;
    for (int k = 0; k < 2; ++k) {
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          double s = 0.0;
          for (int l = 0; l < 2; ++l)
            s += ginv(k, l) * (dg[i][n](j, l) + dg[j][n](i, l) - dg[l][n](i, j));
          out[n][k](i, j) = 0.5 * s;
        }
      }
    }
  }
  return out;
}

TensorField covariant_derivative(const ChartGrid& grid, const OneFormField& omega) {
  const auto gamma = christoffel(grid);
  std::array<std::array<ScalarField, 2>, 2> d;  // d[i][j] = d_j omega_i
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) d[i][j] = first_derivative(grid, j, omega.comp[i]);
  TensorField t;
  t.values.resize(grid.node_count());
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        t.values[n](i, j) = d[i][j][n] - gamma[n][0](i, j) * omega.comp[0][n] - gamma[n][1](i, j) * omega.comp[1][n];
      }
    }
  }
  return t;
}

std::vector<Sym2> bakry_emery_ricci(const ChartGrid& grid) {
  if (!grid.ricci) throw MissingFieldError("grid '" + grid.scenario + "' has no analytic Ricci field");
  if (!grid.weight_hess) throw MissingFieldError("grid '" + grid.scenario + "' has no analytic Hess f field");
  std::vector<Sym2> out(grid.node_count());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = (*grid.ricci)[n] + (*grid.weight_hess)[n];
  return out;
}

std::vector<Vec2> weight_gradient(const ChartGrid& grid) {
  if (grid.weight_grad) return *grid.weight_grad;
  const ScalarField f = Eigen::Map<const ScalarField>(grid.weight.data(), static_cast<Index>(grid.weight.size()));
  const ScalarField f0 = first_derivative(grid, 0, f);
  const ScalarField f1 = first_derivative(grid, 1, f);
  std::vector<Vec2> out(grid.node_count());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = {f0[n], f1[n]};
  return out;
}

ScalarField drift_laplacian_scalar(const ChartGrid& grid, const ScalarField& u) {
  const auto gamma = christoffel(grid);
  const auto df = weight_gradient(grid);
  const ScalarField u0 = first_derivative(grid, 0, u);
  const ScalarField u1 = first_derivative(grid, 1, u);
  const ScalarField u00 = second_derivative(grid, 0, u);
  const ScalarField u11 = second_derivative(grid, 1, u);
  const ScalarField u01 = first_derivative(grid, 0, u1);
  ScalarField out(u.size());
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const Sym2 gi = grid.metric[n].inverse();
    const Vec2 du(u0[n], u1[n]);
    Mat2 hess;
    hess << u00[n], u01[n], u01[n], u11[n];
    double lap = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        lap += gi(i, j) * (hess(i, j) - gamma[n][0](i, j) * du[0] - gamma[n][1](i, j) * du[1]);
    out[n] = lap - gi.apply(df[n], du);
  }
  return out;
}

ScalarField pointwise_norm(const ChartGrid& grid, const OneFormField& omega) {
  ScalarField out(grid.node_count());
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const Vec2 w = omega.at(n);
    out[n] = std::sqrt(std::max(0.0, grid.metric[n].inverse().apply(w, w)));
  }
  return out;
}

ScalarField pointwise_norm(const ChartGrid& grid, const TensorField& t) {
  ScalarField out(grid.node_count());
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const Mat2 gi = grid.metric[n].inverse().matrix();
    out[n] = std::sqrt(std::max(0.0, (gi * t.values[n] * gi * t.values[n].transpose()).trace()));
  }
  return out;
}

ScalarField codifferential(const ChartGrid& grid, const OneFormField& omega) {
  const ScalarField s = sqrt_det(grid);
  std::array<ScalarField, 2> flux{ScalarField(grid.node_count()), ScalarField(grid.node_count())};
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const Vec2 raised = grid.metric[n].inverse() * omega.at(n);
    flux[0][n] = s[n] * raised[0];
    flux[1][n] = s[n] * raised[1];
  }
  const ScalarField div = first_derivative(grid, 0, flux[0]) + first_derivative(grid, 1, flux[1]);
  return -div.cwiseQuotient(s);
}

ScalarField weighted_codifferential(const ChartGrid& grid, const OneFormField& omega) {
  const auto x = drift_field(grid);
  ScalarField out = codifferential(grid, omega);
  for (std::size_t n = 0; n < grid.node_count(); ++n) out[n] += x[n].dot(omega.at(n));
  return out;
}

ScalarField exterior_derivative(const ChartGrid& grid, const OneFormField& omega) {
  return first_derivative(grid, 0, omega.comp[1]) - first_derivative(grid, 1, omega.comp[0]);
}

OneFormField gradient_form(const ChartGrid& grid, const ScalarField& u) {
  return {{first_derivative(grid, 0, u), first_derivative(grid, 1, u)}};
}

namespace {

// delta of the two-form F dx^0 ^ dx^1, lowered to covariant components.
OneFormField codifferential_two_form(const ChartGrid& grid, const ScalarField& F) {
  const ScalarField s = sqrt_det(grid);
  const ScalarField phi = F.cwiseQuotient(s);
  const ScalarField d0 = first_derivative(grid, 0, phi);
  const ScalarField d1 = first_derivative(grid, 1, phi);
  OneFormField out{{ScalarField(grid.node_count()), ScalarField(grid.node_count())}};
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const Vec2 up(d1[n] / s[n], -d0[n] / s[n]);
    const Vec2 low = grid.metric[n] * up;
    out.comp[0][n] = low[0];
    out.comp[1][n] = low[1];
  }
  return out;
}

}  // namespace

OneFormField hodge_laplacian(const ChartGrid& grid, const OneFormField& omega) {
  const OneFormField d_delta = gradient_form(grid, codifferential(grid, omega));
  const OneFormField delta_d = codifferential_two_form(grid, exterior_derivative(grid, omega));
  return {{-(d_delta.comp[0] + delta_d.comp[0]), -(d_delta.comp[1] + delta_d.comp[1])}};
}

OneFormField drift_hodge_laplacian(const ChartGrid& grid, const OneFormField& omega) {
  const auto x = drift_field(grid);
  OneFormField out = hodge_laplacian(grid, omega);
  ScalarField contraction(grid.node_count());
  for (std::size_t n = 0; n < grid.node_count(); ++n) contraction[n] = x[n].dot(omega.at(n));
  const OneFormField d_contraction = gradient_form(grid, contraction);
  const ScalarField F = exterior_derivative(grid, omega);
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    out.comp[0][n] -= d_contraction.comp[0][n] - x[n][1] * F[n];
    out.comp[1][n] -= d_contraction.comp[1][n] + x[n][0] * F[n];
  }
  return out;
}

double BochnerTerms::scale() const {
  return (half_laplacian.cwiseAbs() + grad_sq.cwiseAbs() + laplacian.cwiseAbs() + ricci.cwiseAbs()).maxCoeff();
}

BochnerTerms bochner_terms(const ChartGrid& grid, const OneFormField& omega) {
  const auto ric_f = bakry_emery_ricci(grid);
  const ScalarField norm = pointwise_norm(grid, omega);
  BochnerTerms t;
  t.half_laplacian = 0.5 * drift_laplacian_scalar(grid, norm.cwiseAbs2());
  t.grad_sq = pointwise_norm(grid, covariant_derivative(grid, omega)).cwiseAbs2();
  const OneFormField lap = drift_hodge_laplacian(grid, omega);
  t.laplacian.resize(grid.node_count());
  t.ricci.resize(grid.node_count());
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const Sym2 gi = grid.metric[n].inverse();
    const Vec2 w = omega.at(n);
    const Vec2 up = gi * w;
    t.laplacian[n] = gi.apply(lap.at(n), w);
    t.ricci[n] = ric_f[n].apply(up, up);
  }
  return t;
}

ScalarField bochner_residual(const ChartGrid& grid, const OneFormField& omega) {
  return bochner_terms(grid, omega).residual();
}

double interior_max_abs(const ChartGrid& grid, const ScalarField& field, int band) {
  double m = 0.0;
  for (int j = 0; j < grid.axes[1].count; ++j) {
    if (!grid.axes[1].periodic() && (j < band || j >= grid.axes[1].count - band)) continue;
    for (int i = 0; i < grid.axes[0].count; ++i) {
      if (!grid.axes[0].periodic() && (i < band || i >= grid.axes[0].count - band)) continue;
      m = std::max(m, std::abs(field[static_cast<Index>(grid.index(i, j))]));
    }
  }
  return m;
}

KatoResult kato_gap(const ChartGrid& grid, const OneFormField& omega, double harmonic_tol) {
  KatoResult r;
  const auto df = weight_gradient(grid);
  const ScalarField norm = pointwise_norm(grid, omega);
  const TensorField nabla = covariant_derivative(grid, omega);
  const ScalarField nabla_norm = pointwise_norm(grid, nabla);
  const ScalarField n0 = first_derivative(grid, 0, norm);
  const ScalarField n1 = first_derivative(grid, 1, norm);

  const double max_norm = norm.maxCoeff();
  r.closed_residual = exterior_derivative(grid, omega).cwiseAbs().maxCoeff() / max_norm;
  r.coclosed_residual = weighted_codifferential(grid, omega).cwiseAbs().maxCoeff() / max_norm;
  r.harmonicity_warning = r.closed_residual > harmonic_tol || r.coclosed_residual > harmonic_tol;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.gap = ScalarField::Constant(grid.node_count(), nan);
  r.masked.assign(grid.node_count(), false);
  r.min_gap = std::numeric_limits<double>::infinity();
  const double inf = std::numeric_limits<double>::infinity();
  r.lambda_min_range = {inf, -inf};
  r.lambda_max_range = {inf, -inf};
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    if (norm[n] < 1e-10 * max_norm) {
      r.masked[n] = true;
      continue;
    }
    const Sym2 gi = grid.metric[n].inverse();
    const double grad_norm = std::sqrt(std::max(0.0, gi.apply(Vec2(n0[n], n1[n]), Vec2(n0[n], n1[n]))));
    const double drift = std::abs(gi.apply(df[n], omega.at(n)));
    const double diff = grad_norm - drift;
    r.gap[n] = nabla_norm[n] * nabla_norm[n] - diff * diff - grad_norm * grad_norm;
    r.min_gap = std::min(r.min_gap, r.gap[n]);

    const Eigen::EigenSolver<Mat2> es(gi.matrix() * nabla.values[n], false);
    const auto ev = es.eigenvalues().real();
    const double lo = ev.minCoeff(), hi = ev.maxCoeff();
    r.lambda_min_range = {std::min(r.lambda_min_range[0], lo), std::max(r.lambda_min_range[1], lo)};
    r.lambda_max_range = {std::min(r.lambda_max_range[0], hi), std::max(r.lambda_max_range[1], hi)};
  }
  if (!std::isfinite(r.min_gap)) r.min_gap = 0.0;
  return r;
}

double parallelism_residual(const ChartGrid& grid, const OneFormField& omega) {
  const double max_norm = pointwise_norm(grid, omega).maxCoeff();
  if (!(max_norm > 0.0)) throw Error("parallelism_residual: zero one-form");
  return pointwise_norm(grid, covariant_derivative(grid, omega)).maxCoeff() / max_norm;
}

std::vector<OneFormField> chart_harmonic_forms(const ChartGrid& grid) {
  const std::size_t N = grid.node_count();
  for (const auto& g : grid.metric)
    if (std::abs(g.xy) > 1e-14 * g.max_abs()) throw ConfigError("chart_harmonic_forms requires a diagonal metric");

  // kappa_a = sqrt g e^{-f} g^aa at nodes, averaged to half nodes
  std::array<ScalarField, 2> kappa{ScalarField(N), ScalarField(N)};
  for (std::size_t n = 0; n < N; ++n) {
    const double rho = std::sqrt(grid.metric[n].det()) * std::exp(-grid.weight[n]);
    const Sym2 gi = grid.metric[n].inverse();
    kappa[0][n] = rho * gi.xx;
    kappa[1][n] = rho * gi.yy;
  }

  // A = sum_a F_a^T diag(k_a) F_a with forward differences F_a over the half nodes of axis a
  std::vector<Eigen::Triplet<double>> trips;
  std::array<std::vector<std::pair<std::size_t, std::size_t>>, 2> links;
  std::array<std::vector<double>, 2> link_kappa;
  for (int a = 0; a < 2; ++a) {
    const AxisWalker w{grid, a};
    const double h = grid.spacing(a);
    for (std::size_t n = 0; n < N; ++n) {
      if (!w.periodic() && w.position(n) == w.count() - 1) continue;
      const std::size_t m = w.shifted(n, 1);
      const double k = 0.5 * (kappa[a][n] + kappa[a][m]) / (h * h);
      links[a].emplace_back(n, m);
      link_kappa[a].push_back(k * h);
      const auto ni = static_cast<Index>(n), mi = static_cast<Index>(m);
      trips.emplace_back(ni, ni, k);
      trips.emplace_back(mi, mi, k);
      trips.emplace_back(ni, mi, -k);
      trips.emplace_back(mi, ni, -k);
    }
  }
  Eigen::SparseMatrix<double> A(static_cast<Index>(N), static_cast<Index>(N));
  A.setFromTriplets(trips.begin(), trips.end());
  // pin u at node 0 to remove the constant kernel
  const Eigen::SparseMatrix<double> reduced = A.bottomRightCorner(N - 1, N - 1);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(reduced);
  if (solver.info() != Eigen::Success) throw Error("chart_harmonic_forms: factorization failed");

  std::vector<OneFormField> forms;
  for (int a = 0; a < 2; ++a) {
    if (!grid.axes[a].periodic()) continue;
    // right-hand side -F_a^T diag(k_a) 1 for the constant generator dx^a
    ScalarField b = ScalarField::Zero(static_cast<Index>(N));
    for (std::size_t l = 0; l < links[a].size(); ++l) {
      const auto [n, m] = links[a][l];
      b[static_cast<Index>(n)] += link_kappa[a][l];
      b[static_cast<Index>(m)] -= link_kappa[a][l];
    }
    ScalarField u = ScalarField::Zero(static_cast<Index>(N));
    u.tail(N - 1) = solver.solve(b.tail(N - 1));
    OneFormField w = gradient_form(grid, u);
    w.comp[a].array() += 1.0;
    forms.push_back(std::move(w));
  }
  return forms;
}

void write_fields_csv(const std::string& path, const ChartGrid& grid, const std::vector<std::string>& names,
                      const std::vector<ScalarField>& fields) {
  std::vector<std::string> header{"x0", "x1"};
  header.insert(header.end(), names.begin(), names.end());
  std::vector<std::vector<double>> rows(grid.node_count());
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const Vec2 x = grid.node(n);
    rows[n] = {x[0], x[1]};
    for (const auto& f : fields) rows[n].push_back(f[static_cast<Index>(n)]);
  }
  write_csv(path, header, rows);
}

}  // namespace fhodge
