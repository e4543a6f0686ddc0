#include "fhodge/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fhodge/errors.hpp"

namespace fhodge {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

CheckReport make_report(ScenarioContext& ctx, std::string name, std::string provenance) {
  CheckReport r;
  r.check_name = std::move(name);
  r.scenario = std::string(to_string(ctx.spec().name));
  r.resolution = ctx.resolution_label();
  r.provenance = std::move(provenance);
  return r;
}

Verdict compare(double value, const std::string& cmp, double tol) {
  bool ok = false;
  if (cmp == "<=") ok = value <= tol;
  else if (cmp == ">=") ok = value >= tol;
  else ok = value == tol;
  return ok ? Verdict::pass : Verdict::fail;
}

bool resolution_valid(const ScenarioSpec& spec) {
  try {
    validate_grid(build_scenario(spec), true);
    return true;
  } catch (const ConfigError&) {
    return false;
  }
}

double soliton_constant(const ScenarioSpec& spec) { return spec.soliton_constant_a.value_or(4.0); }

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::unresolved: return "unresolved";
    case Verdict::skipped: return "skipped";
    case Verdict::not_applicable: return "not_applicable";
  }
  return "?";
}

BoundaryCondition function_boundary_condition(ScenarioName name) {
  return name == ScenarioName::gaussian_plane || name == ScenarioName::cigar ? BoundaryCondition::dirichlet
                                                                             : BoundaryCondition::natural;
}

BoundaryCondition one_form_boundary_condition(ScenarioName name) {
  return name == ScenarioName::cigar ? BoundaryCondition::dirichlet : BoundaryCondition::natural;
}

std::vector<ManufacturedForm> manufactured_forms(ScenarioName name) {
  switch (name) {
    case ScenarioName::flat_torus:
    case ScenarioName::flat_torus_perturbed:
      return {{"cos(x) dx", [](const Vec2& p) { return Vec2(std::cos(p[0]), 0.0); }},
              {"sin(y) dx + cos(x+y) dy", [](const Vec2& p) { return Vec2(std::sin(p[1]), std::cos(p[0] + p[1])); }}};
    case ScenarioName::gaussian_plane:
      return {{"exp(-x^2/2) dx", [](const Vec2& p) { return Vec2(std::exp(-0.5 * p[0] * p[0]), 0.0); }},
              {"exp(-r^2/4) (sin(y) dx + cos(x) dy)", [](const Vec2& p) {
                 const double e = std::exp(-0.25 * p.squaredNorm());
                 return Vec2(e * std::sin(p[1]), e * std::cos(p[0]));
               }}};
    case ScenarioName::weighted_cylinder:
      return {{"cos(theta) dtheta + exp(-t^2/2) dt",
               [](const Vec2& p) { return Vec2(std::cos(p[0]), std::exp(-0.5 * p[1] * p[1])); }},
              {"t sin(theta) dtheta", [](const Vec2& p) { return Vec2(p[1] * std::sin(p[0]), 0.0); }}};
    case ScenarioName::cigar:
      return {{"dx", [](const Vec2&) { return Vec2(1.0, 0.0); }},
              {"x exp(-r^2/8) dy",
               [](const Vec2& p) { return Vec2(0.0, p[0] * std::exp(-0.125 * p.squaredNorm())); }}};
  }
  return {};
}

ScenarioContext::ScenarioContext(ScenarioSpec spec, VerifyOptions options)
    : spec_(std::move(spec)), options_(std::move(options)) {}

std::string ScenarioContext::resolution_label() const {
  return std::to_string(spec_.resolution[0]) + "x" + std::to_string(spec_.resolution[1]);
}

const ChartGrid& ScenarioContext::grid() {
  if (!grid_) grid_ = build_scenario(spec_);
  return *grid_;
}

const SimplicialMesh& ScenarioContext::mesh() {
  if (!mesh_) mesh_ = triangulate(grid());
  return *mesh_;
}

const OperatorSet& ScenarioContext::ops(int degree) {
  const BoundaryCondition bc =
      degree == 0 ? function_boundary_condition(spec_.name) : one_form_boundary_condition(spec_.name);
  auto it = ops_.find(bc);
  if (it == ops_.end()) it = ops_.emplace(bc, assemble_operators(mesh(), bc)).first;
  return it->second;
}

HarmonicOptions ScenarioContext::harmonic_options() const {
  HarmonicOptions h;
  h.kernel = {tol().kernel_abs, tol().kernel_rel, tol().gap_ratio_min};
  h.closed_tol = tol().spectral;
  h.eigen_tol = tol().eigen_residual;
  h.seed = options_.seed;
  return h;
}

const HarmonicBasis& ScenarioContext::harmonic() {
  if (!harmonic_) harmonic_ = harmonic_one_forms(ops(1), harmonic_options());
  return *harmonic_;
}

std::array<int, 2> ScenarioContext::companion_resolution() const {
  ScenarioSpec half = spec_;
  half.resolution = {spec_.resolution[0] / 2, spec_.resolution[1] / 2};
  if (spec_.resolution[0] % 2 == 0 && spec_.resolution[1] % 2 == 0 && half.resolution[1] % 2 == 0 &&
      resolution_valid(half))
    return half.resolution;
  return {2 * spec_.resolution[0], 2 * spec_.resolution[1]};
}

const HarmonicBasis& ScenarioContext::harmonic_companion() {
  if (!companion_) {
    ScenarioSpec other = spec_;
    other.resolution = companion_resolution();
    const auto mesh = triangulate(build_scenario(other));
    companion_ = harmonic_one_forms(assemble_operators(mesh, one_form_boundary_condition(spec_.name)),
                                    harmonic_options());
  }
  return *companion_;
}

CheckReport check_adjointness(ScenarioContext& ctx) {
  auto r = make_report(ctx, "adjointness", "dec.adjointness_residual");
  double worst = 0.0;
  for (int degree : {0, 1}) {
    const double res = adjointness_residual(ctx.ops(degree), ctx.options().adjointness_trials, ctx.options().seed);
    r.details.emplace_back(degree == 0 ? "residual_function_bc" : "residual_one_form_bc", res);
    worst = std::max(worst, res);
  }
  r.details.emplace_back("trials", ctx.options().adjointness_trials);
  r.value = worst;
  r.tolerance = ctx.tol().machine;
  r.verdict = compare(r.value, "<=", r.tolerance);
  return r;
}

CheckReport check_harmonic_dimension(ScenarioContext& ctx) {
  auto r = make_report(ctx, "harmonic_dimension", "spectral.harmonic_one_forms");
  const auto& hb = ctx.harmonic();
  const int expected = expected_harmonic_dim(ctx.spec().name);
  r.value = hb.dimension;
  r.tolerance = expected;
  r.comparison = "==";
  r.details.emplace_back("gap_ratio", hb.gap_ratio);
  r.details.emplace_back("smallest_nonkernel_eigenvalue", hb.smallest_nonkernel());
  r.verdict = compare(r.value, "==", r.tolerance);

  const auto& other = ctx.harmonic_companion();
  const auto cres = ctx.companion_resolution();
  r.details.emplace_back("companion_dimension", other.dimension);
  r.details.emplace_back("companion_gap_ratio", other.gap_ratio);
  r.notes.push_back("companion resolution " + std::to_string(cres[0]) + "x" + std::to_string(cres[1]));
  if (!hb.resolved || !other.resolved) {
    r.verdict = Verdict::unresolved;
    r.notes.push_back("spectral gap unresolved: " + (hb.note.empty() ? other.note : hb.note));
  } else if (other.dimension != hb.dimension) {
    r.verdict = Verdict::unresolved;
    r.notes.push_back("dimension changes under refinement");
  }

  if (ctx.spec().name == ScenarioName::weighted_cylinder && !hb.forms.empty()) {
    const auto& ops = ctx.ops(1);
    const VectorXd dtheta = coordinate_differential(ctx.mesh(), ops, 0);
    const VectorXd& h = hb.forms[0];
    const double cosine = std::abs(ops.inner(1, h, dtheta)) / (ops.norm(1, h) * ops.norm(1, dtheta));
    r.details.emplace_back("cosine_to_dtheta", cosine);
    r.provenance += ", dec.coordinate_differential";
    if (cosine < 1.0 - ctx.tol().cosine) {
      r.verdict = Verdict::fail;
      r.notes.push_back("representative cosine similarity to dtheta " + fmt(cosine) + " below 1 - " +
                        fmt(ctx.tol().cosine));
    }
  }
  return r;
}

CheckReport check_closed_coclosed(ScenarioContext& ctx) {
  auto r = make_report(ctx, "closed_coclosed", "spectral.harmonic_one_forms, dec.d1, dec.delta_f_1");
  const auto& hb = ctx.harmonic();
  double worst = 0.0;
  for (std::size_t i = 0; i < hb.forms.size(); ++i) {
    const double s = hb.closed_residuals[i] + hb.coclosed_residuals[i];
    r.details.emplace_back("member_" + std::to_string(i), s);
    worst = std::max(worst, s);
  }
  r.value = worst;
  r.tolerance = ctx.tol().spectral;
  r.verdict = compare(r.value, "<=", r.tolerance);
  if (hb.forms.empty()) r.notes.push_back("harmonic space is trivial; vacuous pass");
  return r;
}

CheckReport check_bochner(ScenarioContext& ctx) {
  auto r = make_report(ctx, "bochner", "chart.bochner_residual");
  const auto& ladder = ctx.options().bochner_ladder;
  if (ladder.size() < 2) throw ConfigError("bochner check needs at least two ladder levels");
  r.tolerance = ctx.tol().bochner_order;
  r.comparison = ">=";
  double worst_order = std::numeric_limits<double>::infinity();
  int form_index = 0;
  for (const auto& form : manufactured_forms(ctx.spec().name)) {
    std::vector<double> h, res, floor;
    for (int n : ladder) {
      ScenarioSpec s = ctx.spec();
      s.resolution = {n, n};
      const ChartGrid g = build_scenario(s);
      const auto terms = bochner_terms(g, sample_one_form(g, form.components));
      h.push_back(g.max_spacing());
      res.push_back(interior_max_abs(g, terms.residual(), ctx.options().boundary_band));
      // below this the residual is indistinguishable from rounding in the individual terms
      floor.push_back(100.0 * ctx.tol().machine * terms.scale());
    }
    const std::string tag = "form" + std::to_string(form_index++);
    r.notes.push_back(tag + ": " + form.label);
    for (std::size_t i = 0; i < res.size(); ++i)
      r.details.emplace_back(tag + "_residual_n" + std::to_string(ladder[i]), res[i]);
    for (std::size_t i = 0; i + 1 < res.size(); ++i) {
      if (res[i + 1] <= floor[i + 1]) {
        r.notes.push_back(tag + ": residual at roundoff level, order not measured");
        continue;
      }
      const double order = std::log(res[i] / res[i + 1]) / std::log(h[i] / h[i + 1]);
      r.details.emplace_back(tag + "_order_" + std::to_string(ladder[i]) + "_" + std::to_string(ladder[i + 1]), order);
      worst_order = std::min(worst_order, order);
    }
  }
  if (!std::isfinite(worst_order)) worst_order = r.tolerance;
  r.value = worst_order;
  r.verdict = compare(r.value, ">=", r.tolerance);
  if (ctx.spec().has_truncated_axis())
    r.notes.push_back("max over nodes at least " + std::to_string(ctx.options().boundary_band) +
                      " steps from truncated ends");
  return r;
}

CheckReport check_kato(ScenarioContext& ctx) {
  auto r = make_report(ctx, "kato", "chart.chart_harmonic_forms, chart.kato_gap");
  r.tolerance = -ctx.tol().kato;
  r.comparison = ">=";
  if (expected_harmonic_dim(ctx.spec().name) == 0) {
    r.verdict = Verdict::not_applicable;
    r.notes.push_back("no L2_f harmonic one-forms on this scenario");
    return r;
  }
  ScenarioSpec fine = ctx.spec();
  const int k = ctx.options().kato_refine;
  fine.resolution = {k * fine.resolution[0], k * fine.resolution[1]};
  const ChartGrid g = build_scenario(fine);
  const auto forms = chart_harmonic_forms(g);
  r.details.emplace_back("refined_n0", fine.resolution[0]);
  r.details.emplace_back("refined_n1", fine.resolution[1]);
  if (static_cast<int>(forms.size()) != ctx.harmonic().dimension)
    r.notes.push_back("chart harmonic forms (" + std::to_string(forms.size()) + ") differ from DEC dimension (" +
                      std::to_string(ctx.harmonic().dimension) + ")");
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < forms.size(); ++i) {
    const double hf = g.max_spacing();
    const auto kr = kato_gap(g, forms[i], ctx.tol().parallel_factor * hf * hf * ctx.tol().parallel_constant);
    const std::string tag = "form" + std::to_string(i);
    r.details.emplace_back(tag + "_min_gap", kr.min_gap);
    r.details.emplace_back(tag + "_closed_residual", kr.closed_residual);
    r.details.emplace_back(tag + "_coclosed_residual", kr.coclosed_residual);
    r.details.emplace_back(tag + "_lambda_min_lo", kr.lambda_min_range[0]);
    r.details.emplace_back(tag + "_lambda_min_hi", kr.lambda_min_range[1]);
    r.details.emplace_back(tag + "_lambda_max_lo", kr.lambda_max_range[0]);
    r.details.emplace_back(tag + "_lambda_max_hi", kr.lambda_max_range[1]);
    if (kr.harmonicity_warning) r.notes.push_back(tag + ": input is not numerically harmonic");
    worst = std::min(worst, kr.min_gap);
  }
  r.value = std::isfinite(worst) ? worst : 0.0;
  r.verdict = compare(r.value, ">=", r.tolerance);
  return r;
}

std::vector<CheckReport> check_constant_norm_and_parallel(ScenarioContext& ctx) {
  auto norm = make_report(ctx, "constant_norm", "dec.face_norms, spectral.harmonic_one_forms");
  auto par = make_report(ctx, "parallel", "chart.chart_harmonic_forms, chart.parallelism_residual");
  norm.tolerance = ctx.tol().const_norm_rel_std;
  const double h = ctx.grid().max_spacing();
  par.tolerance = ctx.tol().parallel_factor * h * h * ctx.tol().parallel_constant;
  par.details.emplace_back("h", h);

  auto skip_both = [&](Verdict v, const std::string& why) {
    for (auto* r : {&norm, &par}) {
      r->verdict = v;
      r->notes.push_back(why);
    }
    return std::vector<CheckReport>{norm, par};
  };
  if (expected_harmonic_dim(ctx.spec().name) == 0)
    return skip_both(Verdict::not_applicable, "harmonic space is trivial");

  double min_ric = std::numeric_limits<double>::infinity();
  for (const auto& t : bakry_emery_ricci(ctx.grid())) min_ric = std::min(min_ric, t.min_eigenvalue());
  norm.details.emplace_back("min_ric_f_eigenvalue", min_ric);
  if (min_ric < -ctx.tol().kernel_abs)
    return skip_both(Verdict::skipped, "hypothesis violated: Ric_f = Ric + Hess f is not >= 0 (min eigenvalue " +
                                           fmt(min_ric) + ")");

  const auto& hb = ctx.harmonic();
  const auto& mesh = ctx.mesh();
  double worst_std = 0.0;
  for (std::size_t i = 0; i < hb.forms.size(); ++i) {
    const auto norms = face_norms(mesh, ctx.ops(1), hb.forms[i]);
    double area = 0.0, mean = 0.0;
    for (std::size_t t = 0; t < norms.size(); ++t) {
      area += mesh.face_area[t];
      mean += mesh.face_area[t] * norms[t];
    }
    mean /= area;
    double var = 0.0;
    for (std::size_t t = 0; t < norms.size(); ++t) var += mesh.face_area[t] * (norms[t] - mean) * (norms[t] - mean);
    const double rel = std::sqrt(var / area) / mean;
    norm.details.emplace_back("member_" + std::to_string(i) + "_rel_std", rel);
    worst_std = std::max(worst_std, rel);
  }
  norm.value = worst_std;
  norm.verdict = compare(norm.value, "<=", norm.tolerance);

  double worst_par = 0.0;
  const auto forms = chart_harmonic_forms(ctx.grid());
  for (std::size_t i = 0; i < forms.size(); ++i) {
    const double p = parallelism_residual(ctx.grid(), forms[i]);
    par.details.emplace_back("form" + std::to_string(i), p);
    worst_par = std::max(worst_par, p);
  }
  par.value = worst_par;
  par.verdict = compare(par.value, "<=", par.tolerance);
  return {norm, par};
}

CheckReport check_weighted_volume(ScenarioContext& ctx) {
  auto r = make_report(ctx, "weighted_volume", "geometry.weighted_volume");
  const double v = weighted_volume(ctx.grid());
  r.details.emplace_back("vol_f", v);
  r.details.emplace_back("mesh_vol_f", mesh_weighted_volume(ctx.mesh()));
  r.tolerance = ctx.tol().volume_rel;
  const auto exact = analytic_weighted_volume(ctx.spec());
  if (!exact) {
    r.value = v;
    r.verdict = Verdict::not_applicable;
    r.notes.push_back("vol_f of the complete manifold is infinite; truncated value reported");
    return r;
  }
  r.details.emplace_back("analytic_vol_f", *exact);
  r.value = std::abs(v - *exact) / *exact;
  r.verdict = compare(r.value, "<=", r.tolerance);
  return r;
}

std::vector<CheckReport> check_vanishing(ScenarioContext& ctx) {
  const auto name = ctx.spec().name;
  if (name != ScenarioName::gaussian_plane && name != ScenarioName::cigar) {
    auto r = make_report(ctx, "vanishing", "verify.check_vanishing");
    r.verdict = Verdict::not_applicable;
    r.notes.push_back("vol_f is finite, so a nontrivial harmonic space is allowed here");
    return {r};
  }
  std::vector<CheckReport> out;

  {
    auto r = make_report(ctx, "vanishing.harmonic_dimension", "spectral.harmonic_one_forms");
    const auto& hb = ctx.harmonic();
    r.value = hb.dimension;
    r.tolerance = 0.0;
    r.comparison = "==";
    r.details.emplace_back("gap_ratio", hb.gap_ratio);
    r.verdict = hb.resolved ? compare(r.value, "==", 0.0) : Verdict::unresolved;
    if (!hb.resolved) r.notes.push_back(hb.note);
    out.push_back(r);
  }

  {
    auto r = make_report(ctx, "vanishing.one_form_floor", "spectral.harmonic_one_forms (smallest_one_form_eigenvalue, proxy)");
    r.notes.push_back("smallest L_f eigenvalue on one-forms is a proxy for triviality of the harmonic space");
    r.tolerance = ctx.tol().one_form_floor;
    r.comparison = ">=";
    auto floor_of = [](const HarmonicBasis& b) { return b.spectrum.size() > 0 ? b.spectrum[0] : 0.0; };
    const double base = floor_of(ctx.harmonic());
    const double refined = floor_of(ctx.harmonic_companion());
    ScenarioSpec wider = ctx.spec();
    wider.truncation += 2.0;
    const auto wmesh = triangulate(build_scenario(wider));
    const double widened =
        floor_of(harmonic_one_forms(assemble_operators(wmesh, one_form_boundary_condition(name)), ctx.harmonic_options()));
    r.details.emplace_back("base", base);
    r.details.emplace_back("companion_resolution", refined);
    r.details.emplace_back("truncation_plus_2", widened);
    r.value = std::min({base, refined, widened});
    r.verdict = compare(r.value, ">=", r.tolerance);
    const double drift = std::max(std::abs(refined - base), std::abs(widened - base)) / base;
    r.details.emplace_back("relative_change", drift);
    if (drift > ctx.tol().stability_rel) {
      r.verdict = Verdict::fail;
      r.notes.push_back("floor not stable: relative change " + fmt(drift) + " exceeds " + fmt(ctx.tol().stability_rel));
    }
    out.push_back(r);
  }

  if (name == ScenarioName::gaussian_plane) {
    auto r = make_report(ctx, "vanishing.lambda1", "spectral.lambda1_estimate");
    const auto est = lambda1_estimate(ctx.ops(0), ctx.tol().eigen_residual, ctx.options().seed);
    r.details.emplace_back("infimum", est.infimum);
    r.details.emplace_back("first_nonconstant", est.first_nonconstant);
    r.value = std::abs(est.first_nonconstant - 1.0);
    r.tolerance = ctx.tol().gaussian_lambda1_rel;
    r.verdict = compare(r.value, "<=", r.tolerance);
    r.notes.push_back("value is |lambda1 - 1| for the first eigenvalue orthogonal to constants");
    out.push_back(r);
    return out;
  }

  const double a = soliton_constant(ctx.spec());
  {
    auto r = make_report(ctx, "vanishing.soliton_identity", "geometry analytic fields, chart.bakry_emery_ricci");
    const auto& g = ctx.grid();
    const auto df = weight_gradient(g);
    const auto ric_f = bakry_emery_ricci(g);
    double dev = 0.0, ric_f_max = 0.0;
    for (std::size_t n = 0; n < g.node_count(); ++n) {
      const Sym2 gi = g.metric[n].inverse();
      const Sym2& ric = (*g.ricci)[n];
      const double scalar = gi.xx * ric.xx + 2.0 * gi.xy * ric.xy + gi.yy * ric.yy;
      dev = std::max(dev, std::abs(scalar + gi.apply(df[n], df[n]) - a));
      ric_f_max = std::max(ric_f_max, ric_f[n].max_abs());
    }
    r.details.emplace_back("a", a);
    r.details.emplace_back("ric_f_max_abs", ric_f_max);
    r.value = dev;
    r.tolerance = ctx.tol().soliton;
    r.verdict = compare(std::max(dev, ric_f_max), "<=", r.tolerance);
    out.push_back(r);
  }
  {
    auto r = make_report(ctx, "vanishing.lambda1_lower_bound", "spectral.lambda1_estimate over truncations");
    r.tolerance = a * a / 4.0 * ctx.tol().lambda1_factor;
    r.comparison = ">=";
    std::vector<double> lambdas;
    for (double T : ctx.options().cigar_truncations) {
      ScenarioSpec s = ctx.spec();
      s.truncation = T;
      const auto m = triangulate(build_scenario(s));
      const auto est = lambda1_estimate(assemble_operators(m, function_boundary_condition(name)),
                                        ctx.tol().eigen_residual, ctx.options().seed);
      lambdas.push_back(est.infimum);
      r.details.emplace_back("lambda1_T" + fmt(T), est.infimum);
    }
    r.value = *std::min_element(lambdas.begin(), lambdas.end());
    r.verdict = compare(r.value, ">=", r.tolerance);
    bool monotone = true;
    for (std::size_t i = 0; i + 1 < lambdas.size(); ++i)
      monotone = monotone && lambdas[i + 1] <= lambdas[i] * (1.0 + 1e-12);
    r.details.emplace_back("monotone_non_increasing", monotone ? 1.0 : 0.0);
    if (!monotone) {
      r.verdict = Verdict::fail;
      r.notes.push_back("lambda1 is not monotone non-increasing in T");
    }
    r.notes.push_back("bound is 0.95 * a^2/4 with a = " + fmt(a));
    out.push_back(r);
  }
  return out;
}

std::vector<CheckReport> run_all_checks(const ScenarioSpec& spec, const VerifyOptions& options) {
  ScenarioContext ctx(spec, options);
  std::vector<CheckReport> out;
  out.push_back(check_adjointness(ctx));
  out.push_back(check_harmonic_dimension(ctx));
  out.push_back(check_closed_coclosed(ctx));
  out.push_back(check_bochner(ctx));
  out.push_back(check_kato(ctx));
  for (auto& r : check_constant_norm_and_parallel(ctx)) out.push_back(std::move(r));
  out.push_back(check_weighted_volume(ctx));
  for (auto& r : check_vanishing(ctx)) out.push_back(std::move(r));
  return out;
}

int exit_code_for(const std::vector<CheckReport>& reports) {
  bool unresolved = false;
  for (const auto& r : reports) {
    if (r.verdict == Verdict::fail) return 1;
    unresolved = unresolved || r.verdict == Verdict::unresolved;
  }
  return unresolved ? 2 : 0;
}

}  // namespace fhodge
