#include "fhodge/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "fhodge/chart.hpp"
#include "fhodge/dec.hpp"
#include "fhodge/mesh_io.hpp"
#include "fhodge/report.hpp"
#include "fhodge/spectral.hpp"
#include "fhodge/verify.hpp"

namespace fhodge {

namespace {

using nlohmann::json;

const std::map<std::string, Command>& command_names() {
  static const std::map<std::string, Command> names{{"check", Command::check},
                                                    {"spectrum", Command::spectrum},
                                                    {"harmonic", Command::harmonic},
                                                    {"sweep", Command::sweep},
                                                    {"volume", Command::volume}};
  return names;
}

std::string command_name(Command c) {
  for (const auto& [k, v] : command_names())
    if (v == c) return k;
  return "?";
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError(key + ": '" + text + "' is not a number");
  }
}

long parse_int(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError(key + ": '" + text + "' is not an integer");
  }
}

// Raw settings in application order: config file first, then flags.
using Settings = std::vector<std::pair<std::string, std::string>>;

void settings_from_text(const std::string& text, Settings& settings) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    settings.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void apply_settings(const Settings& settings, RunConfig& config) {
  // scenario first so its defaults can be overridden by the remaining keys
  for (const auto& [key, value] : settings) {
    if (key != "scenario") continue;
    if (value == "all") {
      config.all_scenarios = true;
      config.spec = ScenarioSpec::defaults(ScenarioName::flat_torus);
    } else {
      try {
        config.spec = ScenarioSpec::defaults(parse_scenario_name(value));
      } catch (const ConfigError& e) {
        throw UsageError(e.what());
      }
      config.all_scenarios = false;
    }
  }
  for (const auto& [key, value] : settings) {
    if (key == "scenario") continue;
    if (key == "res") config.spec.resolution = parse_resolution(value);
    else if (key == "trunc") config.spec.truncation = parse_double(key, value);
    else if (key == "eps") config.spec.epsilon = parse_double(key, value);
    else if (key == "a") config.spec.soliton_constant_a = parse_double(key, value);
    else if (key == "seed") {
      const long s = parse_int(key, value);
      if (s < 0) throw UsageError("seed must be non-negative");
      config.seed = static_cast<std::uint64_t>(s);
    } else if (key == "out") config.out = value;
    else if (key == "ladder") config.ladder = parse_ladder(value);
    else if (key == "degree") {
      config.degree = static_cast<int>(parse_int(key, value));
      if (config.degree != 0 && config.degree != 1) throw UsageError("degree must be 0 or 1");
    } else if (key == "k") {
      config.k = static_cast<int>(parse_int(key, value));
      if (config.k < 1) throw UsageError("k must be at least 1");
    } else if (key == "fields") config.fields_csv = value;
    else if (key == "export-mm") config.export_matrices = value;
    else if (key == "export-off") config.export_off = value;
    else if (key == "tol-class" || key.rfind("tol.", 0) == 0) {
      const std::string assignment = key == "tol-class" ? value : key.substr(4) + "=" + value;
      try {
        config.tol.apply_override(assignment);
      } catch (const ConfigError& e) {
        throw UsageError(e.what());
      }
      config.tol_overrides.push_back(assignment);
    } else {
      throw UsageError("unknown config key '" + key + "'");
    }
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path + " for writing");
  return f;
}

json config_json(const RunConfig& c) {
  json j = {{"command", command_name(c.command)},
            {"scenario", c.all_scenarios ? json("all") : to_json(c.spec)},
            {"seed", c.seed},
            {"ladder", c.ladder},
            {"tol_overrides", c.tol_overrides}};
  if (c.command == Command::spectrum) {
    j["degree"] = c.degree;
    j["k"] = c.k;
  }
  return j;
}

json report_header(const RunConfig& c) {
  return {{"schema_version", kReportSchemaVersion}, {"config", config_json(c)}, {"tolerances", to_json(c.tol)}};
}

void write_report(const RunConfig& c, const json& doc) {
  if (c.out.empty()) return;
  open_output(c.out) << doc.dump(2) << '\n';
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream ts;
  ts << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
  const json meta = {{"report", std::filesystem::path(c.out).filename().string()}, {"generated_at", ts.str()}};
  open_output(c.out + ".meta.json") << meta.dump(2) << '\n';
}

VerifyOptions verify_options(const RunConfig& c) {
  VerifyOptions o;
  o.tol = c.tol;
  o.seed = c.seed;
  return o;
}

void export_artifacts(const RunConfig& c, std::ostream& out) {
  if (c.export_matrices.empty() && c.export_off.empty()) return;
  const auto mesh = triangulate(build_scenario(c.spec));
  if (!c.export_off.empty()) {
    write_off(mesh, c.export_off);
    out << "wrote mesh " << c.export_off << '\n';
  }
  if (!c.export_matrices.empty()) {
    std::filesystem::create_directories(c.export_matrices);
    const auto ops = assemble_operators(mesh, one_form_boundary_condition(c.spec.name));
    const std::filesystem::path dir(c.export_matrices);
    auto diag = [](const VectorXd& v) {
      SparseMatrix m(v.size(), v.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) m.insert(i, i) = v[i];
      return m;
    };
    write_matrix_market(ops.d0, (dir / "d0.mtx").string());
    write_matrix_market(ops.d1, (dir / "d1.mtx").string());
    write_matrix_market(diag(ops.M0), (dir / "M0.mtx").string());
    write_matrix_market(diag(ops.M1), (dir / "M1.mtx").string());
    write_matrix_market(diag(ops.M2), (dir / "M2.mtx").string());
    write_matrix_market(ops.L_f_0, (dir / "L_f_0.mtx").string());
    write_matrix_market(ops.L_f_1, (dir / "L_f_1.mtx").string());
    out << "wrote operators to " << c.export_matrices << '\n';
  }
}

void write_check_fields(const RunConfig& c, const ScenarioSpec& spec) {
  const ChartGrid grid = build_scenario(spec);
  std::vector<std::string> names;
  std::vector<ScalarField> fields;
  int i = 0;
  for (const auto& form : manufactured_forms(spec.name)) {
    names.push_back("bochner_residual_" + std::to_string(i++));
    fields.push_back(bochner_residual(grid, sample_one_form(grid, form.components)));
  }
  if (expected_harmonic_dim(spec.name) > 0) {
    i = 0;
    for (const auto& w : chart_harmonic_forms(grid)) {
      names.push_back("kato_gap_" + std::to_string(i++));
      fields.push_back(kato_gap(grid, w).gap);
    }
  }
  write_fields_csv(c.fields_csv, grid, names, fields);
}

int run_check(const RunConfig& c, std::ostream& out) {
  std::vector<ScenarioSpec> specs;
  if (c.all_scenarios) {
    for (auto name : all_scenarios()) {
      auto s = ScenarioSpec::defaults(name);
      s.resolution = c.spec.resolution;
      specs.push_back(s);
    }
  } else {
    specs.push_back(c.spec);
  }
  json doc = report_header(c);
  doc["scenarios"] = json::array();
  std::vector<CheckReport> all;
  for (const auto& spec : specs) {
    const auto reports = run_all_checks(spec, verify_options(c));
    json checks = json::array();
    for (const auto& r : reports) checks.push_back(to_json(r));
    doc["scenarios"].push_back({{"scenario", to_string(spec.name)}, {"spec", to_json(spec)}, {"checks", checks}});
    all.insert(all.end(), reports.begin(), reports.end());
  }
  const int code = exit_code_for(all);
  doc["summary"] = verdict_summary(all);
  doc["exit_code"] = code;
  write_report(c, doc);
  if (!c.fields_csv.empty() && !c.all_scenarios) write_check_fields(c, c.spec);
  out << render_table(all);
  return code;
}

int run_spectrum(const RunConfig& c, std::ostream& out) {
  const auto mesh = triangulate(build_scenario(c.spec));
  const BoundaryCondition bc =
      c.degree == 0 ? function_boundary_condition(c.spec.name) : one_form_boundary_condition(c.spec.name);
  const auto ops = assemble_operators(mesh, bc);
  EigenOptions eo;
  eo.k = c.k;
  eo.tol = c.tol.eigen_residual;
  eo.seed = c.seed;
  const auto result = smallest_eigenpairs(c.degree == 0 ? ops.K0 : ops.K1, ops.mass(c.degree), eo);
  json doc = report_header(c);
  doc["degree"] = c.degree;
  doc["boundary_condition"] = bc == BoundaryCondition::natural ? "natural" : "dirichlet";
  doc["spectrum"] = to_json(result);
  if (c.degree == 1) doc["label"] = "one-form eigenvalues (proxy for triviality of the harmonic space)";
  if (c.degree == 0) {
    const auto est = lambda1_estimate(ops, c.tol.eigen_residual, c.seed);
    doc["lambda1"] = {{"infimum", est.infimum}, {"first_nonconstant", est.first_nonconstant}};
  }
  write_report(c, doc);
  out << "degree " << c.degree << " eigenvalues (" << doc["boundary_condition"].get<std::string>() << "):\n";
  out << std::setprecision(10);
  for (Eigen::Index i = 0; i < result.eigenvalues.size(); ++i)
    out << "  " << i << "  " << result.eigenvalues[i] << "  residual " << result.residuals[i] << '\n';
  return 0;
}

int run_harmonic(const RunConfig& c, std::ostream& out) {
  ScenarioContext ctx(c.spec, verify_options(c));
  const auto& hb = ctx.harmonic();
  json doc = report_header(c);
  doc["harmonic"] = to_json(hb);
  write_report(c, doc);
  if (!c.fields_csv.empty()) {
    const auto& mesh = ctx.mesh();
    std::vector<std::string> header{"face", "x0", "x1"};
    std::vector<std::vector<double>> rows(mesh.face_count());
    for (std::size_t t = 0; t < mesh.face_count(); ++t) {
      const auto& p = mesh.face_chart_coords[t];
      const Vec2 b = (p[0] + p[1] + p[2]) / 3.0;
      rows[t] = {static_cast<double>(t), b[0], b[1]};
    }
    for (std::size_t i = 0; i < hb.forms.size(); ++i) {
      const std::string tag = "form" + std::to_string(i);
      header.insert(header.end(), {tag + "_w0", tag + "_w1", tag + "_norm"});
      const auto w = reconstruct_face_covectors(mesh, ctx.ops(1), hb.forms[i]);
      const auto n = face_norms(mesh, ctx.ops(1), hb.forms[i]);
      for (std::size_t t = 0; t < mesh.face_count(); ++t) rows[t].insert(rows[t].end(), {w[t][0], w[t][1], n[t]});
    }
    write_csv(c.fields_csv, header, rows);
  }
  out << "harmonic dimension " << hb.dimension << " (expected " << expected_harmonic_dim(c.spec.name)
      << "), gap ratio " << hb.gap_ratio << (hb.resolved ? "" : ", UNRESOLVED: " + hb.note) << '\n';
  out << "lowest one-form eigenvalues:";
  for (Eigen::Index i = 0; i < hb.spectrum.size(); ++i) out << ' ' << hb.spectrum[i];
  out << '\n';
  return hb.resolved ? 0 : 2;
}

int run_sweep(const RunConfig& c, std::ostream& out) {
  const auto forms = manufactured_forms(c.spec.name);
  std::vector<std::string> header{"n", "h", "harmonic_dim", "gap_ratio", "one_form_eigenvalue_proxy", "lambda1_first_nonconstant"};
  for (std::size_t i = 0; i < forms.size(); ++i) {
    header.push_back("bochner_residual_" + std::to_string(i));
    header.push_back("bochner_order_" + std::to_string(i));
  }
  std::vector<std::vector<double>> rows;
  std::vector<double> prev_h, prev_res;
  bool ok = true, unresolved = false;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int n : c.ladder) {
    ScenarioSpec s = c.spec;
    s.resolution = {n, n};
    ScenarioContext ctx(s, verify_options(c));
    const auto& hb = ctx.harmonic();
    unresolved = unresolved || !hb.resolved;
    const auto est = lambda1_estimate(ctx.ops(0), c.tol.eigen_residual, c.seed);
    const double h = ctx.grid().max_spacing();
    std::vector<double> row{static_cast<double>(n), h, static_cast<double>(hb.dimension), hb.gap_ratio,
                            hb.smallest_nonkernel(), est.first_nonconstant};
    std::vector<double> res;
    for (std::size_t i = 0; i < forms.size(); ++i) {
      const auto terms = bochner_terms(ctx.grid(), sample_one_form(ctx.grid(), forms[i].components));
      const double r = interior_max_abs(ctx.grid(), terms.residual(), verify_options(c).boundary_band);
      res.push_back(r);
      double order = nan;
      if (!prev_res.empty() && r > 100.0 * c.tol.machine * terms.scale()) {
        order = std::log(prev_res[i] / r) / std::log(prev_h[0] / h);
        ok = ok && order >= c.tol.bochner_order;
      }
      row.push_back(r);
      row.push_back(order);
    }
    rows.push_back(row);
    prev_res = res;
    prev_h = {h};
  }
  if (c.out.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n' << std::setprecision(17);
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << '\n';
    }
  } else {
    write_csv(c.out, header, rows);
    out << "wrote " << c.out << '\n';
  }
  if (!ok) return 1;
  return unresolved ? 2 : 0;
}

int run_volume(const RunConfig& c, std::ostream& out) {
  const ChartGrid grid = build_scenario(c.spec);
  const double v = weighted_volume(grid);
  const auto exact = analytic_weighted_volume(c.spec);
  json doc = report_header(c);
  doc["vol_f"] = v;
  doc["analytic_vol_f"] = exact ? json(*exact) : json(nullptr);
  write_report(c, doc);
  out << std::setprecision(8) << "vol_f = " << v;
  if (exact) out << "  (complete manifold: " << *exact << ")";
  else out << "  (complete manifold: infinite)";
  out << '\n';
  return 0;
}

}  // namespace

std::array<int, 2> parse_resolution(const std::string& text) {
  const auto x = text.find_first_of("xX");
  const std::string a = x == std::string::npos ? text : text.substr(0, x);
  const std::string b = x == std::string::npos ? text : text.substr(x + 1);
  const long n0 = parse_int("res", a), n1 = parse_int("res", b);
  if (n0 < 2 || n1 < 2 || n0 > 100000 || n1 > 100000) throw UsageError("res: counts out of range in '" + text + "'");
  return {static_cast<int>(n0), static_cast<int>(n1)};
}

std::vector<int> parse_ladder(const std::string& text) {
  std::vector<int> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const long v = parse_int("ladder", trim(item));
    if (v < 2) throw UsageError("ladder entries must be at least 2");
    if (!out.empty() && v <= out.back()) throw UsageError("ladder must be strictly increasing");
    out.push_back(static_cast<int>(v));
  }
  if (out.size() < 2) throw UsageError("ladder needs at least two entries");
  return out;
}

void apply_config_text(const std::string& text, RunConfig& config) {
  Settings s;
  settings_from_text(text, s);
  apply_settings(s, config);
}

bool parse_args(int argc, const char* const* argv, RunConfig& config, std::ostream& out) {
  CLI::App app{"Weighted Hodge theory toolkit"};
  app.name("fhodge");
  std::string command, config_path;
  app.add_option("command", command, "check | spectrum | harmonic | sweep | volume")->required();
  std::map<std::string, std::string> flags;
  std::vector<std::string> tol_classes;
  const std::vector<std::pair<std::string, std::string>> options{
      {"scenario", "flat_torus | flat_torus_perturbed | gaussian_plane | weighted_cylinder | cigar (check: all)"},
      {"res", "grid resolution NxM"},
      {"trunc", "half-width T of truncated axes"},
      {"eps", "perturbation amplitude of flat_torus_perturbed"},
      {"a", "cigar soliton constant"},
      {"seed", "random seed (default 1234)"},
      {"out", "report path (JSON; CSV for sweep)"},
      {"ladder", "sweep resolutions a,b,c"},
      {"degree", "spectrum: form degree 0 or 1"},
      {"k", "spectrum: number of eigenpairs"},
      {"fields", "CSV path for pointwise fields"},
      {"export-mm", "directory for Matrix Market operator export"},
      {"export-off", "path for OFF mesh export"}};
  for (const auto& [name, help] : options) app.add_option("--" + name, flags[name], help);
  app.add_option("--tol-class", tol_classes, "tolerance override NAME=VALUE (repeatable)");
  app.add_option("--config", config_path, "flat key = value config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return false;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  const auto it = command_names().find(command);
  if (it == command_names().end()) throw UsageError("unknown command '" + command + "'");
  config = RunConfig{};
  config.command = it->second;

  Settings settings;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw UsageError("cannot read config file " + config_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    settings_from_text(buffer.str(), settings);
  }
  for (const auto& [name, help] : options)
    if (app.count("--" + name) > 0) settings.emplace_back(name, flags[name]);
  for (const auto& t : tol_classes) settings.emplace_back("tol-class", t);
  apply_settings(settings, config);
  if (config.all_scenarios && config.command != Command::check)
    throw UsageError("--scenario all is only valid for check");
  return true;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (!config.all_scenarios) build_scenario(config.spec);  // validates the spec
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  try {
    export_artifacts(config, out);
    switch (config.command) {
      case Command::check: return run_check(config, out);
      case Command::spectrum: return run_spectrum(config, out);
      case Command::harmonic: return run_harmonic(config, out);
      case Command::sweep: return run_sweep(config, out);
      case Command::volume: return run_volume(config, out);
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    RunConfig config;
    if (!parse_args(argc, argv, config, out)) return 0;
    return run(config, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nrun 'fhodge --help' for usage\n";
    return kUsageExitCode;
  }
}

}  // namespace fhodge
