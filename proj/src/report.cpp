#include "fhodge/report.hpp"

#include <cstdio>
#include <sstream>

namespace fhodge {

using nlohmann::json;

json to_json(const CheckReport& r) {
  json details = json::array();
  for (const auto& [k, v] : r.details) details.push_back({{"name", k}, {"value", v}});
  return {{"check", r.check_name},         {"scenario", r.scenario},   {"resolution", r.resolution},
          {"value", r.value},              {"tolerance", r.tolerance}, {"comparison", r.comparison},
          {"verdict", to_string(r.verdict)}, {"provenance", r.provenance}, {"details", details},
          {"notes", r.notes}};
}

json to_json(const EigenResult& e) {
  return {{"eigenvalues", std::vector<double>(e.eigenvalues.data(), e.eigenvalues.data() + e.eigenvalues.size())},
          {"residuals", e.residuals},
          {"iterations", e.iterations},
          {"block_size", e.block_size},
          {"shift", e.shift},
          {"converged", e.converged}};
}

json to_json(const HarmonicBasis& b) {
  return {{"dimension", b.dimension},
          {"gap_ratio", b.gap_ratio},
          {"resolved", b.resolved},
          {"spectrum", std::vector<double>(b.spectrum.data(), b.spectrum.data() + b.spectrum.size())},
          {"eigen_residuals", b.eigen_residuals},
          {"closed_residuals", b.closed_residuals},
          {"coclosed_residuals", b.coclosed_residuals},
          {"smallest_one_form_eigenvalue_proxy", b.smallest_nonkernel()},
          {"note", b.note}};
}

json to_json(const ToleranceTable& t) {
  json out = json::object();
  for (const auto& [k, v] : t.entries()) out[k] = v;
  return out;
}

json to_json(const ScenarioSpec& s) {
  json out = {{"name", to_string(s.name)},
              {"resolution", {s.resolution[0], s.resolution[1]}},
              {"truncation", s.truncation},
              {"epsilon", s.epsilon}};
  out["soliton_constant_a"] = s.soliton_constant_a ? json(*s.soliton_constant_a) : json(nullptr);
  return out;
}

json verdict_summary(const std::vector<CheckReport>& reports) {
  json out = {{"pass", 0}, {"fail", 0}, {"unresolved", 0}, {"skipped", 0}, {"not_applicable", 0}};
  for (const auto& r : reports) out[std::string(to_string(r.verdict))] = out[std::string(to_string(r.verdict))].get<int>() + 1;
  return out;
}

std::string render_table(const std::vector<CheckReport>& reports) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-22s %-32s %-14s %13s %2s %-13s\n", "scenario", "check", "verdict", "value", "", "tolerance");
  os << line << std::string(100, '-') << '\n';
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-22s %-32s %-14s %13.6g %2s %-13.6g\n", r.scenario.c_str(), r.check_name.c_str(),
                  std::string(to_string(r.verdict)).c_str(), r.value, r.comparison.c_str(), r.tolerance);
    os << line;
    for (const auto& n : r.notes) os << "    " << n << '\n';
  }
  return os.str();
}

}  // namespace fhodge
