#include "fhodge/tolerances.hpp"

#include <cmath>
#include <stdexcept>

#include "fhodge/errors.hpp"

namespace fhodge {

namespace {

template <typename Fn>
void for_each_entry(ToleranceTable& t, Fn&& fn) {
  fn("machine", t.machine);
  fn("spectral", t.spectral);
  fn("kernel_abs", t.kernel_abs);
  fn("kernel_rel", t.kernel_rel);
  fn("gap_ratio_min", t.gap_ratio_min);
  fn("eigen_residual", t.eigen_residual);
  fn("kato", t.kato);
  fn("bochner_order", t.bochner_order);
  fn("const_norm_rel_std", t.const_norm_rel_std);
  fn("parallel_factor", t.parallel_factor);
  fn("parallel_constant", t.parallel_constant);
  fn("volume_rel", t.volume_rel);
  fn("soliton", t.soliton);
  fn("lambda1_factor", t.lambda1_factor);
  fn("gaussian_lambda1_rel", t.gaussian_lambda1_rel);
  fn("one_form_floor", t.one_form_floor);
  fn("cosine", t.cosine);
  fn("stability_rel", t.stability_rel);
}

}  // namespace

std::map<std::string, double> ToleranceTable::entries() const {
  std::map<std::string, double> out;
  auto copy = *this;
  for_each_entry(copy, [&](const char* name, double& v) { out[name] = v; });
  return out;
}

void ToleranceTable::set(const std::string& name, double value) {
  if (!std::isfinite(value) || value <= 0.0) throw ConfigError("tolerance " + name + " must be positive");
  bool found = false;
  for_each_entry(*this, [&](const char* n, double& v) {
    if (name == n) {
      v = value;
      found = true;
    }
  });
  if (!found) throw ConfigError("unknown tolerance class '" + name + "'");
}

void ToleranceTable::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("expected NAME=VALUE, got '" + assignment + "'");
  const std::string name = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw ConfigError("tolerance " + name + ": '" + text + "' is not a number");
  }
  set(name, value);
}

}  // namespace fhodge
