#pragma once

#include <map>
#include <string>

namespace fhodge {

/// Central tolerance table. Every check reads its threshold from here and reports it.
struct ToleranceTable {
  double machine = 1e-12;
  double spectral = 1e-8;
  double kernel_abs = 1e-10;
  double kernel_rel = 1e-8;
  double gap_ratio_min = 1e4;
  double eigen_residual = 1e-9;
  double kato = 1e-8;
  double bochner_order = 1.8;
  double const_norm_rel_std = 1e-6;
  /// Parallelism bound is parallel_factor * h^2 * parallel_constant.
  double parallel_factor = 5.0;
  double parallel_constant = 1.0;
  double volume_rel = 5e-3;
  double soliton = 1e-6;
  double lambda1_factor = 0.95;
  double gaussian_lambda1_rel = 0.02;
  double one_form_floor = 0.9;
  double cosine = 1e-6;
  /// Relative change allowed between resolution/truncation levels in stability checks.
  double stability_rel = 0.1;

  /// Name -> value view, in a fixed order.
  std::map<std::string, double> entries() const;
  /// Throws ConfigError on an unknown name or a non-positive value.
  void set(const std::string& name, double value);
  /// Parses "NAME=VALUE".
  void apply_override(const std::string& assignment);
};

}  // namespace fhodge
