#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "fhodge/geometry.hpp"
#include "fhodge/spectral.hpp"
#include "fhodge/tolerances.hpp"
#include "fhodge/verify.hpp"

namespace fhodge {

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json to_json(const CheckReport& report);
nlohmann::json to_json(const EigenResult& result);
nlohmann::json to_json(const HarmonicBasis& basis);
nlohmann::json to_json(const ToleranceTable& table);
nlohmann::json to_json(const ScenarioSpec& spec);

/// Counts of each verdict, keyed by verdict name.
nlohmann::json verdict_summary(const std::vector<CheckReport>& reports);

/// Fixed-width human-readable table, one row per check.
std::string render_table(const std::vector<CheckReport>& reports);

}  // namespace fhodge
