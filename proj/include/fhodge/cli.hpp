#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fhodge/errors.hpp"
#include "fhodge/geometry.hpp"
#include "fhodge/tolerances.hpp"

namespace fhodge {

enum class Command { check, spectrum, harmonic, sweep, volume };

inline constexpr std::uint64_t kDefaultSeed = 1234;
inline constexpr int kUsageExitCode = 64;

class UsageError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

struct RunConfig {
  Command command = Command::check;
  ScenarioSpec spec;
  /// check only: run every built-in scenario.
  bool all_scenarios = false;
  std::string out;
  std::uint64_t seed = kDefaultSeed;
  std::vector<int> ladder{16, 32, 64};
  ToleranceTable tol;
  /// Overrides in the order they were applied, embedded in reports.
  std::vector<std::string> tol_overrides;
  /// spectrum: form degree and number of eigenpairs.
  int degree = 1;
  int k = 6;
  std::string fields_csv;
  std::string export_matrices;
  std::string export_off;
};

/// Parses `fhodge <command> [flags]`. A `--config FILE` is read first; flags override it.
/// Throws UsageError on malformed input. Returns false when help was printed.
bool parse_args(int argc, const char* const* argv, RunConfig& config, std::ostream& out);

/// Applies one flat `key = value` config line set. Unknown keys throw UsageError.
void apply_config_text(const std::string& text, RunConfig& config);

/// Parses "NxM" (or "N" for square grids).
std::array<int, 2> parse_resolution(const std::string& text);
/// Parses "a,b,c" into a strictly increasing list.
std::vector<int> parse_ladder(const std::string& text);

/// Executes the command. Exit code: 0 all pass, 2 unresolved, 1 failure or error.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run with usage errors mapped to exit code 64.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fhodge
