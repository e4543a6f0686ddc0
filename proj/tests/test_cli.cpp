#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fhodge/cli.hpp"
#include "fhodge/report.hpp"
#include "fhodge/verify.hpp"

using namespace fhodge;

namespace {

int run_cli(std::vector<const char*> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "fhodge");
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(args.size()), args.data(), out, err);
  if (out_text) *out_text = out.str() + err.str();
  return code;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

CheckReport with_verdict(Verdict v) {
  CheckReport r;
  r.verdict = v;
  return r;
}

}  // namespace

TEST(Cli, ParsesResolutionsAndLadders) {
  EXPECT_EQ(parse_resolution("32x16"), (std::array<int, 2>{32, 16}));
  EXPECT_EQ(parse_resolution("24"), (std::array<int, 2>{24, 24}));
  EXPECT_THROW(parse_resolution("32xq"), UsageError);
  EXPECT_THROW(parse_resolution("1x8"), UsageError);
  EXPECT_EQ(parse_ladder("16, 32,64"), (std::vector<int>{16, 32, 64}));
  EXPECT_THROW(parse_ladder("32,16"), UsageError);
  EXPECT_THROW(parse_ladder("32"), UsageError);
}

TEST(Cli, ConfigTextSetsScenarioThenOverrides) {
  RunConfig c;
  apply_config_text("# comment\nres = 40x40\nscenario = cigar\ntol.kato = 1e-7\nseed=7\n", c);
  EXPECT_EQ(c.spec.name, ScenarioName::cigar);
  EXPECT_EQ(c.spec.resolution, (std::array<int, 2>{40, 40}));
  EXPECT_EQ(c.spec.truncation, 8.0);
  EXPECT_EQ(c.tol.kato, 1e-7);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_THROW(apply_config_text("colour = blue\n", c), UsageError);
  EXPECT_THROW(apply_config_text("tol.kato = -1\n", c), UsageError);
  EXPECT_THROW(apply_config_text("no equals sign\n", c), UsageError);
}

TEST(Cli, UsageErrorsExitWith64) {
  EXPECT_EQ(run_cli({}), kUsageExitCode);
  EXPECT_EQ(run_cli({"frobnicate"}), kUsageExitCode);
  EXPECT_EQ(run_cli({"volume", "--scenario", "moebius"}), kUsageExitCode);
  EXPECT_EQ(run_cli({"volume", "--scenario", "gaussian_plane", "--trunc", "-1"}), kUsageExitCode);
  EXPECT_EQ(run_cli({"volume", "--tol-class", "bogus=1"}), kUsageExitCode);
  EXPECT_EQ(run_cli({"spectrum", "--scenario", "all"}), kUsageExitCode);
  EXPECT_EQ(run_cli({"volume", "--config", "/nonexistent/fhodge.cfg"}), kUsageExitCode);
}

TEST(Cli, HelpExitsZero) {
  std::string text;
  EXPECT_EQ(run_cli({"--help"}, &text), 0);
  EXPECT_NE(text.find("--scenario"), std::string::npos);
}

TEST(Cli, VolumePrintsValue) {
  std::string text;
  EXPECT_EQ(run_cli({"volume", "--scenario", "flat_torus", "--res", "16x16"}, &text), 0);
  EXPECT_NE(text.find("vol_f = 39.478418"), std::string::npos) << text;
}

TEST(Cli, CheckWritesReportAndSidecar) {
  const auto dir = std::filesystem::temp_directory_path() / "fhodge_cli_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "torus.json").string();
  std::string text;
  EXPECT_EQ(run_cli({"check", "--scenario", "flat_torus", "--res", "16x16", "--out", path.c_str()}, &text), 0);
  EXPECT_NE(text.find("adjointness"), std::string::npos);
  const auto doc = nlohmann::json::parse(slurp(path));
  EXPECT_EQ(doc["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(doc["exit_code"], 0);
  EXPECT_EQ(doc["scenarios"][0]["scenario"], "flat_torus");
  EXPECT_TRUE(std::filesystem::exists(path + ".meta.json"));
  std::filesystem::remove_all(dir);
}

TEST(Cli, ToleranceOverrideCanForceFailure) {
  std::string text;
  EXPECT_EQ(run_cli({"check", "--scenario", "flat_torus", "--res", "16x16", "--tol-class", "gap_ratio_min=1e300"},
                    &text),
            2);
  EXPECT_EQ(run_cli({"check", "--scenario", "weighted_cylinder", "--res", "16x16", "--tol-class", "volume_rel=1e-12"},
                    &text),
            1);
}

TEST(Cli, ExportsOperatorsAndMesh) {
  const auto dir = std::filesystem::temp_directory_path() / "fhodge_export_test";
  const auto off = (dir / "mesh.off").string();
  std::filesystem::create_directories(dir);
  EXPECT_EQ(run_cli({"volume", "--scenario", "cigar", "--res", "16x16", "--export-mm", dir.string().c_str(),
                     "--export-off", off.c_str()}),
            0);
  const auto mm = slurp(dir / "d0.mtx");
  EXPECT_EQ(mm.rfind("%%MatrixMarket matrix coordinate real general", 0), 0u);
  EXPECT_TRUE(std::filesystem::exists(off));
  std::filesystem::remove_all(dir);
}

TEST(Verify, ExitCodeRule) {
  EXPECT_EQ(exit_code_for({with_verdict(Verdict::pass), with_verdict(Verdict::not_applicable)}), 0);
  EXPECT_EQ(exit_code_for({with_verdict(Verdict::pass), with_verdict(Verdict::unresolved)}), 2);
  EXPECT_EQ(exit_code_for({with_verdict(Verdict::unresolved), with_verdict(Verdict::fail)}), 1);
  EXPECT_EQ(exit_code_for({with_verdict(Verdict::skipped)}), 0);
}

TEST(Report, CheckReportJsonCarriesTolerance) {
  CheckReport r;
  r.check_name = "kato";
  r.scenario = "flat_torus";
  r.value = -1e-9;
  r.tolerance = -1e-8;
  r.comparison = ">=";
  r.details.emplace_back("form0_min_gap", -1e-9);
  const auto j = to_json(r);
  EXPECT_EQ(j["check"], "kato");
  EXPECT_EQ(j["verdict"], "pass");
  EXPECT_EQ(j["tolerance"], -1e-8);
  EXPECT_NE(render_table({r}).find("kato"), std::string::npos);
}

TEST(Tolerances, RejectUnknownAndNonPositive) {
  ToleranceTable t;
  EXPECT_THROW(t.set("nothing", 1.0), ConfigError);
  EXPECT_THROW(t.set("kato", 0.0), ConfigError);
  t.apply_override("kato=2e-8");
  EXPECT_EQ(t.kato, 2e-8);
  EXPECT_EQ(t.entries().at("kato"), 2e-8);
}
