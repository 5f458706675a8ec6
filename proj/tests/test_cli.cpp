// End-to-end checks of the command-line surface: subcommands, exit codes
// and output files, driven through the real binary.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#ifndef BELLOSC_CLI_PATH
#error "BELLOSC_CLI_PATH must point at the built CLI binary"
#endif

namespace {

namespace fs = std::filesystem;

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "bellosc_cli_tests";
  fs::create_directories(dir);
  return dir;
}

CommandResult run_cli(const std::string& args, const std::string& out_name = "") {
  const fs::path out =
      work_dir() / (out_name.empty() ? "stdout.txt" : out_name);
  const std::string cmd =
      std::string(BELLOSC_CLI_PATH) + " " + args + " >" + out.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  CommandResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream f(out);
  std::ostringstream os;
  os << f.rdbuf();
  r.output = os.str();
  return r;
}

fs::path write_file(const std::string& name, const std::string& content) {
  const fs::path p = work_dir() / name;
  std::ofstream f(p, std::ios::binary);
  f << content;
  return p;
}

}  // namespace

TEST(Cli, PrintConfigEmitsValidJson) {
  const CommandResult r = run_cli("run --print-config");
  EXPECT_EQ(r.exit_code, 0);
  const nlohmann::json j = nlohmann::json::parse(r.output);
  EXPECT_EQ(j.at("schema_version").get<int>(), 1);
  EXPECT_TRUE(j.contains("thresholds"));
}

TEST(Cli, RunWithReducedConfigSucceeds) {
  const fs::path cfg = write_file("small.json", R"({"windows_per_pair": 50, "seed": 11})");
  const CommandResult r = run_cli("run --config " + cfg.string());
  EXPECT_EQ(r.exit_code, 0);
  const nlohmann::json j = nlohmann::json::parse(r.output);
  EXPECT_EQ(j.at("kind").get<std::string>(), "run_report");
  EXPECT_EQ(j.at("chsh").at("sample_mode").get<std::string>(), "dual");
  EXPECT_FALSE(j.contains("timing"));
}

TEST(Cli, SeedOverrideChangesTheReport) {
  const fs::path cfg = write_file("seeded.json", R"({"windows_per_pair": 50})");
  const CommandResult a = run_cli("run --config " + cfg.string() + " --seed 1");
  const CommandResult b = run_cli("run --config " + cfg.string() + " --seed 2");
  EXPECT_EQ(a.exit_code, 0);
  EXPECT_EQ(b.exit_code, 0);
  EXPECT_NE(a.output, b.output);
}

TEST(Cli, MalformedJsonIsInvalidConfig) {
  const fs::path cfg = write_file("broken.json", "{not json");
  EXPECT_EQ(run_cli("run --config " + cfg.string()).exit_code, 1);
}

TEST(Cli, ViolatedInvariantIsInvalidConfig) {
  const fs::path cfg = write_file("zero_trials.json", R"({"windows_per_pair": 0})");
  EXPECT_EQ(run_cli("run --config " + cfg.string()).exit_code, 1);

  const fs::path noise = write_file("bad_noise.json", R"({"joint_noise": {"sx": 0.1, "sp": 0.1}})");
  EXPECT_EQ(run_cli("run --config " + noise.string()).exit_code, 1);
}

TEST(Cli, CalibrationRefusalExitsTwo) {
  const fs::path cfg = write_file(
      "hopeless_cal.json",
      R"({"windows_per_pair": 50, "calibration": {"source_std_scale": 2.0}})");
  const CommandResult r = run_cli("run --config " + cfg.string());
  EXPECT_EQ(r.exit_code, 2);
  const nlohmann::json j = nlohmann::json::parse(r.output);
  EXPECT_EQ(j.at("kind").get<std::string>(), "calibration_refusal");
  EXPECT_EQ(j.at("calibration").size(), 4u);

  const CommandResult forced =
      run_cli("run --config " + cfg.string() + " --override-calibration");
  EXPECT_EQ(forced.exit_code, 0);
}

TEST(Cli, SingleModeRuns) {
  const fs::path cfg = write_file("single.json", R"({"windows_per_pair": 50, "mode": "single"})");
  const CommandResult r = run_cli("run --config " + cfg.string());
  EXPECT_EQ(r.exit_code, 0);
  const nlohmann::json j = nlohmann::json::parse(r.output);
  EXPECT_EQ(j.at("chsh").at("sample_mode").get<std::string>(), "single");
}

TEST(Cli, CsvExportWritesVerdictRows) {
  const fs::path cfg = write_file("csv.json", R"({"windows_per_pair": 25, "seed": 3})");
  const fs::path csv = work_dir() / "verdicts.csv";
  const CommandResult r =
      run_cli("run --config " + cfg.string() + " --csv " + csv.string());
  EXPECT_EQ(r.exit_code, 0);
  std::ifstream f(csv);
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, "window_index,pair_label,x_outcome,p_outcome,indeterminate_flag");
  int rows = 0;
  std::string line;
  while (std::getline(f, line))
    if (!line.empty()) ++rows;
  EXPECT_EQ(rows, 4 * 25);
}

TEST(Cli, CalibrateReportsAllFourDetectors) {
  const CommandResult r = run_cli("calibrate");
  EXPECT_EQ(r.exit_code, 0);
  const nlohmann::json j = nlohmann::json::parse(r.output);
  EXPECT_EQ(j.at("kind").get<std::string>(), "calibration_report");
  EXPECT_EQ(j.at("calibration").size(), 4u);
  EXPECT_TRUE(j.at("all_pass").get<bool>());
}

TEST(Cli, ValidateInequalitiesPasses) {
  const CommandResult r = run_cli("validate inequalities --simplex-draws 500");
  EXPECT_EQ(r.exit_code, 0);
  const nlohmann::json j = nlohmann::json::parse(r.output);
  EXPECT_TRUE(j.at("pass").get<bool>());
}

TEST(Cli, ValidateUnknownSuiteIsUsageError) {
  EXPECT_EQ(run_cli("validate spooky").exit_code, 1);
}

TEST(Cli, FailedSuiteExitsThree) {
  // Starved singlet statistics cannot resolve the saturation tolerance.
  const CommandResult r = run_cli("validate singlet --singlet-trials 50 -s 1");
  EXPECT_EQ(r.exit_code, 3);
  const nlohmann::json j = nlohmann::json::parse(r.output);
  EXPECT_FALSE(j.at("pass").get<bool>());
}

TEST(Cli, ScanReportsArgmax) {
  const CommandResult r = run_cli("scan --steps 2 --trials 400 -s 5");
  EXPECT_EQ(r.exit_code, 0);
  const nlohmann::json j = nlohmann::json::parse(r.output);
  EXPECT_EQ(j.at("kind").get<std::string>(), "scan_report");
  EXPECT_EQ(j.at("entries").size(), 16u);
  EXPECT_TRUE(j.contains("argmax"));
}

TEST(Cli, UnknownFlagIsUsageError) {
  EXPECT_EQ(run_cli("run --no-such-flag").exit_code, 1);
}
