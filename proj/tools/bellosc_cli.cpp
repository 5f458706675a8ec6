// Experiment runner: seeded end-to-end pipelines, detector calibration,
// validation suites and setting scans, with JSON/CSV reporting.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bellosc/bellosc.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidConfig = 1;
constexpr int kExitCalibrationRefusal = 2;
constexpr int kExitValidationFailure = 3;

struct OutputOptions {
  std::string path;  // empty: stdout
  bool compact = false;
};

void emit(const nlohmann::json& j, const OutputOptions& out) {
  const std::string text = out.compact ? j.dump() + "\n" : j.dump(2) + "\n";
  if (out.path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out.path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + out.path);
  f << text;
}

bellosc::ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return bellosc::default_config();
  std::ifstream f(path);
  if (!f) throw bellosc::InvalidConfig("config file readable: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw bellosc::InvalidConfig(std::string("config file parses as JSON: ") + e.what());
  }
  return bellosc::config_from_json(j);
}

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  OutputOptions out;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("-c,--config", flags.config_path, "Experiment config JSON (defaults built in)");
  cmd->add_option("-s,--seed", flags.seed, "Master seed override");
  cmd->add_option("-w,--workers", flags.workers, "Worker thread count override");
  cmd->add_option("-o,--out", flags.out.path, "Write JSON output to this file (default stdout)");
  cmd->add_flag("--compact", flags.out.compact, "Single-line JSON output");
}

bellosc::ExperimentConfig effective_config(const CommonFlags& flags) {
  bellosc::ExperimentConfig cfg = load_config(flags.config_path);
  if (flags.seed) cfg.seed = *flags.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint position/momentum measurement simulator with CHSH-style analysis"};
  app.require_subcommand(1);

  // --- run ---------------------------------------------------------------
  CommonFlags run_flags;
  std::string csv_path;
  bool flip = false;
  bool override_calibration = false;
  bool include_timing = false;
  bool print_config = false;
  std::optional<int> bootstrap;
  std::optional<std::string> mode;
  CLI::App* run_cmd = app.add_subcommand("run", "Run the full experiment pipeline");
  add_common(run_cmd, run_flags);
  run_cmd->add_option("--csv", csv_path, "Also export per-window verdicts as CSV");
  run_cmd->add_flag("--flip", flip, "Flip the sharp/fuzzy sign convention for all run outcomes");
  run_cmd->add_flag("--override-calibration", override_calibration,
                    "Proceed even if a detector fails calibration");
  run_cmd->add_flag("--timing", include_timing,
                    "Attach wall-clock metrics to the report (breaks byte determinism)");
  run_cmd->add_option("--bootstrap", bootstrap, "Bootstrap resamples for correlation errors");
  run_cmd->add_option("--mode", mode, "Sampling mode: dual | single")
      ->check(CLI::IsMember({"dual", "single"}));
  run_cmd->add_flag("--print-config", print_config,
                    "Print the effective config JSON and exit");

  // --- calibrate -----------------------------------------------------------
  CommonFlags cal_flags;
  CLI::App* cal_cmd = app.add_subcommand("calibrate", "Individually test all four detectors");
  add_common(cal_cmd, cal_flags);

  // --- validate ------------------------------------------------------------
  CommonFlags val_flags;
  std::string suite_name;
  bellosc::ValidationOptions val_opt;
  CLI::App* val_cmd = app.add_subcommand("validate", "Run a validation suite");
  val_cmd->add_option("suite", suite_name, "singlet | lhv | inequalities")->required();
  val_cmd->add_option("-s,--seed", val_flags.seed, "Suite seed");
  val_cmd->add_option("-o,--out", val_flags.out.path, "Write JSON output to this file");
  val_cmd->add_flag("--compact", val_flags.out.compact, "Single-line JSON output");
  val_cmd->add_option("--singlet-trials", val_opt.singlet_trials_per_pair,
                      "Singlet trials per setting pair");
  val_cmd->add_option("--models", val_opt.lhv_models, "Number of random LHV models");
  val_cmd->add_option("--lhv-trials", val_opt.lhv_trials_per_pair, "LHV trials per setting pair");
  val_cmd->add_option("--simplex-draws", val_opt.simplex_draws,
                      "Random distributions per inequality check");

  // --- scan ----------------------------------------------------------------
  CommonFlags scan_flags;
  int scan_steps = 4;
  std::int64_t scan_trials = 10000;
  CLI::App* scan_cmd = app.add_subcommand("scan", "Scan singlet setting quadruples for max S");
  add_common(scan_cmd, scan_flags);
  scan_cmd->add_option("--steps", scan_steps, "Grid steps per angle over [0, pi)")
      ->check(CLI::PositiveNumber);
  scan_cmd->add_option("--trials", scan_trials, "Trials per setting pair")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalidConfig;
  }

  try {
    if (*run_cmd) {
      bellosc::ExperimentConfig cfg = effective_config(run_flags);
      cfg.flip_outcomes = cfg.flip_outcomes || flip;
      cfg.override_calibration = cfg.override_calibration || override_calibration;
      if (bootstrap) cfg.bootstrap_resamples = *bootstrap;
      if (mode) cfg.mode = *mode == "dual" ? bellosc::RunMode::kDual : bellosc::RunMode::kSingle;
      if (print_config) {
        emit(bellosc::config_to_json(cfg), run_flags.out);
        return kExitOk;
      }
      bellosc::validate(cfg);
      try {
        const bellosc::RunReport report = bellosc::run_experiment(cfg, run_flags.workers.value_or(1));
        emit(bellosc::report_to_json(report, include_timing), run_flags.out);
        if (!csv_path.empty()) {
          std::ofstream csv(csv_path, std::ios::binary);
          if (!csv) throw std::runtime_error("cannot open CSV file: " + csv_path);
          bellosc::write_csv(csv, report);
        }
        if (!include_timing) {
          std::cerr << "run: " << report.timing.total_trials << " trials in "
                    << report.timing.wall_seconds << " s ("
                    << static_cast<std::int64_t>(report.timing.trials_per_second)
                    << " trials/s)\n";
        }
      } catch (const bellosc::CalibrationRefusal& refusal) {
        nlohmann::json j;
        j["schema_version"] = bellosc::kSchemaVersion;
        j["kind"] = "calibration_refusal";
        j["error"] = refusal.what();
        j["calibration"] = nlohmann::json::array();
        for (const auto& r : refusal.reports()) j["calibration"].push_back(bellosc::calibration_to_json(r));
        emit(j, run_flags.out);
        return kExitCalibrationRefusal;
      }
      return kExitOk;
    }

    if (*cal_cmd) {
      const bellosc::ExperimentConfig cfg = effective_config(cal_flags);
      bellosc::validate(cfg);
      const auto reports = bellosc::run_calibration(cfg);
      nlohmann::json j;
      j["schema_version"] = bellosc::kSchemaVersion;
      j["kind"] = "calibration_report";
      j["calibration"] = nlohmann::json::array();
      bool all_pass = true;
      for (const auto& r : reports) {
        j["calibration"].push_back(bellosc::calibration_to_json(r));
        all_pass = all_pass && r.pass;
      }
      j["all_pass"] = all_pass;
      emit(j, cal_flags.out);
      return kExitOk;
    }

    if (*val_cmd) {
      bellosc::ValidationSuite suite;
      if (suite_name == "singlet")
        suite = bellosc::ValidationSuite::kSinglet;
      else if (suite_name == "lhv")
        suite = bellosc::ValidationSuite::kLhv;
      else if (suite_name == "inequalities")
        suite = bellosc::ValidationSuite::kInequalities;
      else
        throw bellosc::InvalidConfig("validation suite one of singlet|lhv|inequalities");
      if (val_flags.seed) val_opt.seed = *val_flags.seed;
      const bellosc::ValidationReport report = bellosc::run_validation(suite, val_opt);
      emit(bellosc::validation_to_json(report), val_flags.out);
      return report.pass ? kExitOk : kExitValidationFailure;
    }

    if (*scan_cmd) {
      std::vector<bellosc::SettingsQuadruple> grid;
      grid.reserve(static_cast<std::size_t>(scan_steps) * scan_steps * scan_steps * scan_steps);
      const double step = std::numbers::pi / scan_steps;
      for (int ia = 0; ia < scan_steps; ++ia)
        for (int iap = 0; iap < scan_steps; ++iap)
          for (int ib = 0; ib < scan_steps; ++ib)
            for (int ibp = 0; ibp < scan_steps; ++ibp)
              grid.push_back({ia * step, iap * step, ib * step, ibp * step});
      const std::uint64_t seed = scan_flags.seed.value_or(20240901ULL);
      const bellosc::ScanTable table = bellosc::scan_settings(grid, scan_trials, seed);
      nlohmann::json j;
      j["schema_version"] = bellosc::kSchemaVersion;
      j["kind"] = "scan_report";
      j["entries"] = nlohmann::json::array();
      for (const auto& e : table.entries) {
        j["entries"].push_back({{"a", e.settings.a},
                                {"a_prime", e.settings.a_prime},
                                {"b", e.settings.b},
                                {"b_prime", e.settings.b_prime},
                                {"s", e.s},
                                {"std_error", e.std_error}});
      }
      const auto& best = table.entries[table.argmax];
      j["argmax"] = {{"a", best.settings.a},
                     {"a_prime", best.settings.a_prime},
                     {"b", best.settings.b},
                     {"b_prime", best.settings.b_prime},
                     {"s", best.s}};
      emit(j, scan_flags.out);
      return kExitOk;
    }
  } catch (const bellosc::InvalidConfig& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidConfig;
  }
  return kExitOk;
}
