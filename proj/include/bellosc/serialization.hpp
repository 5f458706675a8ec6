#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "bellosc/errors.hpp"
#include "bellosc/experiment.hpp"

namespace bellosc {

inline constexpr int kSchemaVersion = 1;

namespace detail {

inline std::string to_string(Observable obs) {
  return obs == Observable::kPosition ? "position" : "momentum";
}

inline std::string to_string(SettingLabel label) {
  return label == SettingLabel::kUnprimed ? "unprimed" : "primed";
}

inline std::string to_string(InitialStateKind kind) {
  switch (kind) {
    case InitialStateKind::kGround:
      return "ground";
    case InitialStateKind::kCoherent:
      return "coherent";
    case InitialStateKind::kSqueezed:
      return "squeezed";
  }
  return "ground";
}

inline InitialStateKind state_kind_from(const std::string& s) {
  if (s == "ground") return InitialStateKind::kGround;
  if (s == "coherent") return InitialStateKind::kCoherent;
  if (s == "squeezed") return InitialStateKind::kSqueezed;
  throw InvalidConfig("initial_state.kind one of ground|coherent|squeezed");
}

inline nlohmann::json detector_json(const DetectorConfig& det) {
  return {{"phase", det.phase},
          {"noise_std", det.noise_std},
          {"failure_prob", det.failure_prob}};
}

inline void detector_from(const nlohmann::json& j, DetectorConfig& det, Observable obs,
                          SettingLabel label) {
  det.observable = obs;
  det.label = label;
  det.phase = j.value("phase", det.phase);
  det.noise_std = j.value("noise_std", det.noise_std);
  det.failure_prob = j.value("failure_prob", det.failure_prob);
}

}  // namespace detail

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["physical"] = {{"mass", cfg.physical.mass},
                   {"omega", cfg.physical.omega},
                   {"hbar", cfg.physical.hbar}};
  j["initial_state"] = {{"kind", detail::to_string(cfg.initial_state.kind)},
                        {"x0", cfg.initial_state.x0},
                        {"p0", cfg.initial_state.p0},
                        {"r", cfg.initial_state.r}};
  j["joint_noise"] = {{"sx", cfg.joint_noise.sx}, {"sp", cfg.joint_noise.sp}};
  j["detectors"] = {{"x", detail::detector_json(cfg.det_x)},
                    {"x_prime", detail::detector_json(cfg.det_x_prime)},
                    {"p", detail::detector_json(cfg.det_p)},
                    {"p_prime", detail::detector_json(cfg.det_p_prime)}};
  j["thresholds"] = {{"epsilon_x", cfg.thresholds.epsilon_x},
                     {"epsilon_p", cfg.thresholds.epsilon_p}};
  j["window_size"] = cfg.window_size;
  j["windows_per_pair"] = cfg.windows_per_pair;
  j["acquisition"] = {{"enabled", cfg.acquisition.enabled},
                      {"adc_bits", cfg.acquisition.adc_bits},
                      {"hold_period", cfg.acquisition.hold_period},
                      {"jitter_std", cfg.acquisition.jitter_std},
                      {"auto_range", cfg.acquisition.auto_range},
                      {"vmin", cfg.acquisition.vmin},
                      {"vmax", cfg.acquisition.vmax}};
  j["calibration"] = {{"windows", cfg.calibration.windows},
                      {"source_std_scale", cfg.calibration.source_std_scale}};
  j["seed"] = cfg.seed;
  j["mode"] = cfg.mode == RunMode::kDual ? "dual" : "single";
  j["beam_width"] = cfg.beam_width;
  j["flip_outcomes"] = cfg.flip_outcomes;
  j["override_calibration"] = cfg.override_calibration;
  j["bootstrap_resamples"] = cfg.bootstrap_resamples;
  j["min_throughput_tps"] = cfg.min_throughput_tps;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg = default_config();
  if (j.contains("schema_version") && j.at("schema_version").get<int>() != kSchemaVersion)
    throw InvalidConfig("schema_version supported");
  if (j.contains("physical")) {
    const auto& p = j.at("physical");
    cfg.physical.mass = p.value("mass", cfg.physical.mass);
    cfg.physical.omega = p.value("omega", cfg.physical.omega);
    cfg.physical.hbar = p.value("hbar", cfg.physical.hbar);
  }
  if (j.contains("initial_state")) {
    const auto& s = j.at("initial_state");
    if (s.contains("kind")) cfg.initial_state.kind = detail::state_kind_from(s.at("kind"));
    cfg.initial_state.x0 = s.value("x0", cfg.initial_state.x0);
    cfg.initial_state.p0 = s.value("p0", cfg.initial_state.p0);
    cfg.initial_state.r = s.value("r", cfg.initial_state.r);
  }
  if (j.contains("joint_noise")) {
    cfg.joint_noise.sx = j.at("joint_noise").value("sx", cfg.joint_noise.sx);
    cfg.joint_noise.sp = j.at("joint_noise").value("sp", cfg.joint_noise.sp);
  }
  if (j.contains("detectors")) {
    const auto& d = j.at("detectors");
    if (d.contains("x"))
      detail::detector_from(d.at("x"), cfg.det_x, Observable::kPosition, SettingLabel::kUnprimed);
    if (d.contains("x_prime"))
      detail::detector_from(d.at("x_prime"), cfg.det_x_prime, Observable::kPosition,
                            SettingLabel::kPrimed);
    if (d.contains("p"))
      detail::detector_from(d.at("p"), cfg.det_p, Observable::kMomentum, SettingLabel::kUnprimed);
    if (d.contains("p_prime"))
      detail::detector_from(d.at("p_prime"), cfg.det_p_prime, Observable::kMomentum,
                            SettingLabel::kPrimed);
  }
  if (j.contains("thresholds")) {
    cfg.thresholds.epsilon_x = j.at("thresholds").value("epsilon_x", cfg.thresholds.epsilon_x);
    cfg.thresholds.epsilon_p = j.at("thresholds").value("epsilon_p", cfg.thresholds.epsilon_p);
  }
  cfg.window_size = j.value("window_size", cfg.window_size);
  cfg.windows_per_pair = j.value("windows_per_pair", cfg.windows_per_pair);
  if (j.contains("acquisition")) {
    const auto& a = j.at("acquisition");
    cfg.acquisition.enabled = a.value("enabled", cfg.acquisition.enabled);
    cfg.acquisition.adc_bits = a.value("adc_bits", cfg.acquisition.adc_bits);
    cfg.acquisition.hold_period = a.value("hold_period", cfg.acquisition.hold_period);
    cfg.acquisition.jitter_std = a.value("jitter_std", cfg.acquisition.jitter_std);
    cfg.acquisition.auto_range = a.value("auto_range", cfg.acquisition.auto_range);
    cfg.acquisition.vmin = a.value("vmin", cfg.acquisition.vmin);
    cfg.acquisition.vmax = a.value("vmax", cfg.acquisition.vmax);
  }
  if (j.contains("calibration")) {
    cfg.calibration.windows = j.at("calibration").value("windows", cfg.calibration.windows);
    cfg.calibration.source_std_scale =
        j.at("calibration").value("source_std_scale", cfg.calibration.source_std_scale);
  }
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("mode")) {
    const std::string mode = j.at("mode");
    if (mode == "dual")
      cfg.mode = RunMode::kDual;
    else if (mode == "single")
      cfg.mode = RunMode::kSingle;
    else
      throw InvalidConfig("mode one of dual|single");
  }
  cfg.beam_width = j.value("beam_width", cfg.beam_width);
  cfg.flip_outcomes = j.value("flip_outcomes", cfg.flip_outcomes);
  cfg.override_calibration = j.value("override_calibration", cfg.override_calibration);
  cfg.bootstrap_resamples = j.value("bootstrap_resamples", cfg.bootstrap_resamples);
  cfg.min_throughput_tps = j.value("min_throughput_tps", cfg.min_throughput_tps);
  return cfg;
}

inline nlohmann::json calibration_to_json(const CalibrationReport& r) {
  return {{"detector", detail::to_string(r.detector)},
          {"setting", detail::to_string(r.setting)},
          {"trials", r.trials},
          {"minus_count", r.minus_count},
          {"indeterminate_count", r.indeterminate_count},
          {"p_minus", r.p_minus},
          {"pass", r.pass}};
}

inline nlohmann::json correlation_to_json(const CorrelationEstimate& e) {
  return {{"e", e.e}, {"std_error", e.std_error}, {"n", e.n}};
}

// Timing is volatile by nature; it is only attached on request so that
// identical (config, seed) runs serialize to identical bytes.
inline nlohmann::json report_to_json(const RunReport& report, bool include_timing = false) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "run_report";
  j["config"] = config_to_json(report.config);
  j["calibration"] = nlohmann::json::array();
  for (const CalibrationReport& r : report.calibration) j["calibration"].push_back(calibration_to_json(r));
  j["pairs"] = nlohmann::json::array();
  for (const PairResult& p : report.pairs) {
    nlohmann::json pj;
    pj["label"] = p.label;
    pj["x_setting"] = detail::to_string(p.x_label);
    pj["p_setting"] = detail::to_string(p.p_label);
    pj["counts"] = {{"pp", p.table.n_pp},
                    {"pm", p.table.n_pm},
                    {"mp", p.table.n_mp},
                    {"mm", p.table.n_mm}};
    pj["total"] = p.table.total();
    pj["indeterminate"] = p.indeterminate;
    pj["correlation"] = correlation_to_json(p.corr);
    if (p.bootstrap_std_error > 0.0) pj["bootstrap_std_error"] = p.bootstrap_std_error;
    j["pairs"].push_back(pj);
  }
  const ChshResult& c = report.chsh_result;
  j["chsh"] = {{"s", c.s},
               {"std_error", c.std_error},
               {"classical_bound", c.classical_bound},
               {"tsirelson", c.tsirelson},
               {"violated", c.violated},
               {"sample_mode", c.mode == SampleMode::kDual ? "dual" : "single"},
               {"correlations",
                {{"XP", correlation_to_json(c.e_xp)},
                 {"X'P", correlation_to_json(c.e_xpp)},
                 {"XP'", correlation_to_json(c.e_xppr)},
                 {"X'P'", correlation_to_json(c.e_xpppr)}}}};
  j["indeterminate_total"] = report.indeterminate_total;
  if (include_timing) {
    j["timing"] = {{"wall_seconds", report.timing.wall_seconds},
                   {"total_trials", report.timing.total_trials},
                   {"trials_per_second", report.timing.trials_per_second},
                   {"met_target", report.timing.met_target}};
  }
  return j;
}

inline nlohmann::json validation_to_json(const ValidationReport& report) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "validation_report";
  j["suite"] = report.suite;
  j["pass"] = report.pass;
  j["checks"] = nlohmann::json::array();
  for (const ValidationCheck& c : report.checks) {
    j["checks"].push_back(
        {{"name", c.name}, {"pass", c.pass}, {"observed", c.observed}, {"bound", c.bound}});
  }
  return j;
}

// Raw per-window verdicts for external statistics packages.
inline void write_csv(std::ostream& os, const RunReport& report) {
  os << "window_index,pair_label,x_outcome,p_outcome,indeterminate_flag\n";
  for (const PairResult& p : report.pairs) {
    for (const PairVerdict& v : p.verdicts) {
      os << v.window_index << ',' << p.label << ',' << v.x_outcome << ',' << v.p_outcome << ','
         << (v.indeterminate() ? 1 : 0) << '\n';
    }
  }
}

}  // namespace bellosc
