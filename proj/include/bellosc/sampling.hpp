#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "bellosc/errors.hpp"
#include "bellosc/measurement.hpp"
#include "bellosc/oscillator.hpp"
#include "bellosc/random.hpp"

namespace bellosc {

// Sharp/fuzzy decision thresholds. Their product sits strictly below the
// uncertainty floor hbar/2, so "sharp on both detectors at once" is the
// forbidden double-positive.
struct ThresholdConfig {
  double epsilon_x = 0.0;
  double epsilon_p = 0.0;
};

inline void validate(const ThresholdConfig& th, const PhysicalConfig& cfg) {
  if (!(th.epsilon_x > 0.0)) throw InvalidConfig("thresholds.epsilon_x > 0");
  if (!(th.epsilon_p > 0.0)) throw InvalidConfig("thresholds.epsilon_p > 0");
  if (!(th.epsilon_x * th.epsilon_p < 0.5 * cfg.hbar))
    throw InvalidConfig("thresholds.epsilon_x * thresholds.epsilon_p < hbar/2");
}

// Spread over one estimation window. Indeterminate when fewer than two
// readings survived detector failures; such windows are tallied, never
// imputed.
struct SpreadEstimate {
  double delta = 0.0;
  std::int64_t valid_count = 0;
  bool determinate = false;
};

// Unbiased (n-1) sample standard deviation of the non-failed readings,
// accumulated with Welford's one-pass recurrence.
inline SpreadEstimate estimate_spread(std::span<const Reading> window) {
  SpreadEstimate est;
  double mean = 0.0;
  double m2 = 0.0;
  for (const Reading& r : window) {
    if (r.failed) continue;
    ++est.valid_count;
    const double d = r.value - mean;
    mean += d / static_cast<double>(est.valid_count);
    m2 += d * (r.value - mean);
  }
  if (est.valid_count < 2) return est;
  est.determinate = true;
  est.delta = std::sqrt(m2 / static_cast<double>(est.valid_count - 1));
  return est;
}

// +1 (sharp) iff the spread beats the threshold; the tie goes to fuzzy.
inline int binarize(double delta, double epsilon) {
  if (!(delta >= 0.0)) throw InvalidConfig("spread >= 0");
  if (!(epsilon > 0.0)) throw InvalidConfig("threshold > 0");
  return delta < epsilon ? +1 : -1;
}

struct BinaryOutcome {
  int value = 0;  // exactly +1 or -1
  Observable detector = Observable::kPosition;
  SettingLabel setting = SettingLabel::kUnprimed;
  std::int64_t window_index = 0;
};

// Individual-testing result for one detector. pass iff the fuzzy rate
// over determinate windows stays under 1%.
struct CalibrationReport {
  Observable detector = Observable::kPosition;
  SettingLabel setting = SettingLabel::kUnprimed;
  std::int64_t trials = 0;       // windows that produced a verdict
  std::int64_t minus_count = 0;  // fuzzy verdicts among them
  std::int64_t indeterminate_count = 0;
  double p_minus = 0.0;
  bool pass = false;
};

inline constexpr double kCalibrationMaxMinusRate = 0.01;
inline constexpr std::int64_t kCalibrationMinWindows = 1000;

// Repeated individual testing of one detector with the partner turned
// off: `windows` spread-estimation windows of `window_size` readings on
// the given source state, binarized against epsilon. Streams are
// addressed in the calibration domain so this never aliases run draws.
inline CalibrationReport calibrate(const PhysicalConfig& cfg, const DetectorConfig& det,
                                   const GaussianState& source, double epsilon,
                                   std::int64_t windows, int window_size, std::uint64_t seed,
                                   std::uint64_t detector_index = 0) {
  if (windows < kCalibrationMinWindows)
    throw InvalidConfig("calibration.windows >= 1000");
  if (window_size < 2) throw InvalidConfig("window_size >= 2");
  const StreamRole role =
      det.observable == Observable::kPosition ? StreamRole::kXDetector : StreamRole::kPDetector;

  CalibrationReport report;
  report.detector = det.observable;
  report.setting = det.label;
  std::vector<Reading> window(static_cast<std::size_t>(window_size));
  for (std::int64_t w = 0; w < windows; ++w) {
    for (int i = 0; i < window_size; ++i) {
      const std::uint64_t trial =
          (detector_index * static_cast<std::uint64_t>(windows) + static_cast<std::uint64_t>(w)) *
              static_cast<std::uint64_t>(window_size) +
          static_cast<std::uint64_t>(i);
      RandomStream rng(seed, StreamDomain::kCalibration, trial, role);
      window[static_cast<std::size_t>(i)] = single_measure(source, cfg, det, rng);
    }
    const SpreadEstimate est = estimate_spread(window);
    if (!est.determinate) {
      ++report.indeterminate_count;
      continue;
    }
    ++report.trials;
    if (binarize(est.delta, epsilon) < 0) ++report.minus_count;
  }
  report.p_minus = report.trials > 0
                       ? static_cast<double>(report.minus_count) / static_cast<double>(report.trials)
                       : 1.0;
  report.pass = report.p_minus < kCalibrationMaxMinusRate;
  return report;
}

// Verdict for one joint window; indeterminate sides are excluded from
// count tables and tallied separately.
struct PairVerdict {
  std::int64_t window_index = 0;
  int x_outcome = 0;
  int p_outcome = 0;
  bool x_indeterminate = false;
  bool p_indeterminate = false;

  bool indeterminate() const { return x_indeterminate || p_indeterminate; }
};

struct CalibrationGate {
  bool x_passed = false;
  bool p_passed = false;
  bool override_gate = false;
};

// Consecutive blocks of `window_size` joint samples become one (+-1, +-1)
// pair via estimate_spread + binarize per detector column. Trailing
// samples short of a full window are dropped. `flip_outcomes` flips every
// verdict sign (sensitivity switch for the sharp/fuzzy sign convention).
inline std::vector<PairVerdict> joint_binarize(std::span<const JointSample> samples,
                                               const ThresholdConfig& thresholds, int window_size,
                                               const CalibrationGate& gate,
                                               bool flip_outcomes = false) {
  if (window_size < 2) throw InvalidConfig("window_size >= 2");
  if (!gate.override_gate) {
    if (!gate.x_passed) throw CalibrationError("x detector has not passed calibration");
    if (!gate.p_passed) throw CalibrationError("p detector has not passed calibration");
  }
  const std::size_t w = static_cast<std::size_t>(window_size);
  std::vector<PairVerdict> verdicts;
  verdicts.reserve(samples.size() / w);
  std::vector<Reading> x_col(w);
  std::vector<Reading> p_col(w);
  for (std::size_t start = 0; start + w <= samples.size(); start += w) {
    for (std::size_t i = 0; i < w; ++i) {
      const JointSample& s = samples[start + i];
      x_col[i] = {s.x_raw, s.x_failed};
      p_col[i] = {s.p_raw, s.p_failed};
    }
    PairVerdict v;
    v.window_index = static_cast<std::int64_t>(start / w);
    const SpreadEstimate ex = estimate_spread(x_col);
    const SpreadEstimate ep = estimate_spread(p_col);
    v.x_indeterminate = !ex.determinate;
    v.p_indeterminate = !ep.determinate;
    const int sign = flip_outcomes ? -1 : +1;
    if (ex.determinate) v.x_outcome = sign * binarize(ex.delta, thresholds.epsilon_x);
    if (ep.determinate) v.p_outcome = sign * binarize(ep.delta, thresholds.epsilon_p);
    verdicts.push_back(v);
  }
  return verdicts;
}

}  // namespace bellosc
