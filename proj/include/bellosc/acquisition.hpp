#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "bellosc/errors.hpp"
#include "bellosc/random.hpp"

namespace bellosc {

// Mid-rise uniform quantizer with saturating end codes, the functional
// model of a flash converter.
struct AdcConfig {
  int bits = 16;
  double vmin = -1.0;
  double vmax = 1.0;
};

inline void validate(const AdcConfig& cfg) {
  if (cfg.bits < 1 || cfg.bits > 24) throw InvalidConfig("adc.bits in [1, 24]");
  if (!(cfg.vmin < cfg.vmax)) throw InvalidConfig("adc.vmin < adc.vmax");
}

inline double lsb(const AdcConfig& cfg) {
  return (cfg.vmax - cfg.vmin) / static_cast<double>(std::int64_t{1} << cfg.bits);
}

// Range sized at +-6 predicted output standard deviations; keeps the
// Gaussian clipping probability below 1e-8.
inline AdcConfig auto_range(int bits, double predicted_mean, double predicted_std) {
  AdcConfig cfg;
  cfg.bits = bits;
  cfg.vmin = predicted_mean - 6.0 * predicted_std;
  cfg.vmax = predicted_mean + 6.0 * predicted_std;
  validate(cfg);
  return cfg;
}

inline std::int64_t quantize(double v, const AdcConfig& cfg) {
  if (!std::isfinite(v)) throw InvalidConfig("quantize input finite");
  const std::int64_t levels = std::int64_t{1} << cfg.bits;
  const double scaled = (v - cfg.vmin) / (cfg.vmax - cfg.vmin) * static_cast<double>(levels);
  auto code = static_cast<std::int64_t>(std::floor(scaled));
  if (code < 0) code = 0;
  if (code > levels - 1) code = levels - 1;
  return code;
}

// Code-center reconstruction.
inline double dequantize(std::int64_t code, const AdcConfig& cfg) {
  const std::int64_t levels = std::int64_t{1} << cfg.bits;
  if (code < 0 || code > levels - 1) throw InvalidConfig("adc code in [0, 2^bits - 1]");
  return cfg.vmin + (static_cast<double>(code) + 0.5) * (cfg.vmax - cfg.vmin) /
                        static_cast<double>(levels);
}

// Point sampler with zero-order hold: grabs the analog line at
// t_k = k*T + jitter_k and freezes the value until the next sample.
struct HoldConfig {
  double period = 1.0;
  double jitter_std = 0.0;  // aperture jitter, time units
};

inline void validate(const HoldConfig& cfg) {
  if (!(cfg.period > 0.0)) throw InvalidConfig("hold.period > 0");
  if (!(cfg.jitter_std >= 0.0)) throw InvalidConfig("hold.jitter_std >= 0");
}

struct TimedReading {
  double t = 0.0;
  double v = 0.0;
};

// One held value per period, linearly interpolated between input
// timestamps. Samples whose (jittered) time falls outside the signal
// span are skipped. Timestamps must be strictly increasing.
inline std::vector<TimedReading> sample_and_hold(std::span<const TimedReading> signal,
                                                 const HoldConfig& hold, RandomStream& rng) {
  validate(hold);
  std::vector<TimedReading> held;
  if (signal.empty()) return held;
  for (std::size_t i = 1; i < signal.size(); ++i) {
    if (!(signal[i].t > signal[i - 1].t))
      throw InvalidConfig("signal timestamps strictly increasing");
  }
  const double t_first = signal.front().t;
  const double t_last = signal.back().t;
  held.reserve(static_cast<std::size_t>((t_last - t_first) / hold.period) + 2);

  std::size_t cursor = 0;
  for (std::int64_t k = 0;; ++k) {
    const double nominal = static_cast<double>(k) * hold.period;
    if (nominal > t_last) break;
    const double t = nominal + (hold.jitter_std > 0.0 ? rng.normal(0.0, hold.jitter_std) : 0.0);
    if (t < t_first || t > t_last) continue;
    // Signal times are ordered and jitter is small against the period, so
    // a forward-moving cursor finds the bracketing pair; back up if a
    // jittered sample landed before the previous one.
    while (cursor > 0 && signal[cursor].t > t) --cursor;
    while (cursor + 1 < signal.size() && signal[cursor + 1].t < t) ++cursor;
    double value = 0.0;
    if (cursor + 1 >= signal.size()) {
      value = signal.back().v;
    } else {
      const TimedReading& lo = signal[cursor];
      const TimedReading& hi = signal[cursor + 1];
      const double w = (t - lo.t) / (hi.t - lo.t);
      value = lo.v + w * (hi.v - lo.v);
    }
    held.push_back({nominal, value});
  }
  return held;
}

// Full readout chain: sample-and-hold, then quantize/dequantize each held
// sample.
inline std::vector<TimedReading> acquire(std::span<const TimedReading> signal,
                                         const HoldConfig& hold, const AdcConfig& adc,
                                         RandomStream& rng) {
  validate(adc);
  std::vector<TimedReading> out = sample_and_hold(signal, hold, rng);
  for (TimedReading& r : out) r.v = dequantize(quantize(r.v, adc), adc);
  return out;
}

}  // namespace bellosc
