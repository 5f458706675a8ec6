#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace bellosc {

// SplitMix64 finalizer (Steele/Lea/Flood via Vigna's reference code).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// Namespaces for unrelated uses of the same master seed. Calibration,
// validation and the main run never share a stream.
enum class StreamDomain : std::uint64_t {
  kRun = 1,
  kCalibration = 2,
  kValidation = 3,
  kScan = 4,
  kAcquisition = 5,
};

// Which consumer inside one trial the stream feeds.
enum class StreamRole : std::uint64_t {
  kXDetector = 1,
  kPDetector = 2,
  kTrajectory = 3,
  kHoldJitter = 4,
  kModel = 5,
  kModelParams = 6,
};

// Key for the sub-stream assigned to (master seed, domain, trial, role).
// Any partition of trials across workers replays the sequential run bit
// for bit, because no stream state is shared between trials.
inline constexpr std::uint64_t derive_stream_key(std::uint64_t master_seed, StreamDomain domain,
                                                 std::uint64_t trial, StreamRole role) {
  std::uint64_t k = mix64(master_seed + kGoldenGamma);
  k = mix64(k ^ (static_cast<std::uint64_t>(domain) * 0xD1342543DE82EF95ULL));
  k = mix64(k ^ (trial * 0x2545F4914F6CDD1DULL));
  k = mix64(k ^ (static_cast<std::uint64_t>(role) * kGoldenGamma));
  return k;
}

// SplitMix64 sequence. One instance per (seed, domain, trial, role); draws
// inside a trial are ordered, so replay is deterministic.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) : state_(key) {}

  RandomStream(std::uint64_t master_seed, StreamDomain domain, std::uint64_t trial, StreamRole role)
      : state_(derive_stream_key(master_seed, domain, trial, role)) {}

  std::uint64_t next_u64() {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Standard normal via Box-Muller; the second variate of each pair is
  // cached, so one pair costs two uniforms.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * uniform01();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bellosc
