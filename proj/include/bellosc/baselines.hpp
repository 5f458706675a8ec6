#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "bellosc/bell.hpp"
#include "bellosc/errors.hpp"
#include "bellosc/random.hpp"

namespace bellosc {

namespace detail {
inline int sign_pm(double v) { return v >= 0.0 ? +1 : -1; }
}

// Local hidden-variable model: a shared lambda drawn uniformly on
// [0, 2*pi) and deterministic threshold responses that see only their own
// setting. The default is the classic sign(cos(lambda - setting)) model,
// which reaches S = 2 at the standard CHSH setting quadruple.
struct LhvModel {
  int harmonic_a = 1;
  int harmonic_b = 1;
  double offset_a = 0.0;
  double offset_b = 0.0;
  double bias_a = 0.0;  // in (-1, 1); 0 keeps the response balanced
  double bias_b = 0.0;

  int respond_a(double setting, double lambda) const {
    return detail::sign_pm(std::cos(harmonic_a * lambda - setting + offset_a) - bias_a);
  }
  int respond_b(double setting, double lambda) const {
    return detail::sign_pm(std::cos(harmonic_b * lambda - setting + offset_b) - bias_b);
  }

  static LhvModel threshold_model() { return LhvModel{}; }

  static LhvModel random_model(RandomStream& rng) {
    LhvModel m;
    m.harmonic_a = 1 + static_cast<int>(rng.next_u64() % 3);
    m.harmonic_b = 1 + static_cast<int>(rng.next_u64() % 3);
    m.offset_a = rng.uniform(0.0, 2.0 * std::numbers::pi);
    m.offset_b = rng.uniform(0.0, 2.0 * std::numbers::pi);
    m.bias_a = rng.uniform(-0.8, 0.8);
    m.bias_b = rng.uniform(-0.8, 0.8);
    return m;
  }
};

inline std::pair<int, int> lhv_trial(const LhvModel& model, double setting_a, double setting_b,
                                     RandomStream& rng) {
  const double lambda = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return {model.respond_a(setting_a, lambda), model.respond_b(setting_b, lambda)};
}

struct SettingsQuadruple {
  double a = 0.0;
  double a_prime = 0.0;
  double b = 0.0;
  double b_prime = 0.0;
};

// Exact joint distribution over (A(a), A(a'), B(b), B(b')) for a
// discretized lambda grid. Being a genuine joint distribution, its CHSH
// marginals can never beat 2.
inline OutcomeDistribution4 lhv_joint_distribution(const LhvModel& model,
                                                   const SettingsQuadruple& settings,
                                                   int grid_points = 10000) {
  if (grid_points < 1) throw InvalidConfig("lambda grid_points >= 1");
  OutcomeDistribution4 d;
  const double weight = 1.0 / static_cast<double>(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    const double lambda =
        (static_cast<double>(i) + 0.5) * 2.0 * std::numbers::pi / static_cast<double>(grid_points);
    d.prob(model.respond_a(settings.a, lambda), model.respond_a(settings.a_prime, lambda),
           model.respond_b(settings.b, lambda), model.respond_b(settings.b_prime, lambda)) += weight;
  }
  return d;
}

// Two-particle singlet oracle: uniform +-1 marginals with
// E(a, b) = -cos(a - b), drawn from the exact four-cell probability
// table. Used to confirm the CHSH machinery detects the 2*sqrt(2)
// saturation.
struct SingletSampler {
  double angle_a = 0.0;
  double angle_b = 0.0;
};

inline double singlet_correlation(double angle_a, double angle_b) {
  return -std::cos(angle_a - angle_b);
}

inline std::pair<int, int> singlet_trial(const SingletSampler& sampler, RandomStream& rng) {
  if (!std::isfinite(sampler.angle_a) || !std::isfinite(sampler.angle_b))
    throw InvalidConfig("singlet angles finite");
  const double e = singlet_correlation(sampler.angle_a, sampler.angle_b);
  const double p_same = 0.25 * (1.0 + e);  // each of (+,+) and (-,-)
  const double p_diff = 0.25 * (1.0 - e);  // each of (+,-) and (-,+)
  const double u = rng.uniform01();
  if (u < p_same) return {+1, +1};
  if (u < 2.0 * p_same) return {-1, -1};
  if (u < 2.0 * p_same + p_diff) return {+1, -1};
  return {-1, +1};
}

// CHSH estimate for one setting quadruple of a sampler with signature
// (angle_a, angle_b, RandomStream&) -> (+-1, +-1). Trials are addressed
// per (quadruple, pair) so scans parallelize without reordering draws.
template <typename TrialFn>
inline ChshResult sample_chsh(TrialFn&& trial, const SettingsQuadruple& q,
                              std::int64_t trials_per_pair, std::uint64_t seed,
                              std::uint64_t stream_offset = 0,
                              StreamDomain domain = StreamDomain::kValidation) {
  const double pair_angles[4][2] = {
      {q.a, q.b}, {q.a_prime, q.b}, {q.a, q.b_prime}, {q.a_prime, q.b_prime}};
  CorrelationEstimate est[4];
  for (int pair = 0; pair < 4; ++pair) {
    RandomStream rng(seed, domain, stream_offset * 4 + static_cast<std::uint64_t>(pair),
                     StreamRole::kModel);
    CountTable table;
    for (std::int64_t i = 0; i < trials_per_pair; ++i) {
      const auto [a, b] = trial(pair_angles[pair][0], pair_angles[pair][1], rng);
      table.add(a, b);
    }
    est[pair] = correlation(table);
  }
  return chsh(est[0], est[1], est[2], est[3]);
}

struct ScanEntry {
  SettingsQuadruple settings;
  double s = 0.0;
  double std_error = 0.0;
};

struct ScanTable {
  std::vector<ScanEntry> entries;
  std::size_t argmax = 0;
};

// S over a grid of singlet setting quadruples; reports the maximizing
// entry.
inline ScanTable scan_settings(std::span<const SettingsQuadruple> grid,
                               std::int64_t trials_per_pair, std::uint64_t seed) {
  if (grid.empty()) throw InvalidConfig("scan grid non-empty");
  if (trials_per_pair < 1) throw InvalidConfig("scan trials_per_pair >= 1");
  ScanTable table;
  table.entries.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto trial = [](double a, double b, RandomStream& rng) {
      return singlet_trial(SingletSampler{a, b}, rng);
    };
    const ChshResult r = sample_chsh(trial, grid[i], trials_per_pair, seed, i, StreamDomain::kScan);
    table.entries.push_back({grid[i], r.s, r.std_error});
    if (r.s > table.entries[table.argmax].s) table.argmax = i;
  }
  return table;
}

}  // namespace bellosc
