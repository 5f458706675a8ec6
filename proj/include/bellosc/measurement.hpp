#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "bellosc/errors.hpp"
#include "bellosc/oscillator.hpp"
#include "bellosc/random.hpp"

namespace bellosc {

enum class SettingLabel { kUnprimed, kPrimed };

// One detector: which observable it reads, which CHSH setting it stands
// for, the delay phase realizing that setting, its own added noise and
// its failure probability. f = 1 (a detector that always fails) is legal
// for the type; experiment configs restrict f to [0, 1).
struct DetectorConfig {
  Observable observable = Observable::kPosition;
  SettingLabel label = SettingLabel::kUnprimed;
  double phase = 0.0;         // radians within the oscillation cycle
  double noise_std = 0.0;     // same units as the observable
  double failure_prob = 0.0;  // per-reading Bernoulli failure
};

inline void validate(const DetectorConfig& det) {
  if (!std::isfinite(det.phase)) throw InvalidConfig("detector.phase finite");
  if (!(det.noise_std >= 0.0)) throw InvalidConfig("detector.noise_std >= 0");
  if (!(det.failure_prob >= 0.0 && det.failure_prob <= 1.0))
    throw InvalidConfig("detector.failure_prob in [0, 1]");
}

// Added-noise model for simultaneous x/p monitoring. The back-action
// floor sx*sp >= hbar/2 makes the output spread product at least hbar,
// twice the intrinsic Heisenberg bound.
struct JointNoiseModel {
  double sx = 0.0;
  double sp = 0.0;
};

inline void validate(const JointNoiseModel& noise, const PhysicalConfig& cfg) {
  if (!(noise.sx > 0.0)) throw InvalidConfig("joint_noise.sx > 0");
  if (!(noise.sp > 0.0)) throw InvalidConfig("joint_noise.sp > 0");
  if (noise.sx * noise.sp < 0.5 * cfg.hbar - 1e-15)
    throw InvalidConfig("joint_noise.sx * joint_noise.sp >= hbar/2");
}

// One continuous reading; failure is data, not an error.
struct Reading {
  double value = 0.0;
  bool failed = false;
};

// One simultaneous (x, p) acquisition.
struct JointSample {
  std::int64_t trial = 0;
  double x_raw = 0.0;
  double p_raw = 0.0;
  SettingLabel x_label = SettingLabel::kUnprimed;
  SettingLabel p_label = SettingLabel::kUnprimed;
  bool x_failed = false;
  bool p_failed = false;
};

// Individual measurement with the partner detector off: no joint noise
// floor, only the detector's own noise on top of the intrinsic
// quadrature spread.
inline Reading single_measure(const GaussianState& state, const PhysicalConfig& cfg,
                              const DetectorConfig& det, RandomStream& rng) {
  Reading r;
  if (rng.bernoulli(det.failure_prob)) {
    r.failed = true;
    return r;
  }
  const QuadratureMoments m = quadrature_moments(state, cfg, det.observable, det.phase);
  r.value = rng.normal(m.mean, std::sqrt(m.variance + det.noise_std * det.noise_std));
  return r;
}

// Simultaneous x and p readings on one freshly prepared state. The two
// outputs are drawn independently given the state: the monitoring systems
// share nothing but the source. Each detector reads its own quadrature
// phase; the joint noise model supplies the added-noise variances.
inline JointSample joint_measure(const GaussianState& state, const PhysicalConfig& cfg,
                                 const DetectorConfig& xdet, const DetectorConfig& pdet,
                                 const JointNoiseModel& noise, RandomStream& x_rng,
                                 RandomStream& p_rng, std::int64_t trial = 0) {
  validate(noise, cfg);
  JointSample s;
  s.trial = trial;
  s.x_label = xdet.label;
  s.p_label = pdet.label;

  if (x_rng.bernoulli(xdet.failure_prob)) {
    s.x_failed = true;
  } else {
    const QuadratureMoments m = quadrature_moments(state, cfg, Observable::kPosition, xdet.phase);
    s.x_raw = x_rng.normal(m.mean, std::sqrt(m.variance + noise.sx * noise.sx));
  }
  if (p_rng.bernoulli(pdet.failure_prob)) {
    s.p_failed = true;
  } else {
    const QuadratureMoments m = quadrature_moments(state, cfg, Observable::kMomentum, pdet.phase);
    s.p_raw = p_rng.normal(m.mean, std::sqrt(m.variance + noise.sp * noise.sp));
  }
  return s;
}

// Transit-averaged velocity of the classical trajectory through a beam of
// width w centered at the point's position. Fails when a turning point
// lies inside the beam (no full transit). Deterministic core of the
// photogate mode.
inline Reading photogate_transit(const PhasePoint& pt, double beam_width,
                                 const PhysicalConfig& cfg) {
  if (!(beam_width > 0.0)) throw InvalidConfig("photogate.beam_width > 0");
  Reading r;
  const double mw = cfg.mass * cfg.omega;
  // Conserved amplitude of x(t) = A cos(wt + phi).
  const double amplitude = std::hypot(pt.x, pt.p / mw);
  const double left = pt.x - 0.5 * beam_width;
  const double right = pt.x + 0.5 * beam_width;
  if (amplitude <= std::max(std::abs(left), std::abs(right))) {
    r.failed = true;  // turning point inside the beam, or beam wider than the motion
    return r;
  }
  // Phase advance between the two edge crossings on the same pass.
  const double phase_span =
      std::acos(std::clamp(left / amplitude, -1.0, 1.0)) -
      std::acos(std::clamp(right / amplitude, -1.0, 1.0));
  const double transit_time = phase_span / cfg.omega;
  r.value = std::copysign(beam_width / transit_time, pt.p);
  return r;
}

// Draw a phase-space point from the state and run the transit. The drawn
// point is returned for diagnostics.
struct PhotogateReading {
  Reading reading;
  PhasePoint draw;
};

inline PhasePoint sample_phase_point(const GaussianState& state, RandomStream& rng) {
  // Cholesky factor of the 2x2 covariance.
  const double a = std::sqrt(state.cov_xx);
  const double b = state.cov_xp / a;
  const double c = std::sqrt(std::max(state.cov_pp - b * b, 0.0));
  const double z1 = rng.normal();
  const double z2 = rng.normal();
  return {state.mean_x + a * z1, state.mean_p + b * z1 + c * z2};
}

inline PhotogateReading photogate_velocity(const GaussianState& state, double beam_width,
                                           const PhysicalConfig& cfg, RandomStream& rng) {
  PhotogateReading out;
  out.draw = sample_phase_point(state, rng);
  out.reading = photogate_transit(out.draw, beam_width, cfg);
  return out;
}

inline double velocity_to_momentum(double v, const PhysicalConfig& cfg) {
  if (!std::isfinite(v)) throw InvalidConfig("velocity finite");
  return cfg.mass * v;
}

// Source state for testing one detector individually: sharp along the
// detector's own delayed quadrature with the requested standard
// deviation, prepared by counter-rotating a squeezed state.
inline GaussianState calibration_state(const PhysicalConfig& cfg, const DetectorConfig& det,
                                       double target_std) {
  if (!(target_std > 0.0)) throw InvalidConfig("calibration target_std > 0");
  double r = 0.0;
  if (det.observable == Observable::kPosition) {
    r = 0.5 * std::log(cfg.hbar / (2.0 * cfg.mass * cfg.omega * target_std * target_std));
  } else {
    r = 0.5 * std::log(2.0 * target_std * target_std / (cfg.hbar * cfg.mass * cfg.omega));
  }
  const GaussianState base = squeezed_state(cfg, r);
  return evolve(base, -det.phase / cfg.omega, cfg);
}

}  // namespace bellosc
