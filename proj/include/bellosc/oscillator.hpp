#pragma once

#include <cmath>

#include "bellosc/errors.hpp"

namespace bellosc {

// Oscillator parameters. Units are dimensionless internally; hbar is
// configurable so uncertainty-limit logic can run away from float
// underflow at physical scales.
struct PhysicalConfig {
  double mass = 1.0;
  double omega = 1.0;
  double hbar = 1.0;
};

inline void validate(const PhysicalConfig& cfg) {
  if (!(cfg.mass > 0.0)) throw InvalidConfig("physical.mass > 0");
  if (!(cfg.omega > 0.0)) throw InvalidConfig("physical.omega > 0");
  if (!(cfg.hbar > 0.0)) throw InvalidConfig("physical.hbar > 0");
}

// First and second moments of the oscillator in phase space. Every state
// and operation in this artifact is Gaussian-preserving, so the moments
// are an exact representation. The covariance stores only the upper
// triangle; symmetry cannot be violated.
struct GaussianState {
  double mean_x = 0.0;
  double mean_p = 0.0;
  double cov_xx = 0.0;
  double cov_xp = 0.0;
  double cov_pp = 0.0;

  double covariance_det() const { return cov_xx * cov_pp - cov_xp * cov_xp; }
};

// Heisenberg admissibility: det cov >= (hbar/2)^2, positive diagonals.
inline void validate(const GaussianState& s, const PhysicalConfig& cfg) {
  if (!(s.cov_xx > 0.0)) throw InvalidConfig("state.cov_xx > 0");
  if (!(s.cov_pp > 0.0)) throw InvalidConfig("state.cov_pp > 0");
  const double floor = 0.25 * cfg.hbar * cfg.hbar;
  if (s.covariance_det() < floor - 1e-12 * floor)
    throw InvalidConfig("state covariance det >= (hbar/2)^2");
}

inline GaussianState ground_state(const PhysicalConfig& cfg) {
  validate(cfg);
  GaussianState s;
  s.cov_xx = cfg.hbar / (2.0 * cfg.mass * cfg.omega);
  s.cov_pp = cfg.hbar * cfg.mass * cfg.omega / 2.0;
  s.cov_xp = 0.0;
  return s;
}

inline GaussianState coherent_state(const PhysicalConfig& cfg, double x0, double p0) {
  GaussianState s = ground_state(cfg);
  s.mean_x = x0;
  s.mean_p = p0;
  return s;
}

// Positive r squeezes position (cov_xx shrinks by e^{-2r}); the
// minimum-uncertainty product is preserved exactly.
inline GaussianState squeezed_state(const PhysicalConfig& cfg, double r, double x0 = 0.0,
                                    double p0 = 0.0) {
  if (!std::isfinite(r)) throw InvalidConfig("squeeze parameter finite");
  GaussianState s = ground_state(cfg);
  s.cov_xx *= std::exp(-2.0 * r);
  s.cov_pp *= std::exp(2.0 * r);
  s.mean_x = x0;
  s.mean_p = p0;
  return s;
}

// Harmonic evolution is the symplectic rotation
//   S(t) = [[cos wt, sin wt/(m w)], [-m w sin wt, cos wt]],
// applied as mean' = S mean, cov' = S cov S^T. det S = 1, so the
// covariance determinant is conserved.
inline GaussianState evolve(const GaussianState& state, double t, const PhysicalConfig& cfg) {
  if (!std::isfinite(t)) throw InvalidConfig("evolution time finite");
  const double c = std::cos(cfg.omega * t);
  const double s = std::sin(cfg.omega * t);
  const double a = 1.0 / (cfg.mass * cfg.omega);  // x <- p coupling
  const double b = cfg.mass * cfg.omega;          // p <- x coupling

  GaussianState out;
  out.mean_x = c * state.mean_x + s * a * state.mean_p;
  out.mean_p = -b * s * state.mean_x + c * state.mean_p;
  out.cov_xx = c * c * state.cov_xx + 2.0 * c * s * a * state.cov_xp + s * s * a * a * state.cov_pp;
  out.cov_xp = -b * c * s * state.cov_xx + (c * c - s * s) * state.cov_xp + a * c * s * state.cov_pp;
  out.cov_pp = b * b * s * s * state.cov_xx - 2.0 * b * c * s * state.cov_xp + c * c * state.cov_pp;
  return out;
}

// Classical phase-space point; follows the same symplectic map as the
// state means.
struct PhasePoint {
  double x = 0.0;
  double p = 0.0;
};

inline PhasePoint evolve(const PhasePoint& pt, double t, const PhysicalConfig& cfg) {
  const double c = std::cos(cfg.omega * t);
  const double s = std::sin(cfg.omega * t);
  PhasePoint out;
  out.x = c * pt.x + s / (cfg.mass * cfg.omega) * pt.p;
  out.p = -cfg.mass * cfg.omega * s * pt.x + c * pt.p;
  return out;
}

enum class Observable { kPosition, kMomentum };

struct QuadratureMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// Moments of the observable measured after a delay of theta within the
// oscillation cycle (theta = 0 is plain x or p). Realized by rotating the
// state by theta and reading the corresponding diagonal entry.
inline QuadratureMoments quadrature_moments(const GaussianState& state, const PhysicalConfig& cfg,
                                            Observable obs, double theta) {
  const GaussianState rotated = evolve(state, theta / cfg.omega, cfg);
  if (obs == Observable::kPosition) return {rotated.mean_x, rotated.cov_xx};
  return {rotated.mean_p, rotated.cov_pp};
}

}  // namespace bellosc
