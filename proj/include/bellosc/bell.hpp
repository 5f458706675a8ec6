#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "bellosc/errors.hpp"
#include "bellosc/random.hpp"

namespace bellosc {

inline constexpr double kClassicalBound = 2.0;
inline constexpr double kTsirelsonBound = 2.8284271247461903;  // 2*sqrt(2)

// Joint frequency counts over the four (+-1, +-1) outcome pairs of one
// setting pair. Merging partial tables is plain count addition.
struct CountTable {
  std::string label;
  std::int64_t n_pp = 0;  // (+1, +1)
  std::int64_t n_pm = 0;  // (+1, -1)
  std::int64_t n_mp = 0;  // (-1, +1)
  std::int64_t n_mm = 0;  // (-1, -1)

  std::int64_t total() const { return n_pp + n_pm + n_mp + n_mm; }

  void add(int a, int b) {
    if (a > 0)
      (b > 0 ? n_pp : n_pm) += 1;
    else
      (b > 0 ? n_mp : n_mm) += 1;
  }

  void merge(const CountTable& other) {
    n_pp += other.n_pp;
    n_pm += other.n_pm;
    n_mp += other.n_mp;
    n_mm += other.n_mm;
  }
};

struct CorrelationEstimate {
  double e = 0.0;       // in [-1, 1]
  double std_error = 0.0;  // binomial delta method sqrt((1 - e^2)/n)
  std::int64_t n = 0;
};

// E(A, B) = p(A = B) - p(A = -B), estimated from counts.
inline CorrelationEstimate correlation(const CountTable& t) {
  const std::int64_t n = t.total();
  if (n < 1) throw InvalidConfig("count table total >= 1");
  CorrelationEstimate est;
  est.n = n;
  est.e = static_cast<double>(t.n_pp + t.n_mm - t.n_pm - t.n_mp) / static_cast<double>(n);
  est.std_error = std::sqrt(std::max(1.0 - est.e * est.e, 0.0) / static_cast<double>(n));
  return est;
}

// Resampling alternative to the delta-method error, for high-accuracy
// reporting.
inline double bootstrap_stderr(const CountTable& t, int resamples, RandomStream& rng) {
  const std::int64_t n = t.total();
  if (n < 1) throw InvalidConfig("count table total >= 1");
  if (resamples < 2) throw InvalidConfig("bootstrap resamples >= 2");
  const double p_pp = static_cast<double>(t.n_pp) / static_cast<double>(n);
  const double p_pm = static_cast<double>(t.n_pm) / static_cast<double>(n);
  const double p_mp = static_cast<double>(t.n_mp) / static_cast<double>(n);
  double mean = 0.0;
  double m2 = 0.0;
  for (int k = 0; k < resamples; ++k) {
    std::int64_t agree = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      const double u = rng.uniform01();
      int a;
      int b;
      if (u < p_pp) {
        a = +1, b = +1;
      } else if (u < p_pp + p_pm) {
        a = +1, b = -1;
      } else if (u < p_pp + p_pm + p_mp) {
        a = -1, b = +1;
      } else {
        a = -1, b = -1;
      }
      agree += a * b;
    }
    const double e = static_cast<double>(agree) / static_cast<double>(n);
    const double d = e - mean;
    mean += d / static_cast<double>(k + 1);
    m2 += d * (e - mean);
  }
  return std::sqrt(m2 / static_cast<double>(resamples - 1));
}

namespace detail {
inline constexpr int sign_bit(int v) { return v > 0 ? 1 : 0; }
}

// Probability distribution over {+-1}^3 outcomes (X, X', P).
struct OutcomeDistribution3 {
  std::array<double, 8> q{};  // index = 4*bit(X) + 2*bit(X') + bit(P)

  static constexpr std::size_t index(int x, int xp, int p) {
    return static_cast<std::size_t>(4 * detail::sign_bit(x) + 2 * detail::sign_bit(xp) +
                                    detail::sign_bit(p));
  }

  double prob(int x, int xp, int p) const { return q[index(x, xp, p)]; }
  double& prob(int x, int xp, int p) { return q[index(x, xp, p)]; }
};

// Probability distribution over {+-1}^4 outcomes (X, X', P, P').
struct OutcomeDistribution4 {
  std::array<double, 16> q{};  // index = 8*bit(X) + 4*bit(X') + 2*bit(P) + bit(P')

  static constexpr std::size_t index(int x, int xp, int p, int pp) {
    return static_cast<std::size_t>(8 * detail::sign_bit(x) + 4 * detail::sign_bit(xp) +
                                    2 * detail::sign_bit(p) + detail::sign_bit(pp));
  }

  double prob(int x, int xp, int p, int pp) const { return q[index(x, xp, p, pp)]; }
  double& prob(int x, int xp, int p, int pp) { return q[index(x, xp, p, pp)]; }
};

template <typename Distribution>
  requires requires(const Distribution& d) { d.q.size(); }
inline void validate(const Distribution& d) {
  double sum = 0.0;
  for (double v : d.q) {
    if (v < -1e-15) throw InvalidConfig("distribution entries >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidConfig("distribution sums to 1");
}

inline constexpr int kSigns[2] = {-1, +1};

struct AgreementBound {
  double lhs = 0.0;  // p(X = X' = P) + p(X = X' = -P)
  double rhs = 0.0;  // |p(X = X' = P) - p(X = X' = -P)|
  bool holds = false;
};

// Both agreement probabilities exist (are non-negative), so their sum
// dominates the magnitude of their difference.
inline AgreementBound check_agreement_bound(const OutcomeDistribution3& d) {
  validate(d);
  double p_all_agree = 0.0;   // X = X' = P
  double p_pair_agree = 0.0;  // X = X' = -P
  for (int a : kSigns) {
    p_all_agree += d.prob(a, a, a);
    p_pair_agree += d.prob(a, a, -a);
  }
  AgreementBound r;
  r.lhs = p_all_agree + p_pair_agree;
  r.rhs = std::abs(p_all_agree - p_pair_agree);
  r.holds = r.lhs >= r.rhs - 1e-12;
  return r;
}

struct BoundResult {
  double probability = 0.0;       // p(X = X') or p(X = -X')
  double half_combination = 0.0;  // half sum / half difference of correlations
  bool holds = false;
};

namespace detail {

// Pairwise correlation of coordinates (i, j) of a 3-outcome distribution,
// with coordinate 0 = X, 1 = X', 2 = P.
inline double pair_correlation(const OutcomeDistribution3& d, int i, int j) {
  double e = 0.0;
  for (int x : kSigns)
    for (int xp : kSigns)
      for (int p : kSigns) {
        const int v[3] = {x, xp, p};
        e += d.prob(x, xp, p) * v[i] * v[j];
      }
  return e;
}

}  // namespace detail

// p(X = X') >= [E(X, P) + E(X', P)] / 2.
inline BoundResult repeat_agreement_bound(const OutcomeDistribution3& d) {
  validate(d);
  BoundResult r;
  for (int a : kSigns)
    for (int p : kSigns) r.probability += d.prob(a, a, p);
  r.half_combination = 0.5 * (detail::pair_correlation(d, 0, 2) + detail::pair_correlation(d, 1, 2));
  r.holds = r.probability >= r.half_combination - 1e-12;
  return r;
}

// p(X = -X') >= [E(X, P') - E(X', P')] / 2, with the distribution read as
// (X, X', P').
inline BoundResult repeat_disagreement_bound(const OutcomeDistribution3& d) {
  validate(d);
  BoundResult r;
  for (int a : kSigns)
    for (int p : kSigns) r.probability += d.prob(a, -a, p);
  r.half_combination = 0.5 * (detail::pair_correlation(d, 0, 2) - detail::pair_correlation(d, 1, 2));
  r.holds = r.probability >= r.half_combination - 1e-12;
  return r;
}

enum class SampleMode { kDual, kSingle };

// CHSH-style combination of the four setting-pair correlations, with the
// statistical error propagated in quadrature. `violated` requires the
// bound to be exceeded by three standard errors, separating structural
// violation from sampling noise.
struct ChshResult {
  CorrelationEstimate e_xp;    // (X, P)
  CorrelationEstimate e_xpp;   // (X', P)
  CorrelationEstimate e_xppr;  // (X, P')
  CorrelationEstimate e_xpppr; // (X', P')
  double s = 0.0;
  double std_error = 0.0;
  double classical_bound = kClassicalBound;
  double tsirelson = kTsirelsonBound;
  bool violated = false;
  SampleMode mode = SampleMode::kDual;
};

inline ChshResult chsh(const CorrelationEstimate& e_xp, const CorrelationEstimate& e_xpp,
                       const CorrelationEstimate& e_xppr, const CorrelationEstimate& e_xpppr,
                       SampleMode mode = SampleMode::kDual) {
  ChshResult r;
  r.e_xp = e_xp;
  r.e_xpp = e_xpp;
  r.e_xppr = e_xppr;
  r.e_xpppr = e_xpppr;
  r.s = std::abs(e_xp.e + e_xpp.e) + std::abs(e_xppr.e - e_xpppr.e);
  r.std_error = std::sqrt(e_xp.std_error * e_xp.std_error + e_xpp.std_error * e_xpp.std_error +
                       e_xppr.std_error * e_xppr.std_error + e_xpppr.std_error * e_xpppr.std_error);
  r.violated = r.s > kClassicalBound + 3.0 * r.std_error;
  r.mode = mode;
  return r;
}

struct JointChshBound {
  double s = 0.0;
  bool holds = false;
};

// For any genuine joint distribution over (X, X', P, P') the CHSH
// combination of the pairwise marginals cannot exceed 2. This is the
// theorem that makes the inequality binding for jointly measured
// observables.
inline JointChshBound joint_chsh_bound(const OutcomeDistribution4& d) {
  validate(d);
  double e_xp = 0.0;
  double e_xpp = 0.0;
  double e_xppr = 0.0;
  double e_xpppr = 0.0;
  for (int x : kSigns)
    for (int xp : kSigns)
      for (int p : kSigns)
        for (int pp : kSigns) {
          const double q = d.prob(x, xp, p, pp);
          e_xp += q * x * p;
          e_xpp += q * xp * p;
          e_xppr += q * x * pp;
          e_xpppr += q * xp * pp;
        }
  JointChshBound r;
  r.s = std::abs(e_xp + e_xpp) + std::abs(e_xppr - e_xpppr);
  r.holds = r.s <= kClassicalBound + 1e-12;
  return r;
}

// The two conditional branches exhaust the probability space, so their
// probabilities must add to one up to the excluded (indeterminate)
// fraction.
inline bool probability_completeness(double p_agree, double p_disagree,
                                     double indeterminate_fraction = 0.0) {
  const double tol = indeterminate_fraction > 0.0 ? indeterminate_fraction + 1e-12 : 1e-12;
  return std::abs(p_agree + p_disagree - 1.0) <= tol;
}

}  // namespace bellosc
