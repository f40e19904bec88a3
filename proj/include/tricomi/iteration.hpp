#pragma once

// The iteration-to-blowup engine: seeds a family of frame lower bounds
//   U(t) >= C_j (1+t)^{-alpha_j} (t - 2 t0)^{beta_j},
// runs the index recursion
//   alpha' = a + q alpha,  beta' = q beta + 2,
//   C'     = C C_j^q / ((beta_j q + 1)(beta_j q + 2)),
// in log space (C_j grows doubly exponentially), and evaluates the
// closed forms, the semi-closed bound log C_j >= q^j log(D eps^p), the
// explicit divergence time, and the small-data threshold implied by it.

#include <cmath>
#include <cstdint>
#include <utility>

#include "errors.hpp"
#include "exponents.hpp"

namespace tricomi::iteration {

using exponents::ModelParams;

enum class SeedVariant { derivative, power, linear };

struct IterationSeed {
  double c0 = 1.0;      // leading constant of the j = 0 envelope
  double alpha0 = 0.0;  // decay index
  double beta0 = 1.0;   // growth index
  double t0 = 1.0;      // pivot time; envelopes live on t > 2 t0
  SeedVariant variant = SeedVariant::linear;
};

struct IterationState {
  int j = 0;
  double log_c = 0.0;  // log C_j; plain C_j overflows within a few steps
  double alpha = 0.0;
  double beta = 1.0;
  double frame_constant = 1.0;  // the C of the recursion
  double a = 0.0;               // amplification (ell+1) n (q-1)
};

inline double amplification(const ModelParams& P) {
  exponents::validate(P);
  return (P.ell + 1.0) * P.n * (P.q - 1.0);
}

// Exponent of eps in the seed constant: C_0 = calibration * eps^power.
inline double seed_epsilon_power(const ModelParams& P, SeedVariant v) {
  switch (v) {
    case SeedVariant::derivative: return P.p;
    case SeedVariant::power: return P.q;
    case SeedVariant::linear: return 1.0;
  }
  throw config_error("unknown seed variant");
}

inline IterationSeed seed(const ModelParams& P, SeedVariant v, double t0 = 1.0,
                          double calibration = 1.0) {
  exponents::validate(P);
  if (!(t0 > 0.0)) throw config_error("pivot time t0 must be > 0");
  if (!(calibration > 0.0)) throw config_error("calibration must be > 0");
  IterationSeed s;
  s.t0 = t0;
  s.variant = v;
  s.c0 = calibration * std::pow(P.epsilon, seed_epsilon_power(P, v));
  const double lp1 = P.ell + 1.0;
  switch (v) {
    case SeedVariant::derivative:
      s.alpha0 = lp1 * (P.n - 1) * P.p / 2.0;
      s.beta0 = P.ell * P.p / 2.0 + lp1 * (P.n - 1) + 2.0;
      break;
    case SeedVariant::power:
      // The power-type seed rests on results that need n >= 2.
      if (P.n < 2) throw config_error("power seed requires n >= 2");
      s.alpha0 = (P.n - 1) * lp1 * P.q / 2.0 + P.ell * P.q / 2.0;
      s.beta0 = (P.n - 1) * lp1 + 2.0;
      break;
    case SeedVariant::linear:
      // Assumes positive mean of the velocity datum; the caller certifies.
      s.alpha0 = 0.0;
      s.beta0 = 1.0;
      break;
  }
  return s;
}

inline IterationState initial_state(const IterationSeed& s, const ModelParams& P,
                                    double frame_constant = 1.0) {
  if (!(frame_constant > 0.0)) throw config_error("frame constant must be > 0");
  IterationState st;
  st.j = 0;
  st.log_c = std::log(s.c0);
  st.alpha = s.alpha0;
  st.beta = s.beta0;
  st.frame_constant = frame_constant;
  st.a = amplification(P);
  return st;
}

inline IterationState recursion_step(const IterationState& st, double q) {
  if (!(q > 1.0)) throw domain_error("q must be > 1");
  IterationState nx = st;
  nx.j = st.j + 1;
  nx.alpha = st.a + q * st.alpha;
  nx.beta = q * st.beta + 2.0;
  nx.log_c = std::log(st.frame_constant) + q * st.log_c -
             std::log((st.beta * q + 1.0) * (st.beta * q + 2.0));
  return nx;
}

// alpha_j = (a/(q-1) + alpha0) q^j - a/(q-1),
// beta_j  = (2/(q-1) + beta0) q^j - 2/(q-1).
inline std::pair<double, double> closed_forms(const IterationSeed& s, double a,
                                              double q, int j) {
  if (!(q > 1.0)) throw domain_error("q must be > 1");
  if (j < 0) throw domain_error("index j must be >= 0");
  const double qj = std::pow(q, j);
  const double ra = a / (q - 1.0);
  const double rb = 2.0 / (q - 1.0);
  return {(ra + s.alpha0) * qj - ra, (rb + s.beta0) * qj - rb};
}

// Both sides of sum_{k=0}^{j-1} (j-k) q^k = ((q^{j+1}-q)/(q-1) - j)/(q-1)
// in exact integer arithmetic (the divisions are exact).
inline std::int64_t weighted_geometric_sum(int j, std::int64_t q) {
  std::int64_t acc = 0, qk = 1;
  for (int k = 0; k < j; ++k) {
    acc += (j - k) * qk;
    qk *= q;
  }
  return acc;
}

inline std::int64_t weighted_geometric_sum_closed(int j, std::int64_t q) {
  std::int64_t qj1 = 1;
  for (int k = 0; k <= j; ++k) qj1 *= q;
  return ((qj1 - q) / (q - 1) - j) / (q - 1);
}

// log C-tilde = log C - 2 log(2/(q-1) + beta0); the reduced frame constant
// of the semi-closed bound.
inline double log_ctilde(double frame_constant, double beta0, double q) {
  if (!(frame_constant > 0.0)) throw config_error("frame constant must be > 0");
  if (!(q > 1.0)) throw domain_error("q must be > 1");
  return std::log(frame_constant) - 2.0 * std::log(2.0 / (q - 1.0) + beta0);
}

// Smallest j from which the semi-closed bound is valid: the smallest
// integer exceeding log C-tilde / (2 log q) - q/(q-1), clamped to >= 0.
inline int j0_threshold(double frame_constant, double beta0, double q) {
  const double x = log_ctilde(frame_constant, beta0, q) / (2.0 * std::log(q)) -
                   q / (q - 1.0);
  const double j0 = std::floor(x) + 1.0;
  return j0 > 0.0 ? static_cast<int>(j0) : 0;
}

// Semi-closed lower bound log C_j >= q^j log(D eps^power), valid for
// j >= j0.  Everything is expressed through the seed constant c0 =
// calibration * eps^power, so the bound needs no separate eps.
inline double log_cj_bound(const IterationSeed& s, double frame_constant,
                           double q, int j) {
  const int j0 = j0_threshold(frame_constant, s.beta0, q);
  if (j < j0) {
    throw not_applicable_error("semi-closed bound starts at j0 = " +
                               std::to_string(j0));
  }
  const double lc = log_ctilde(frame_constant, s.beta0, q);
  const double log_d_eps = std::log(s.c0) -
                           2.0 * q / ((q - 1.0) * (q - 1.0)) * std::log(q) +
                           lc / (q - 1.0);
  return std::pow(q, j) * log_d_eps;
}

// log of the j-th envelope at time t (t > 2 t0); the value itself is
// exp of this and over/underflows long before the recursion does.
inline double log_envelope(double t, const IterationState& st, double t0) {
  if (!(t > 2.0 * t0)) {
    throw domain_error("envelope is defined for t > 2 t0");
  }
  return st.log_c - st.alpha * std::log1p(t) + st.beta * std::log(t - 2.0 * t0);
}

// (2 - a) + (beta0 - alpha0)(q - 1): equals theta for the derivative seed,
// gamma for the power seed, and (q+1) - ((ell+1)n)(q-1) for the linear one.
inline double effective_theta(const ModelParams& P, const IterationSeed& s) {
  return (2.0 - amplification(P)) + (s.beta0 - s.alpha0) * (P.q - 1.0);
}

namespace detail {

inline double log_d_constant(const ModelParams& P, const IterationSeed& s,
                             double frame_constant) {
  const double q = P.q;
  const double power = seed_epsilon_power(P, s.variant);
  const double log_k = std::log(s.c0) - power * std::log(P.epsilon);
  return log_k - 2.0 * q / ((q - 1.0) * (q - 1.0)) * std::log(q) +
         log_ctilde(frame_constant, s.beta0, q) / (q - 1.0);
}

}  // namespace detail

// Explicit divergence time
//   T = 2^{((alpha0+beta0)(q-1) + a + 2)/theta} D^{-(q-1)/theta}
//       eps^{-power (q-1)/theta},
// with theta the effective one for the seed variant.
inline double lifespan_upper_bound(const ModelParams& P, const IterationSeed& s,
                                   double frame_constant = 1.0) {
  const double q = P.q;
  const double th = effective_theta(P, s);
  if (!(th > 0.0)) {
    throw outside_region_error(
        "effective theta <= 0: no divergence from this seed");
  }
  const double a = amplification(P);
  const double x = (s.alpha0 + s.beta0) * (q - 1.0) + a + 2.0;
  const double log_d = detail::log_d_constant(P, s, frame_constant);
  const double power = seed_epsilon_power(P, s.variant);
  const double log_t = (x * std::log(2.0) - (q - 1.0) * log_d -
                        power * (q - 1.0) * std::log(P.epsilon)) /
                       th;
  return std::exp(log_t);
}

// Largest eps0 whose divergence time is still >= t1 = max(1, 4 T0): below
// this size the bound says nothing before t1.
inline double epsilon0_threshold(const ModelParams& P, const IterationSeed& s,
                                 double frame_constant = 1.0, double T0 = 1.0) {
  const double q = P.q;
  const double th = effective_theta(P, s);
  if (!(th > 0.0)) {
    throw outside_region_error(
        "effective theta <= 0: no divergence from this seed");
  }
  if (!(T0 > 0.0)) throw config_error("T0 must be > 0");
  const double t1 = std::max(1.0, 4.0 * T0);
  const double a = amplification(P);
  const double x = (s.alpha0 + s.beta0) * (q - 1.0) + a + 2.0;
  const double log_d = detail::log_d_constant(P, s, frame_constant);
  const double power = seed_epsilon_power(P, s.variant);
  const double log_eps0 =
      (x * std::log(2.0) - (q - 1.0) * log_d - th * std::log(t1)) /
      (power * (q - 1.0));
  return std::exp(log_eps0);
}

}  // namespace tricomi::iteration
