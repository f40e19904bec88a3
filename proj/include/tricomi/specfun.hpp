#pragma once

// Modified Bessel functions K_nu, I_nu and the gamma function, double
// precision, with per-call error estimates.  K is computed by the classic
// three-region scheme: a Temme-style series for small argument, a Steed
// continued fraction (CF2) for the mid range, and the large-argument
// asymptotic series beyond that.  Orders are first reduced to [-1/2, 1/2]
// and then raised by the (stable, all-positive) upward recurrence
//   K_{m+1}(tau) = K_{m-1}(tau) + (2m/tau) K_m(tau).

#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace tricomi::specfun {

struct SpecFunResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;  // conservative bound on |value - exact|
};

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Orders are supported on |nu| <= 5; the code is accurate well beyond, but
// everything in this project lives in that band, so we refuse the rest
// loudly instead of silently degrading.
inline constexpr double kMaxOrder = 5.0;

namespace detail {

inline void check_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw domain_error(std::string(what) + " must be finite");
  }
}

// Lanczos approximation (g = 7, 9 terms) plus the reflection formula.
inline double gamma_core(double x) {
  static constexpr double g = 7.0;
  static constexpr double coeff[9] = {
      0.99999999999980993,     676.5203681218851,    -1259.1392167224028,
      771.32342877765313,     -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    // Gamma(x) Gamma(1-x) = pi / sin(pi x); poles are rejected upstream.
    return kPi / (std::sin(kPi * x) * gamma_core(1.0 - x));
  }
  const double z = x - 1.0;
  double a = coeff[0];
  for (int i = 1; i < 9; ++i) {
    a += coeff[i] / (z + i);
  }
  const double t = z + g + 0.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

// The two auxiliary gamma combinations of Temme's series,
//   gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu),
//   gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2,
// plus the reciprocals themselves.  Near mu = 0 the difference quotient
// cancels, so we switch to the Taylor coefficients of 1/Gamma(1+x).
inline void temme_gammas(double mu, double& gam1, double& gam2, double& gampl,
                         double& gammi) {
  gampl = 1.0 / gamma_core(1.0 + mu);
  gammi = 1.0 / gamma_core(1.0 - mu);
  if (std::abs(mu) < 1e-3) {
    // 1/Gamma(1+x) = 1 + a1 x + a2 x^2 + ...  (A&S 6.1.34)
    static constexpr double a1 = 0.57721566490153286;
    static constexpr double a3 = -0.04200263503409524;
    static constexpr double a5 = -0.04219773455554433;
    const double mu2 = mu * mu;
    gam1 = -(a1 + mu2 * (a3 + mu2 * a5));
  } else {
    gam1 = (gammi - gampl) / (2.0 * mu);
  }
  gam2 = 0.5 * (gammi + gampl);
}

// e^tau K_mu(tau) and e^tau K_{mu+1}(tau) for reduced order mu in
// [-1/2, 1/2].  Region switches at tau = 2 and tau = 15.
struct KPair {
  double kmu;   // e^tau K_mu(tau)
  double kmu1;  // e^tau K_{mu+1}(tau)
};

inline KPair k_reduced_scaled(double mu, double tau) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double mu2 = mu * mu;

  if (tau <= 2.0) {
    // Temme's series around the small-argument logarithmic behaviour.
    const double half = 0.5 * tau;
    const double pimu = kPi * mu;
    const double fact = (std::abs(pimu) < 1e-15) ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(half);
    double e = mu * d;
    const double fact2 = (std::abs(e) < 1e-15) ? 1.0 : std::sinh(e) / e;
    double gam1, gam2, gampl, gammi;
    temme_gammas(mu, gam1, gam2, gampl, gammi);
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    double c = 1.0;
    d = half * half;
    double sum1 = p;
    for (int i = 1; i <= 300; ++i) {
      ff = (i * ff + p + q) / (i * i - mu2);
      c *= d / i;
      p /= (i - mu);
      q /= (i + mu);
      const double del = c * ff;
      sum += del;
      sum1 += c * (p - i * ff);
      if (std::abs(del) < std::abs(sum) * eps) break;
    }
    const double scale = std::exp(tau);
    return {scale * sum, scale * sum1 * (2.0 / tau)};
  }

  if (tau < 15.0) {
    // Steed's continued fraction CF2 (evaluated with the Lentz-style
    // forward recurrence); gives K_mu and the ratio for K_{mu+1}.
    const double a1 = 0.25 - mu2;
    double b = 2.0 * (1.0 + tau);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    double q = a1, c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= 10000; ++i) {
      a -= 2.0 * (i - 1);
      c = -a * c / i;
      const double qnew = (q1 - b * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += c * qnew;
      b += 2.0;
      d = 1.0 / (b + a * d);
      delh = (b * d - 1.0) * delh;
      h += delh;
      const double dels = q * delh;
      s += dels;
      if (std::abs(dels / s) < eps) break;
    }
    h = a1 * h;
    const double kmu = std::sqrt(kPi / (2.0 * tau)) / s;
    return {kmu, kmu * (mu + tau + 0.5 - h) / tau};
  }

  // Large argument: e^tau K_nu(tau) = sqrt(pi/(2 tau)) sum_k a_k(nu)/tau^k
  // with a_0 = 1, a_k = a_{k-1} (4 nu^2 - (2k-1)^2)/(8k); summed to the
  // smallest term (the series is asymptotic, not convergent).
  const auto asym = [tau](double nu) {
    double sum = 1.0, term = 1.0;
    double prev = std::numeric_limits<double>::max();
    for (int k = 1; k <= 60; ++k) {
      const double odd = 2.0 * k - 1.0;
      term *= (4.0 * nu * nu - odd * odd) / (8.0 * k * tau);
      if (std::abs(term) >= prev) break;
      sum += term;
      prev = std::abs(term);
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return std::sqrt(kPi / (2.0 * tau)) * sum;
  };
  return {asym(mu), asym(mu + 1.0)};
}

// e^tau K_nu(tau) for any order in the supported band (enforced by the
// public wrappers, not here, so that the derivative can reach one order
// past the band edge).
inline double k_scaled_core(double nu, double tau) {
  const double anu = std::abs(nu);  // K_{-nu} = K_nu
  const int nl = static_cast<int>(std::lround(anu));
  const double mu = anu - nl;
  KPair pair = k_reduced_scaled(mu, tau);
  for (int i = 1; i <= nl; ++i) {
    const double next = pair.kmu + (2.0 * (mu + i) / tau) * pair.kmu1;
    pair.kmu = pair.kmu1;
    pair.kmu1 = next;
  }
  return pair.kmu;
}

inline void check_k_args(double nu, double tau, double max_order) {
  check_finite(nu, "order");
  check_finite(tau, "argument");
  if (std::abs(nu) > max_order) {
    throw unsupported_order_error("Bessel order " + std::to_string(nu) +
                                  " outside supported band [-5, 5]");
  }
  if (tau <= 0.0) {
    throw domain_error("K requires a positive argument, got " +
                       std::to_string(tau));
  }
}

inline double k_error_factor(double nu) {
  // Round-off grows mildly with the number of recurrence steps.
  return 3e-14 + 1e-14 * std::abs(nu);
}

}  // namespace detail

// e^tau K_nu(tau); the form that stays representable when tau is huge.
inline SpecFunResult bessel_k_scaled(double nu, double tau) {
  detail::check_k_args(nu, tau, kMaxOrder);
  const double v = detail::k_scaled_core(nu, tau);
  return {v, std::abs(v) * detail::k_error_factor(nu)};
}

inline SpecFunResult bessel_k(double nu, double tau) {
  detail::check_k_args(nu, tau, kMaxOrder);
  const double v = detail::k_scaled_core(nu, tau) * std::exp(-tau);
  return {v, std::abs(v) * detail::k_error_factor(nu) +
                 std::numeric_limits<double>::denorm_min()};
}

// d/dtau K_nu(tau) = -(K_{nu-1}(tau) + K_{nu+1}(tau)) / 2.
inline SpecFunResult bessel_k_derivative(double nu, double tau) {
  detail::check_k_args(nu, tau, kMaxOrder);
  const double scale = std::exp(-tau);
  const double lo = detail::k_scaled_core(nu - 1.0, tau) * scale;
  const double hi = detail::k_scaled_core(nu + 1.0, tau) * scale;
  const double v = -0.5 * (lo + hi);
  const double est = 0.5 * (std::abs(lo) * detail::k_error_factor(nu - 1.0) +
                            std::abs(hi) * detail::k_error_factor(nu + 1.0));
  return {v, est + std::numeric_limits<double>::denorm_min()};
}

// I_nu(tau) by its (all-positive) power series; fine for the arguments this
// project needs (tau up to ~30, order in the same band as K).
inline SpecFunResult bessel_i(double nu, double tau) {
  detail::check_finite(nu, "order");
  detail::check_finite(tau, "argument");
  if (nu < 0.0 || nu > kMaxOrder) {
    throw unsupported_order_error("I order " + std::to_string(nu) +
                                  " outside supported band [0, 5]");
  }
  if (tau < 0.0) {
    throw domain_error("I requires a non-negative argument");
  }
  if (tau == 0.0) {
    return {nu == 0.0 ? 1.0 : 0.0, 0.0};
  }
  const double q = 0.25 * tau * tau;
  double term = std::pow(0.5 * tau, nu) / detail::gamma_core(nu + 1.0);
  double sum = term;
  for (int k = 1; k <= 500; ++k) {
    term *= q / (k * (nu + k));
    sum += term;
    if (term < sum * std::numeric_limits<double>::epsilon()) break;
  }
  return {sum, sum * 1e-13};
}

inline SpecFunResult gamma_fn(double x) {
  detail::check_finite(x, "argument");
  if (x <= 0.0 && x == std::floor(x)) {
    throw pole_error("gamma pole at " + std::to_string(x));
  }
  const double v = detail::gamma_core(x);
  return {v, std::abs(v) * 3e-13};
}

}  // namespace tricomi::specfun
