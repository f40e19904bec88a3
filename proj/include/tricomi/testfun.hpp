#pragma once

// The temporal profile lambda(t), the radial eigenfunction phi(r), and the
// derived quantities used by the blow-up machinery: the combined test
// function Psi = lambda * phi, the functional of the initial data, and the
// frame constant that controls the usable weight window.
//
// lambda solves  lambda'' = t^{2 ell} lambda  with lambda(0) = 1 and
// lambda(t) -> 0 at infinity; concretely
//   lambda(t) = c_ell sqrt(t) K_nu(tau),   tau = t^{ell+1}/(ell+1),
// with nu = 1/(2 ell + 2) and c_ell chosen so that lambda(0) = 1.
// phi solves  Delta phi = phi  and is the radial average of e^{x.w} over
// unit directions w.

#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

namespace tricomi::testfun {

using specfun::kPi;

struct TricomiIndex {
  double ell = 0.0;    // degeneracy exponent of the wave speed t^ell
  double nu = 0.5;     // Bessel order 1/(2 ell + 2)
  double c_ell = 1.0;  // normalisation making lambda(0) = 1
};

inline TricomiIndex make_index(double ell) {
  if (!std::isfinite(ell) || ell < 0.0) {
    throw domain_error("degeneracy exponent must be finite and >= 0");
  }
  const double nu = 1.0 / (2.0 * ell + 2.0);
  const double c =
      std::pow(2.0, 1.0 - nu) * std::pow(ell + 1.0, -nu) / specfun::gamma_fn(nu).value;
  return {ell, nu, c};
}

// Forward distance travelled by the degenerate characteristic from time 0:
// the support of a solution launched from B_R stays inside B_{R + this}.
inline double cone_offset(double ell, double t) {
  return std::pow(t, ell + 1.0) / (ell + 1.0);
}

// lambda'(0) in closed form (the Bessel form is 0/0 at t = 0).
inline double lambda_prime_zero(const TricomiIndex& idx) {
  const double nu = idx.nu;
  return -std::pow(2.0, 1.0 - 2.0 * nu) * std::pow(idx.ell + 1.0, 1.0 - 2.0 * nu) *
         specfun::gamma_fn(1.0 - nu).value / specfun::gamma_fn(nu).value;
}

namespace detail {
inline void check_time(double t) {
  if (!std::isfinite(t) || t < 0.0) {
    throw domain_error("time must be finite and >= 0");
  }
}
// Below this the Bessel argument would underflow; the two-term Taylor
// expansion at 0 is exact to double precision there.
inline constexpr double kTinyTau = 1e-300;
}  // namespace detail

inline double lambda_fn(const TricomiIndex& idx, double t) {
  detail::check_time(t);
  if (t == 0.0) return 1.0;
  const double tau = cone_offset(idx.ell, t);
  if (tau < detail::kTinyTau) return 1.0 + lambda_prime_zero(idx) * t;
  return idx.c_ell * std::sqrt(t) * specfun::bessel_k(idx.nu, tau).value;
}

inline double lambda_prime(const TricomiIndex& idx, double t) {
  detail::check_time(t);
  if (t == 0.0) return lambda_prime_zero(idx);
  const double tau = cone_offset(idx.ell, t);
  if (tau < detail::kTinyTau) {
    return lambda_prime_zero(idx) +
           std::pow(t, 2.0 * idx.ell + 1.0) / (2.0 * idx.ell + 1.0);
  }
  return -idx.c_ell * std::pow(t, idx.ell + 0.5) *
         specfun::bessel_k(1.0 - idx.nu, tau).value;
}

// lambda'(t)/lambda(t) = -t^ell K_{1-nu}(tau)/K_nu(tau); evaluated with the
// scaled K so it stays finite long after lambda itself has underflowed.
inline double lambda_ratio(const TricomiIndex& idx, double t) {
  detail::check_time(t);
  const double tau = cone_offset(idx.ell, t);
  if (tau < detail::kTinyTau) return lambda_prime_zero(idx);
  return -std::pow(t, idx.ell) * specfun::bessel_k_scaled(1.0 - idx.nu, tau).value /
         specfun::bessel_k_scaled(idx.nu, tau).value;
}

// Surface area of the unit sphere S^{n-1} in R^n; the n = 1 value 2 (two
// half-lines) comes out of the same formula.
inline double unit_sphere_area(int n) {
  if (n < 1) throw domain_error("dimension must be >= 1");
  return 2.0 * std::pow(kPi, 0.5 * n) / specfun::gamma_fn(0.5 * n).value;
}

// Radial eigenfunction of the Laplacian with eigenvalue 1: the average of
// e^{x.w} over unit directions w, up to the sphere-area factor.  Closed
// forms in n = 1, 2, 3; a polar integral otherwise.
inline double eigenfunction_phi(double r, int n) {
  if (!std::isfinite(r) || r < 0.0) {
    throw domain_error("radius must be finite and >= 0");
  }
  if (n < 1) throw domain_error("dimension must be >= 1");
  switch (n) {
    case 1:
      return std::exp(r) + std::exp(-r);
    case 2:
      return 2.0 * kPi * specfun::bessel_i(0.0, r).value;
    case 3:
      return r < 1e-8 ? 4.0 * kPi * (1.0 + r * r / 6.0)
                      : 4.0 * kPi * std::sinh(r) / r;
    default: {
      // |S^{n-2}| int_0^pi e^{r cos th} sin^{n-2} th dth, with the e^r peak
      // factored out so the quadrature tolerance is relative.
      const double area = unit_sphere_area(n - 1);
      const double core = quadrature::adaptive_simpson(
          [r, n](double th) {
            return std::exp(r * (std::cos(th) - 1.0)) *
                   std::pow(std::sin(th), n - 2);
          },
          0.0, kPi, 1e-12);
      return area * std::exp(r) * core;
    }
  }
}

// The space-time test function Psi(t, x) = lambda(t) phi(|x|).
inline double test_function_psi(const TricomiIndex& idx, double t, double r, int n) {
  return lambda_fn(idx, t) * eigenfunction_phi(r, n);
}

// Radial initial data sampled on the uniform grid r_i = i R/(N-1).
struct DataPair {
  std::vector<double> u0;  // initial displacement profile
  std::vector<double> u1;  // initial velocity profile
  double R = 1.0;          // support radius of the data
  int n = 1;               // spatial dimension
};

inline DataPair sample_data(const std::function<double(double)>& u0_fn,
                            const std::function<double(double)>& u1_fn,
                            std::size_t points, double R, int n) {
  if (points < 2) throw config_error("need at least 2 sample points");
  if (!(R > 0.0)) throw config_error("data radius must be positive");
  if (n < 1) throw config_error("dimension must be >= 1");
  DataPair d;
  d.R = R;
  d.n = n;
  d.u0.resize(points);
  d.u1.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double r = R * static_cast<double>(i) / static_cast<double>(points - 1);
    d.u0[i] = u0_fn(r);
    d.u1[i] = u1_fn(r);
  }
  return d;
}

// The weighted functional of the data that drives the blow-up argument:
//   I = omega_{n-1} int_0^R (u1 - lambda'(0) u0) phi(r) r^{n-1} dr,
// by the trapezoid rule on the sample grid.
inline double initial_functional(const TricomiIndex& idx, const DataPair& data) {
  if (data.u0.size() != data.u1.size() || data.u0.size() < 2) {
    throw config_error("data profiles must share a common grid of >= 2 points");
  }
  if (!(data.R > 0.0) || data.n < 1) {
    throw config_error("data radius must be positive and dimension >= 1");
  }
  bool all_zero = true;
  for (std::size_t i = 0; i < data.u0.size() && all_zero; ++i) {
    all_zero = data.u0[i] == 0.0 && data.u1[i] == 0.0;
  }
  if (all_zero) {
    throw degenerate_data_error("initial data is identically zero");
  }
  const double lp0 = lambda_prime_zero(idx);
  const std::size_t N = data.u0.size();
  const double h = data.R / static_cast<double>(N - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double r = h * static_cast<double>(i);
    const double g = (data.u1[i] - lp0 * data.u0[i]) *
                     eigenfunction_phi(r, data.n) * std::pow(r, data.n - 1);
    sum += (i == 0 || i + 1 == N) ? 0.5 * g : g;
  }
  return unit_sphere_area(data.n) * sum * h;
}

// Frame constant c >= 1 with  c^{-1} t^ell lambda <= |lambda'| <= c t^ell lambda
// for t >= 1, certified on a dense grid of (0, 50] with a 5% safety margin;
// the ratio tends to 1 monotonically beyond the grid.
inline double estimate_c0(const TricomiIndex& idx) {
  double rho_min = std::numeric_limits<double>::max();
  double rho_max_tail = 1.0;
  const int grid = 4000;
  for (int k = 1; k <= grid; ++k) {
    const double t = 50.0 * static_cast<double>(k) / grid;
    const double rho = -lambda_ratio(idx, t) / std::pow(t, idx.ell);
    rho_min = std::min(rho_min, rho);
    if (t >= 1.0) rho_max_tail = std::max(rho_max_tail, rho);
  }
  return 1.05 * std::max({1.0, 1.0 / rho_min, rho_max_tail});
}

// Open interval of usable weights omega: (1/2, 1/2 + 1/(2 c0^2)).
inline std::pair<double, double> omega_window(double c0) {
  if (!(c0 >= 1.0)) throw domain_error("frame constant must be >= 1");
  return {0.5, 0.5 + 0.5 / (c0 * c0)};
}

// Coefficients of the first-order ODE system satisfied by the weighted
// functionals: h1 is the drift, h2 the restoring term; h2 >= 0 on t >= 1
// precisely because omega sits inside the window.
inline double h1(const TricomiIndex& idx, double t, double omega) {
  return lambda_ratio(idx, t) * (1.0 - 2.0 * omega);
}

inline double h2(const TricomiIndex& idx, double t, double omega) {
  const double ratio = lambda_ratio(idx, t);
  return std::pow(t, 2.0 * idx.ell) + ratio * ratio * (1.0 - 2.0 * omega);
}

}  // namespace tricomi::testfun
