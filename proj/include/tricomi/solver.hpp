#pragma once

// Radial finite-difference solver for
//   u_tt - t^{2 ell} Lap u = |u_t|^p + |u|^q,   u(0) = eps u0,  u_t(0) = eps u1,
// on [0, domain_radius] with a Dirichlet wall well outside the light cone
// r = R + t^{ell+1}/(ell+1).  Variable-step leapfrog in time (the wave speed
// t^ell grows, so the stable step shrinks), second-order radial Laplacian
// with the symmetric limit at r = 0, and running functional/identity
// tracking against the weighted averages used by the blow-up argument.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "exponents.hpp"
#include "testfun.hpp"

namespace tricomi::solver {

using exponents::ModelParams;
using testfun::DataPair;

struct SimConfig {
  ModelParams params;
  DataPair data;                // unit-size profiles on [0, domain_radius]
  int grid_points = 512;        // >= 128
  double domain_radius = 0.0;   // must cover R + cone_offset(t_max) + margin
  double t_max = 2.0;
  double cfl_safety = 0.5;      // in (0, 1)
  double blowup_threshold = 1e6;
  bool linear_only = false;
  int output_stride = 1;        // record every k-th step
  // Optional analytic profiles; estimate_lifespan resamples through them
  // instead of interpolating the tabulated data.
  std::function<double(double)> u0_fn;
  std::function<double(double)> u1_fn;
};

// Compactly supported C^2 bump (1 - (r/R)^2)^3, the default displacement
// and velocity profile.
inline double bump_profile(double r, double R) {
  if (r >= R) return 0.0;
  const double s = 1.0 - (r / R) * (r / R);
  return s * s * s;
}

inline SimConfig make_bump_config(const ModelParams& P, double t_max,
                                  double dx_target, double margin = 0.5) {
  SimConfig cfg;
  cfg.params = P;
  cfg.t_max = t_max;
  cfg.domain_radius = P.R + testfun::cone_offset(P.ell, t_max) + margin;
  cfg.grid_points =
      std::max(128, static_cast<int>(std::ceil(cfg.domain_radius / dx_target)) + 1);
  const double R = P.R;
  cfg.u0_fn = [R](double r) { return bump_profile(r, R); };
  cfg.u1_fn = [R](double r) { return bump_profile(r, R); };
  cfg.data = testfun::sample_data(cfg.u0_fn, cfg.u1_fn,
                                  static_cast<std::size_t>(cfg.grid_points),
                                  cfg.domain_radius, P.n);
  return cfg;
}

inline void validate_config(const SimConfig& cfg) {
  exponents::validate(cfg.params);
  if (cfg.params.n > 3) {
    throw config_error("solver supports n <= 3");
  }
  if (cfg.grid_points < 128) throw config_error("need at least 128 grid points");
  if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety < 1.0)) {
    throw config_error("cfl_safety must lie in (0, 1)");
  }
  if (!(cfg.t_max > 0.0)) throw config_error("t_max must be > 0");
  if (!(cfg.blowup_threshold > 0.0)) {
    throw config_error("blowup_threshold must be > 0");
  }
  if (cfg.output_stride < 1) throw config_error("output_stride must be >= 1");
  const double dx = cfg.domain_radius / (cfg.grid_points - 1);
  const double needed =
      cfg.params.R + testfun::cone_offset(cfg.params.ell, cfg.t_max) + 4.0 * dx;
  if (!(cfg.domain_radius >= needed)) {
    throw config_error("domain_radius does not cover the light cone up to t_max");
  }
  if (cfg.data.u0.size() != static_cast<std::size_t>(cfg.grid_points) ||
      cfg.data.u1.size() != cfg.data.u0.size()) {
    throw config_error("data must be sampled on the simulation grid");
  }
}

struct SimState {
  double t = 0.0;
  std::vector<double> u;       // level at time t
  std::vector<double> u_prev;  // level at time t - dt_current
  double dt_current = 0.0;
};

enum class BlowupReason { none, threshold, nan };

struct IdentityResiduals {
  double duhamel_max_rel = 0.0;
  double u1u0_max_rel = 0.0;
};

struct SimResult {
  std::vector<double> times;
  std::vector<double> U_series;   // plain spatial average of u
  std::vector<double> U0_series;  // weighted average against Psi
  std::vector<double> U1_series;  // weighted average of u_t against Psi
  std::vector<double> support_radius_series;
  std::vector<double> max_abs_series;
  std::optional<double> blowup_time;
  BlowupReason blowup_reason = BlowupReason::none;
  IdentityResiduals identity_residuals;
  double initial_identity_value = 0.0;  // eps * I of the data
};

namespace detail {

inline double pow_abs(double x, double e) {
  const double a = std::abs(x);
  if (e == 2.0) return a * a;
  if (e == 3.0) return a * a * a;
  return std::pow(a, e);
}

inline double timestep(const SimConfig& cfg, double dx, double t) {
  const double speed = std::max(std::pow(t, cfg.params.ell), 0.1);
  return std::min(cfg.cfl_safety * dx / speed, dx);
}

// Radial Laplacian; i is an interior index or 0, with the symmetric
// limit 2 n (u1 - u0) / dx^2 on the axis.
inline void laplacian(const std::vector<double>& u, int n, double dx,
                      std::vector<double>& out) {
  const std::size_t N = u.size();
  const double inv2 = 1.0 / (dx * dx);
  out[0] = 2.0 * n * (u[1] - u[0]) * inv2;
  for (std::size_t i = 1; i + 1 < N; ++i) {
    const double r = dx * static_cast<double>(i);
    out[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv2 +
             (n - 1) * (u[i + 1] - u[i - 1]) / (2.0 * dx * r);
  }
  out[N - 1] = 0.0;
}

}  // namespace detail

// State at t = 0 with a ghost pre-level chosen so the first leapfrog step
// reproduces the Taylor expansion
//   u(dt) = eps u0 + dt eps u1 + dt^2/2 (t^{2 ell} Lap u + |eps u1|^p + |eps u0|^q)|_{t=0}.
inline SimState init(const SimConfig& cfg) {
  validate_config(cfg);
  const int N = cfg.grid_points;
  const double dx = cfg.domain_radius / (N - 1);
  const double eps = cfg.params.epsilon;

  SimState st;
  st.t = 0.0;
  st.u.resize(N);
  st.u_prev.resize(N);
  for (int i = 0; i < N; ++i) st.u[i] = eps * cfg.data.u0[i];

  const double dt0 = detail::timestep(cfg, dx, 0.0);
  std::vector<double> lap(N);
  detail::laplacian(st.u, cfg.params.n, dx, lap);
  const double c2 = std::pow(0.0, 2.0 * cfg.params.ell);  // 1 for ell = 0
  for (int i = 0; i < N; ++i) {
    const double v = eps * cfg.data.u1[i];
    double acc = c2 * lap[i];
    if (!cfg.linear_only) {
      acc += detail::pow_abs(v, cfg.params.p) +
             detail::pow_abs(st.u[i], cfg.params.q);
    }
    st.u_prev[i] = st.u[i] - dt0 * v + 0.5 * dt0 * dt0 * acc;
  }
  st.u_prev[N - 1] = 0.0;
  st.dt_current = dt0;
  return st;
}

// One variable-step leapfrog level: with h- = dt_current and h+ the new
// step, u_new = [(h- + h+) u - h+ u_prev] / h- + F h+ (h- + h+) / 2 where
// F = t^{2 ell} Lap u + |u_t|^p + |u|^q and u_t is the backward difference.
inline void step(SimState& st, const SimConfig& cfg) {
  const int N = cfg.grid_points;
  const double dx = cfg.domain_radius / (N - 1);
  double hp = detail::timestep(cfg, dx, st.t);
  if (st.t + hp > cfg.t_max) hp = cfg.t_max - st.t;
  const double hm = st.dt_current;

  static thread_local std::vector<double> lap;
  lap.resize(N);
  detail::laplacian(st.u, cfg.params.n, dx, lap);
  const double c2 = std::pow(st.t, 2.0 * cfg.params.ell);

  static thread_local std::vector<double> next;
  next.resize(N);
  const double w = 0.5 * hp * (hm + hp);
  for (int i = 0; i + 1 < N; ++i) {
    double F = c2 * lap[i];
    if (!cfg.linear_only) {
      const double v = (st.u[i] - st.u_prev[i]) / hm;
      F += detail::pow_abs(v, cfg.params.p) +
           detail::pow_abs(st.u[i], cfg.params.q);
    }
    next[i] = ((hm + hp) * st.u[i] - hp * st.u_prev[i]) / hm + F * w;
  }
  next[N - 1] = 0.0;

  st.u_prev.swap(st.u);
  st.u.swap(next);
  st.t += hp;
  st.dt_current = hp;
}

struct Functionals {
  double U = 0.0;   // int u dx
  double U0 = 0.0;  // int u Psi dx
  double U1 = 0.0;  // int u_t Psi dx (backward difference)
};

// Weighted averages at the state time; u_t is the backward difference
// across the level pair held by the state.
inline Functionals functionals(const SimState& st, const SimConfig& cfg) {
  validate_config(cfg);
  const int N = cfg.grid_points;
  const double dx = cfg.domain_radius / (N - 1);
  const int n = cfg.params.n;
  const auto idx = testfun::make_index(cfg.params.ell);
  const double lam = testfun::lambda_fn(idx, st.t);
  const double omega = testfun::unit_sphere_area(n);

  Functionals f;
  for (int i = 0; i < N; ++i) {
    const double r = dx * i;
    const double w = (i == 0 || i == N - 1 ? 0.5 : 1.0) * std::pow(r, n - 1);
    const double phi = testfun::eigenfunction_phi(r, n);
    const double v = (st.u[i] - st.u_prev[i]) / st.dt_current;
    f.U += w * st.u[i];
    f.U0 += w * st.u[i] * phi;
    f.U1 += w * v * phi;
  }
  f.U *= omega * dx;
  f.U0 *= omega * dx * lam;
  f.U1 *= omega * dx * lam;
  return f;
}

namespace detail {

inline double support_radius(const std::vector<double>& u, double dx) {
  double peak = 0.0;
  for (double x : u) peak = std::max(peak, std::abs(x));
  if (peak == 0.0) return 0.0;
  const double thr = 1e-6 * peak;
  for (std::size_t i = u.size(); i-- > 0;) {
    if (std::abs(u[i]) > thr) return dx * static_cast<double>(i);
  }
  return 0.0;
}

}  // namespace detail

// Full simulation: advances to t_max or blow-up, recording the functional
// series at half-levels (where the centred difference u_t is second-order
// accurate) plus an exact t = 0 row, and accumulating the residuals of the
// two integral identities satisfied by the continuum solution:
//   U(t)  = U(0) + U'(0) t + int_0^t (t - tau) N(tau) dtau,
//   U1(t) - (lambda'/lambda)(t) U0(t) = eps I + int_0^t int N Psi dx dtau,
// with N the nonlinear source mass.
inline SimResult run(const SimConfig& cfg) {
  SimState st = init(cfg);
  const int N = cfg.grid_points;
  const double dx = cfg.domain_radius / (N - 1);
  const int n = cfg.params.n;
  const double eps = cfg.params.epsilon;
  const auto idx = testfun::make_index(cfg.params.ell);
  const double omega = testfun::unit_sphere_area(n);

  // Quadrature weights and eigenfunction samples, fixed for the run.
  std::vector<double> wq(N), phi(N);
  for (int i = 0; i < N; ++i) {
    const double r = dx * i;
    wq[i] = (i == 0 || i == N - 1 ? 0.5 : 1.0) * std::pow(r, n - 1) * omega * dx;
    phi[i] = testfun::eigenfunction_phi(r, n);
  }

  SimResult res;
  const double I_data = testfun::initial_functional(idx, cfg.data);
  res.initial_identity_value = eps * I_data;

  // Exact t = 0 row straight from the data.
  double U0_of_t0 = 0.0, W0 = 0.0, W1 = 0.0, N0 = 0.0, Npsi0 = 0.0;
  for (int i = 0; i < N; ++i) {
    const double a = eps * cfg.data.u0[i];
    const double b = eps * cfg.data.u1[i];
    U0_of_t0 += wq[i] * a;
    W0 += wq[i] * a * phi[i];
    W1 += wq[i] * b * phi[i];
    if (!cfg.linear_only) {
      const double nl = detail::pow_abs(b, cfg.params.p) +
                        detail::pow_abs(a, cfg.params.q);
      N0 += wq[i] * nl;
      Npsi0 += wq[i] * nl * phi[i];
    }
  }
  double Uprime0 = 0.0;
  for (int i = 0; i < N; ++i) Uprime0 += wq[i] * eps * cfg.data.u1[i];

  res.times.push_back(0.0);
  res.U_series.push_back(U0_of_t0);
  res.U0_series.push_back(W0);  // lambda(0) = 1
  res.U1_series.push_back(W1);
  res.support_radius_series.push_back(detail::support_radius(st.u, dx));
  double peak0 = 0.0;
  for (double x : st.u) peak0 = std::max(peak0, std::abs(x));
  res.max_abs_series.push_back(peak0);

  // Time-trapezoid accumulators for the identity integrals.
  double M0 = 0.0;        // int N dtau
  double M1 = 0.0;        // int tau N dtau
  double Mpsi = 0.0;      // int int N Psi dx dtau
  double prev_tau = 0.0;  // last sample time of the accumulators
  double prev_N = N0;
  double prev_Npsi = Npsi0;
  bool track_psi = true;

  long step_index = 0;
  while (st.t < cfg.t_max * (1.0 - 1e-14)) {
    step(st, cfg);
    ++step_index;

    const double th = st.t - 0.5 * st.dt_current;  // half-level time
    const double lam = testfun::lambda_fn(idx, th);
    if (lam < 1e-100) track_psi = false;  // weight no longer representable

    double U = 0.0, W = 0.0, Wv = 0.0, Nmass = 0.0, Npsi = 0.0;
    double peak = 0.0;
    for (int i = 0; i < N; ++i) {
      const double uh = 0.5 * (st.u[i] + st.u_prev[i]);
      const double v = (st.u[i] - st.u_prev[i]) / st.dt_current;
      U += wq[i] * uh;
      W += wq[i] * uh * phi[i];
      Wv += wq[i] * v * phi[i];
      if (!cfg.linear_only) {
        const double nl = detail::pow_abs(v, cfg.params.p) +
                          detail::pow_abs(uh, cfg.params.q);
        Nmass += wq[i] * nl;
        Npsi += wq[i] * nl * phi[i];
      }
      peak = std::max(peak, std::abs(st.u[i]));
    }

    if (!std::isfinite(peak)) {
      res.blowup_time = st.t;
      res.blowup_reason = BlowupReason::nan;
      break;
    }

    const double dtau = th - prev_tau;
    M0 += 0.5 * (prev_N + Nmass) * dtau;
    M1 += 0.5 * (prev_tau * prev_N + th * Nmass) * dtau;
    if (track_psi) {
      Mpsi += 0.5 * (prev_Npsi + lam * Npsi) * dtau;
    }
    prev_tau = th;
    prev_N = Nmass;
    prev_Npsi = lam * Npsi;

    const double duh =
        std::abs(U - U0_of_t0 - Uprime0 * th - (th * M0 - M1)) /
        std::max(std::abs(U), 1e-300);
    res.identity_residuals.duhamel_max_rel =
        std::max(res.identity_residuals.duhamel_max_rel, duh);

    if (track_psi) {
      const double G = lam * Wv - testfun::lambda_prime(idx, th) * W;
      const double rhs = eps * I_data + Mpsi;
      const double den =
          std::max({std::abs(G), std::abs(eps * I_data), 1e-300});
      res.identity_residuals.u1u0_max_rel =
          std::max(res.identity_residuals.u1u0_max_rel, std::abs(G - rhs) / den);
    }

    const bool hit = peak > cfg.blowup_threshold;
    if (step_index % cfg.output_stride == 0 || hit ||
        st.t >= cfg.t_max * (1.0 - 1e-14)) {
      res.times.push_back(th);
      res.U_series.push_back(U);
      res.U0_series.push_back(lam * W);
      res.U1_series.push_back(lam * Wv);
      res.support_radius_series.push_back(detail::support_radius(st.u, dx));
      res.max_abs_series.push_back(peak);
    }

    if (hit) {
      res.blowup_time = st.t;
      res.blowup_reason = BlowupReason::threshold;
      break;
    }
  }
  return res;
}

struct LifespanEstimate {
  bool observed = false;  // false: no blow-up before t_max at any resolution
  double T_est = 0.0;     // finest-grid blow-up time
  double uncertainty = 0.0;  // max pairwise spread across resolutions
};

// Blow-up time with grid-refinement error control: rerun with the grid
// doubled (refinements - 1) times; the estimate is the finest time and the
// uncertainty the largest spread between any two resolutions.
inline LifespanEstimate estimate_lifespan(const SimConfig& cfg, int refinements) {
  if (refinements < 2) throw config_error("need at least 2 refinement levels");
  validate_config(cfg);
  std::vector<double> times;
  for (int k = 0; k < refinements; ++k) {
    SimConfig c = cfg;
    c.grid_points = (cfg.grid_points - 1) * (1 << k) + 1;
    if (k > 0) {
      if (cfg.u0_fn && cfg.u1_fn) {
        c.data = testfun::sample_data(cfg.u0_fn, cfg.u1_fn,
                                      static_cast<std::size_t>(c.grid_points),
                                      cfg.domain_radius, cfg.params.n);
      } else {
        // Linear interpolation of the tabulated profiles.
        c.data.u0.resize(c.grid_points);
        c.data.u1.resize(c.grid_points);
        const int M = cfg.grid_points;
        for (int i = 0; i < c.grid_points; ++i) {
          const double x = static_cast<double>(i) / (c.grid_points - 1) * (M - 1);
          const int j = std::min(static_cast<int>(x), M - 2);
          const double f = x - j;
          c.data.u0[i] = (1.0 - f) * cfg.data.u0[j] + f * cfg.data.u0[j + 1];
          c.data.u1[i] = (1.0 - f) * cfg.data.u1[j] + f * cfg.data.u1[j + 1];
        }
      }
    }
    const SimResult r = run(c);
    if (!r.blowup_time.has_value()) {
      return {};  // no-blowup-observed outcome
    }
    times.push_back(*r.blowup_time);
  }
  LifespanEstimate est;
  est.observed = true;
  est.T_est = times.back();
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t j = i + 1; j < times.size(); ++j) {
      est.uncertainty = std::max(est.uncertainty, std::abs(times[i] - times[j]));
    }
  }
  return est;
}

}  // namespace tricomi::solver
