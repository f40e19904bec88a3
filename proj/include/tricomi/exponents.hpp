#pragma once

// Critical-exponent formulas for the degenerate wave model with combined
// nonlinearity |u_t|^p + |u|^q, the blow-up region and its boundary curve,
// the classification of a parameter point against every known result, and
// the selection of the sharpest lifespan bound.
//
// Everything is driven by the effective dimension m = (ell+1) n and the
// quantity theta = 2 - (1/2) [((ell+1)n - 1) p - 2 ell (p-1) - 2] (q-1):
// the blow-up region is exactly {theta > 0}.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace tricomi::exponents {

struct ModelParams {
  int n = 1;             // space dimension
  double ell = 0.0;      // degeneracy exponent (wave speed t^ell)
  double p = 2.0;        // derivative-nonlinearity exponent
  double q = 2.0;        // power-nonlinearity exponent
  double epsilon = 1.0;  // data size
  double R = 1.0;        // data support radius
};

inline void validate(const ModelParams& P) {
  if (P.n < 1) throw domain_error("dimension n must be >= 1");
  if (!(std::isfinite(P.ell) && P.ell >= 0.0)) {
    throw domain_error("ell must be finite and >= 0");
  }
  if (!(P.p > 1.0)) throw domain_error("p must be > 1");
  if (!(P.q > 1.0)) throw domain_error("q must be > 1");
  if (!(P.epsilon > 0.0)) throw domain_error("epsilon must be > 0");
  if (!(P.R > 0.0)) throw domain_error("R must be > 0");
}

// Absolute tolerance for treating a point as exactly critical (q = p0,
// p = p1).  Critical sets are measure-zero; anything looser risks
// misclassifying nearby generic points.
inline constexpr double kCriticalTol = 1e-12;

namespace detail {

// Unique positive root of a x^2 + b x + c = 0 for a > 0, c < 0 (the roots
// then straddle zero), via the cancellation-free quadratic formula.
inline double positive_root(double a, double b, double c) {
  if (!(a > 0.0) || !(c < 0.0)) {
    throw config_error("quadratic is not in the expected sign configuration");
  }
  const double disc = b * b - 4.0 * a * c;
  const double s = std::sqrt(disc);
  const double qq = -0.5 * (b + (b >= 0.0 ? s : -s));
  const double r1 = qq / a;
  const double r2 = c / qq;
  return std::max(r1, r2);
}

}  // namespace detail

// Critical exponent for the pure power nonlinearity |u|^q: positive root of
// ((ell+1)n - 1) p^2 - ((ell+1)n + 1 - 2 ell) p - 2 (ell+1) = 0.
inline double p0(int n, double ell) {
  if (n < 2) throw domain_error("p0 requires n >= 2 (use the Kato exponent in 1D)");
  if (!(std::isfinite(ell) && ell >= 0.0)) throw domain_error("ell must be >= 0");
  const double m = (ell + 1.0) * n;
  return detail::positive_root(m - 1.0, -(m + 1.0 - 2.0 * ell), -2.0 * (ell + 1.0));
}

// Critical exponent for the derivative nonlinearity |u_t|^p:
// ((ell+1)n + 1) / ((ell+1)n - 1).
inline double p1(int n, double ell) {
  if (n < 1) throw domain_error("dimension n must be >= 1");
  if (!(std::isfinite(ell) && ell >= 0.0)) throw domain_error("ell must be >= 0");
  const double m = (ell + 1.0) * n;
  if (!(m > 1.0)) throw domain_error("p1 requires (ell+1) n > 1");
  return (m + 1.0) / (m - 1.0);
}

struct FamilyExponents {
  double p_gla;   // 1 + 2/(m-1), derivative-nonlinearity critical value
  double p_kat;   // (m+1)/(m-1), the same number under its low-dimension name
  double p_conf;  // (m+3)/(m-1), subconformal threshold
};

inline FamilyExponents family_exponents(double m) {
  if (!(m > 1.0)) throw domain_error("family exponents need m > 1");
  return {1.0 + 2.0 / (m - 1.0), (m + 1.0) / (m - 1.0), (m + 3.0) / (m - 1.0)};
}

// Diagonal intersection of the region boundary with {p = q}.
inline double p_diag(int n, double ell) {
  if (n < 2) throw domain_error("p_diag requires n >= 2");
  if (!(std::isfinite(ell) && ell >= 0.0)) throw domain_error("ell must be >= 0");
  const double m = (ell + 1.0) * n;
  const double lead = m - 1.0 - 2.0 * ell;
  if (!(lead > 0.0)) throw config_error("degenerate leading coefficient in p_diag");
  return detail::positive_root(lead, -(m + 1.0 - 4.0 * ell), -2.0 * (ell + 1.0));
}

// Abscissa where the boundary curve crosses the height q = p0: greatest
// root of A (p-1)^2 + (A-2)(p-1) - 2(ell+2) - 4 ell (ell+1)/A = 0 with
// A = (ell+1)n - 1 - 2 ell.
inline double p_tilde0(int n, double ell) {
  if (n < 2) throw domain_error("p_tilde0 requires n >= 2");
  if (!(std::isfinite(ell) && ell >= 0.0)) throw domain_error("ell must be >= 0");
  const double m = (ell + 1.0) * n;
  const double A = m - 1.0 - 2.0 * ell;
  if (!(A > 0.0)) throw config_error("degenerate leading coefficient in p_tilde0");
  const double c = -2.0 * (ell + 2.0) - 4.0 * ell * (ell + 1.0) / A;
  return 1.0 + detail::positive_root(A, m - 3.0 - 2.0 * ell, c);
}

// Boundary height above p = p1.
inline double p_tilde1(int n, double ell) {
  if (n < 2) throw domain_error("p_tilde1 requires n >= 2");
  if (!(std::isfinite(ell) && ell >= 0.0)) throw domain_error("ell must be >= 0");
  const double m = (ell + 1.0) * n;
  const double den = (m - 1.0) * (m - 1.0) - 4.0 * ell;
  if (den == 0.0) throw config_error("degenerate denominator in p_tilde1");
  return ((m + 3.0) * (m - 1.0) - 4.0 * ell) / den;
}

// The bracket B with  membership <=> B (q-1) < 4; doubles as the
// denominator of the boundary curve.
inline double region_bracket(int n, double ell, double p) {
  const double m = (ell + 1.0) * n;
  return (m - 1.0) * p - 2.0 * ell * (p - 1.0) - 2.0;
}

inline double theta(const ModelParams& P) {
  validate(P);
  return 2.0 - 0.5 * (region_bracket(P.n, P.ell, P.p) * (P.q - 1.0));
}

// gamma(n, ell, q) = (ell+1) + ((ell+1)n + 1 - 2 ell) q / 2
//                  - ((ell+1)n - 1) q^2 / 2;
// positive on 1 <= q < p0 and zero at q = p0.
inline double gamma_exp(int n, double ell, double q) {
  if (n < 2) throw domain_error("gamma_exp requires n >= 2");
  if (!(std::isfinite(ell) && ell >= 0.0)) throw domain_error("ell must be >= 0");
  const double m = (ell + 1.0) * n;
  return (ell + 1.0) + 0.5 * (m + 1.0 - 2.0 * ell) * q - 0.5 * (m - 1.0) * q * q;
}

// q-value of the region boundary above p:  1 + 4 / B(p).  Vertical
// asymptote where B vanishes (n = 1 with ell > 0, or n = 2 with ell < 1/2).
inline double boundary_q(double p, int n, double ell) {
  if (n < 1) throw domain_error("dimension n must be >= 1");
  if (!(std::isfinite(ell) && ell >= 0.0)) throw domain_error("ell must be >= 0");
  const double B = region_bracket(n, ell, p);
  if (B == 0.0) {
    throw asymptote_error("boundary curve has a vertical asymptote at p = " +
                          std::to_string(p));
  }
  return 1.0 + 4.0 / B;
}

enum class ResultFlag {
  main_theorem,
  derivative_only,
  power_subcritical,
  power_critical,
  kato_low_dim,
  derivative_critical,
};

inline const char* flag_name(ResultFlag f) {
  switch (f) {
    case ResultFlag::main_theorem: return "main-theorem";
    case ResultFlag::derivative_only: return "derivative-only";
    case ResultFlag::power_subcritical: return "power-subcritical";
    case ResultFlag::power_critical: return "power-critical";
    case ResultFlag::kato_low_dim: return "kato-low-dim";
    case ResultFlag::derivative_critical: return "derivative-critical";
  }
  return "?";
}

enum class BoundKind { polynomial, exponential_q, exponential_p, none };

inline const char* bound_kind_name(BoundKind k) {
  switch (k) {
    case BoundKind::polynomial: return "polynomial";
    case BoundKind::exponential_q: return "exponential-q";
    case BoundKind::exponential_p: return "exponential-p";
    case BoundKind::none: return "none";
  }
  return "?";
}

struct LifespanBound {
  BoundKind kind = BoundKind::none;
  // polynomial: the k in T <= C eps^{-k}; exponential: the k in
  // T <= exp(C eps^{-k}).
  double exponent = 0.0;
};

struct RegionVerdict {
  bool in_gamma = false;
  std::vector<ResultFlag> applicable_results;
  LifespanBound lifespan_bound;
  std::string notes;
};

inline RegionVerdict classify(const ModelParams& P) {
  validate(P);
  const double th = theta(P);
  const double m = (P.ell + 1.0) * P.n;

  RegionVerdict v;
  v.in_gamma = th > 0.0;

  // Polynomial lifespan candidates (exponent k of eps^{-k}) and the two
  // critical-case exponential fallbacks.
  struct Candidate {
    ResultFlag flag;
    double k;
  };
  std::vector<Candidate> poly;
  std::vector<Candidate> expo;  // k = the exponent inside exp(C eps^{-k})

  if (v.in_gamma) {
    v.applicable_results.push_back(ResultFlag::main_theorem);
    poly.push_back({ResultFlag::main_theorem, P.p * (P.q - 1.0) / th});
  }

  // Derivative-nonlinearity range p <= p1; at p = p1 the polynomial rate
  // degenerates into an exponential bound.
  const bool has_p1 = m > 1.0;
  const double p1v = has_p1 ? p1(P.n, P.ell) : std::numeric_limits<double>::infinity();
  const double k_deriv_gap = 1.0 / (P.p - 1.0) - 0.5 * (m - 1.0);
  if (P.p <= p1v) {
    v.applicable_results.push_back(ResultFlag::derivative_only);
    if (std::abs(P.p - p1v) > kCriticalTol && k_deriv_gap > 0.0) {
      poly.push_back({ResultFlag::derivative_only, 1.0 / k_deriv_gap});
    }
  }

  if (P.n >= 2) {
    const double p0v = p0(P.n, P.ell);
    if (std::abs(P.q - p0v) <= kCriticalTol) {
      v.applicable_results.push_back(ResultFlag::power_critical);
      expo.push_back({ResultFlag::power_critical, P.q * (P.q - 1.0)});
    } else if (P.q < p0v) {
      v.applicable_results.push_back(ResultFlag::power_subcritical);
      poly.push_back({ResultFlag::power_subcritical,
                      P.q * (P.q - 1.0) / gamma_exp(P.n, P.ell, P.q)});
    }
  }

  // Low-dimension power range q < p_kat(m) (only n = 1, 2).
  if ((P.n == 1 || P.n == 2) && has_p1 && P.q < family_exponents(m).p_kat) {
    v.applicable_results.push_back(ResultFlag::kato_low_dim);
    poly.push_back(
        {ResultFlag::kato_low_dim, 1.0 / ((P.q + 1.0) / (P.q - 1.0) - m)});
  }

  if (has_p1 && std::abs(P.p - p1v) <= kCriticalTol) {
    v.applicable_results.push_back(ResultFlag::derivative_critical);
    expo.push_back({ResultFlag::derivative_critical, P.p - 1.0});
  }

  // Sharpest bound: the smallest upper bound as eps -> 0.  Among the
  // polynomial rates eps^{-k} that is the smallest k; any polynomial beats
  // the exponential critical-case bounds.
  std::ostringstream notes;
  notes.precision(6);
  notes << "theta=" << th;

  if (P.n == 1) {
    if (P.ell <= 2.0) {
      notes << "; n=1, ell<=2: the blow-up region covers the whole quadrant p,q>1";
    } else if (P.ell <= 4.0) {
      notes << "; n=1, 2<ell<=4: points outside the region are covered by the"
               " derivative range p<=p1";
    } else {
      notes << "; n=1, ell>4: unresolved gap strip p_gla(ell+1)<p<2-2/ell above"
               " the boundary curve";
      if (!v.in_gamma && P.p > p1v) {
        notes << " (this point lies in the gap)";
      }
    }
  }

  const Candidate* best_poly = nullptr;
  for (const auto& c : poly) {
    notes << "; " << flag_name(c.flag) << " k=" << c.k;
    if (best_poly == nullptr || c.k < best_poly->k) best_poly = &c;
  }
  const Candidate* best_expo = nullptr;
  for (const auto& c : expo) {
    notes << "; " << flag_name(c.flag) << " exp-k=" << c.k;
    if (best_expo == nullptr || c.k < best_expo->k) best_expo = &c;
  }

  if (best_poly != nullptr) {
    v.lifespan_bound = {BoundKind::polynomial, best_poly->k};
    notes << "; selected " << flag_name(best_poly->flag) << " polynomial k="
          << best_poly->k;
  } else if (best_expo != nullptr) {
    v.lifespan_bound = {best_expo->flag == ResultFlag::power_critical
                            ? BoundKind::exponential_q
                            : BoundKind::exponential_p,
                        best_expo->k};
    notes << "; selected " << flag_name(best_expo->flag);
  } else {
    v.lifespan_bound = {BoundKind::none, 0.0};
    notes << "; no applicable blow-up result";
  }
  v.notes = notes.str();
  return v;
}

inline LifespanBound lifespan_bound(const ModelParams& P) {
  const auto v = classify(P);
  if (v.applicable_results.empty()) {
    throw no_bound_error("no blow-up result applies at this parameter point");
  }
  return v.lifespan_bound;
}

// One labelled point of the region figure.
struct RegionPoint {
  std::string kind;   // "boundary" | "special" | "asymptote"
  std::string label;  // point name (S, S', P, D, Q) or empty
  double p = 0.0;
  double q = 0.0;  // NaN for the asymptote marker
};

inline std::vector<RegionPoint> region_boundary_samples(int n, double ell,
                                                        double p_lo, double p_hi,
                                                        int count) {
  if (n < 1) throw domain_error("dimension n must be >= 1");
  if (!(std::isfinite(ell) && ell >= 0.0)) throw domain_error("ell must be >= 0");
  if (!(1.0 < p_lo && p_lo < p_hi) || count < 2) {
    throw config_error("need 1 < p_lo < p_hi and count >= 2");
  }
  std::vector<RegionPoint> out;
  const double A = (ell + 1.0) * n - 1.0 - 2.0 * ell;

  for (int i = 0; i < count; ++i) {
    const double p = p_lo + (p_hi - p_lo) * i / (count - 1);
    const double B = region_bracket(n, ell, p);
    if (B > 1e-12) {
      out.push_back({"boundary", "", p, 1.0 + 4.0 / B});
    }
  }

  // Vertical asymptote of the boundary curve, if it falls in range.
  if (A != 0.0) {
    const double p_star = (2.0 - 2.0 * ell) / A;
    if (p_lo < p_star && p_star < p_hi) {
      out.push_back({"asymptote", "", p_star,
                     std::numeric_limits<double>::quiet_NaN()});
    }
  }

  if (n >= 2) {
    const double s_p1 = p1(n, ell);
    out.push_back({"special", "S", s_p1, p0(n, ell)});
    out.push_back({"special", "P", s_p1, p_tilde1(n, ell)});
    const double d = p_diag(n, ell);
    out.push_back({"special", "D", d, d});
    out.push_back({"special", "Q", p_tilde0(n, ell), p0(n, ell)});
  } else if (ell > 0.0) {
    const auto fam = family_exponents(ell + 1.0);
    out.push_back({"special", "S'", fam.p_gla, fam.p_kat});
  }
  return out;
}

}  // namespace tricomi::exponents
