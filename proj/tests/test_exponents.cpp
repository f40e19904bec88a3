#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "tricomi/exponents.hpp"

using namespace tricomi;
using namespace tricomi::exponents;

namespace {

bool has_flag(const RegionVerdict& v, ResultFlag f) {
  return std::find(v.applicable_results.begin(), v.applicable_results.end(), f) !=
         v.applicable_results.end();
}

// Residual of the defining quadratic a x^2 + b x + c at x, normalized by the
// magnitude of its largest term.
double quad_residual(double a, double b, double c, double x) {
  const double r = a * x * x + b * x + c;
  const double scale =
      std::max({std::abs(a * x * x), std::abs(b * x), std::abs(c), 1.0});
  return std::abs(r) / scale;
}

ModelParams mp(int n, double ell, double p, double q) {
  ModelParams P;
  P.n = n;
  P.ell = ell;
  P.p = p;
  P.q = q;
  return P;
}

}  // namespace

TEST_CASE("critical exponents match frozen references") {
  // Mechanically independent references: 30-digit roots of the defining
  // quadratics.
  CHECK(p0(2, 1.0) == Catch::Approx(1.7583057392117916).epsilon(1e-14));
  CHECK(p0(3, 0.0) == Catch::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-14));
  CHECK(p0(2, 0.0) ==
        Catch::Approx(0.5 * (3.0 + std::sqrt(17.0))).epsilon(1e-14));
  CHECK(p_diag(2, 1.0) ==
        Catch::Approx(2.5615528128088303).epsilon(1e-14));  // (1+sqrt(17))/2
  CHECK(p_tilde0(2, 1.0) ==
        Catch::Approx(5.2749172176353748).epsilon(1e-14));  // (3+sqrt(57))/2
  CHECK(p_tilde1(2, 1.0) == Catch::Approx(3.4).epsilon(1e-14));
  CHECK(p1(2, 1.0) == Catch::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(p1(1, 1.0) == Catch::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("roots satisfy their defining quadratics") {
  for (int n = 2; n <= 6; ++n) {
    for (double ell : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) {
      const double m = (ell + 1.0) * n;
      {
        const double x = p0(n, ell);
        CHECK(quad_residual(m - 1.0, -(m + 1.0 - 2.0 * ell), -2.0 * (ell + 1.0),
                            x) < 1e-12);
      }
      {
        const double x = p_diag(n, ell);
        CHECK(quad_residual(m - 1.0 - 2.0 * ell, -(m + 1.0 - 4.0 * ell),
                            -2.0 * (ell + 1.0), x) < 1e-12);
      }
      {
        const double A = m - 1.0 - 2.0 * ell;
        const double x = p_tilde0(n, ell) - 1.0;
        CHECK(quad_residual(A, m - 3.0 - 2.0 * ell,
                            -2.0 * (ell + 2.0) - 4.0 * ell * (ell + 1.0) / A,
                            x) < 1e-12);
      }
    }
  }
}

TEST_CASE("exponent family and collapse to the classical values") {
  const auto f3 = family_exponents(3.0);
  CHECK(f3.p_gla == Catch::Approx(2.0).epsilon(1e-15));
  CHECK(f3.p_kat == Catch::Approx(2.0).epsilon(1e-15));
  CHECK(f3.p_conf == Catch::Approx(3.0).epsilon(1e-15));

  std::mt19937 rng(421u);
  std::uniform_real_distribution<double> um(1.0 + 1e-3, 20.0);
  for (int i = 0; i < 100; ++i) {
    const auto f = family_exponents(um(rng));
    CHECK(f.p_gla == Catch::Approx(f.p_kat).epsilon(1e-15));
    CHECK(f.p_gla < f.p_conf);
  }

  for (int n = 2; n <= 6; ++n) {
    // Classical limits at ell = 0.
    const double p_str =
        (n + 1.0 + std::sqrt((n + 1.0) * (n + 1.0) + 8.0 * (n - 1.0))) /
        (2.0 * (n - 1.0));
    CHECK(p0(n, 0.0) == Catch::Approx(p_str).epsilon(1e-12));
    CHECK(p_diag(n, 0.0) == Catch::Approx(p_str).epsilon(1e-12));
    CHECK(p_tilde1(n, 0.0) ==
          Catch::Approx(family_exponents(double(n)).p_conf).epsilon(1e-12));

    // Monotone approach along ell in {0.1, 0.01, 0.001}.
    const double d1 = std::abs(p0(n, 0.1) - p_str);
    const double d2 = std::abs(p0(n, 0.01) - p_str);
    const double d3 = std::abs(p0(n, 0.001) - p_str);
    CHECK(d1 > d2);
    CHECK(d2 > d3);
    CHECK(d3 > 0.0);
  }
}

TEST_CASE("exponent table rows reproduce the named roots") {
  // Each row is alpha (p-1)^2 + beta (p-1) - 4 = 0 with alpha - beta = 2
  // for the classical row and 2(1 - ell) for the degenerate rows.
  for (int n = 2; n <= 6; ++n) {
    for (double ell : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const double m = (ell + 1.0) * n;
      struct Row {
        double alpha, beta, expected;
      };
      const Row rows[] = {
          {double(n) - 1.0, double(n) - 3.0, p0(n, 0.0)},
          {m - 1.0, m - 3.0 + 2.0 * ell, p0(n, ell)},
          {m - 1.0 - 2.0 * ell, m - 3.0, p_diag(n, ell)},
      };
      CHECK(rows[0].alpha - rows[0].beta == Catch::Approx(2.0));
      for (int r = 1; r < 3; ++r) {
        CHECK(rows[r].alpha - rows[r].beta ==
              Catch::Approx(2.0 * (1.0 - ell)).margin(1e-12));
      }
      for (const auto& row : rows) {
        const double x =
            detail::positive_root(row.alpha, row.beta, -4.0);
        CHECK(1.0 + x == Catch::Approx(row.expected).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("theta and gamma formulas") {
  CHECK(theta(mp(2, 1.0, 2.0, 2.0)) == Catch::Approx(1.0).margin(1e-15));
  CHECK(gamma_exp(2, 1.0, 1.5) == Catch::Approx(0.875).margin(1e-15));
  for (int n = 2; n <= 6; ++n) {
    for (double ell : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) {
      CHECK(gamma_exp(n, ell, 1.0) == Catch::Approx(2.0).margin(1e-13));
      CHECK(std::abs(gamma_exp(n, ell, p0(n, ell))) < 1e-10);
    }
  }
}

TEST_CASE("boundary curve identities") {
  // The boundary passes through the diagonal point and is strictly
  // decreasing on its live branch.
  for (int n = 2; n <= 6; ++n) {
    for (double ell : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const double d = p_diag(n, ell);
      CHECK(boundary_q(d, n, ell) == Catch::Approx(d).epsilon(1e-10));

      const double m = (ell + 1.0) * n;
      const double pg = family_exponents(m - 2.0 * ell).p_gla;
      CHECK(boundary_q(pg, n, ell) ==
            Catch::Approx(family_exponents(m).p_conf).epsilon(1e-12));

      double prev = std::numeric_limits<double>::infinity();
      for (double p = d - 0.5; p <= d + 2.0; p += 0.25) {
        if (region_bracket(n, ell, p) > 0.0) {
          const double f = boundary_q(p, n, ell);
          CHECK(f < prev);
          prev = f;
        }
      }
    }
  }
  CHECK(boundary_q(1.0, 1, 6.0) == Catch::Approx(2.0).epsilon(1e-15));
  // B(p) = p - 1 for n = 2, ell = 1/2 vanishes identically at p = 1.
  CHECK_THROWS_AS(boundary_q(1.0, 2, 0.5), asymptote_error);
}

TEST_CASE("exponent orderings on the standard grid") {
  for (int n = 2; n <= 6; ++n) {
    for (double ell : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const double v_p1 = p1(n, ell);
      const double v_p0 = p0(n, ell);
      const double v_d = p_diag(n, ell);
      const double v_t0 = p_tilde0(n, ell);
      const double v_t1 = p_tilde1(n, ell);
      CHECK(v_d - v_p1 > 1e-9);
      CHECK(v_t0 - v_d > 1e-9);
      CHECK(v_d - v_p0 > 1e-9);
      CHECK(v_t1 - v_d > 1e-9);
    }
  }
}

TEST_CASE("membership equals the sign of theta and the bracket form") {
  std::mt19937 rng(20260825u);
  std::uniform_int_distribution<int> un(1, 6);
  std::uniform_real_distribution<double> ul(0.0, 5.0);
  std::uniform_real_distribution<double> ue(1.0 + 1e-6, 12.0);
  int mismatches = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto P = mp(un(rng), ul(rng), ue(rng), ue(rng));
    const bool via_classify = classify(P).in_gamma;
    const bool via_theta = theta(P) > 0.0;
    const bool via_bracket =
        region_bracket(P.n, P.ell, P.p) * (P.q - 1.0) < 4.0;
    if (via_classify != via_theta || via_classify != via_bracket) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("ell = 0 membership reduces to the classical inequality") {
  std::mt19937 rng(77u);
  std::uniform_int_distribution<int> un(1, 8);
  std::uniform_real_distribution<double> ue(1.0 + 1e-6, 12.0);
  for (int i = 0; i < 10000; ++i) {
    const int n = un(rng);
    const double p = ue(rng), q = ue(rng);
    const bool lhs = classify(mp(n, 0.0, p, q)).in_gamma;
    const bool rhs = (q - 1.0) * ((n - 1.0) * p - 2.0) < 4.0;
    REQUIRE(lhs == rhs);
  }
}

TEST_CASE("classification at the reference points") {
  {
    const auto v = classify(mp(2, 1.0, 2.0, 2.0));
    CHECK(v.in_gamma);
    REQUIRE(v.applicable_results.size() == 1);
    CHECK(v.applicable_results[0] == ResultFlag::main_theorem);
    CHECK(v.lifespan_bound.kind == BoundKind::polynomial);
    CHECK(v.lifespan_bound.exponent == Catch::Approx(2.0).epsilon(1e-13));
  }
  {
    const auto v = classify(mp(1, 1.0, 10.0, 10.0));
    CHECK(v.in_gamma);
    CHECK(has_flag(v, ResultFlag::main_theorem));
  }
  {
    // Above the gap strip in 1D with strong degeneracy: nothing applies.
    const auto v = classify(mp(1, 6.0, 1.5, 6.0));
    CHECK_FALSE(v.in_gamma);
    CHECK(v.applicable_results.empty());
    CHECK(v.lifespan_bound.kind == BoundKind::none);
    CHECK(v.notes.find("gap") != std::string::npos);
    CHECK_THROWS_AS(lifespan_bound(mp(1, 6.0, 1.5, 6.0)), no_bound_error);
  }
}

TEST_CASE("critical points fall back to exponential bounds") {
  {
    // q exactly at the power-critical height, p too large for anything else.
    const double q = p0(2, 1.0);
    const auto v = classify(mp(2, 1.0, 10.0, q));
    CHECK_FALSE(v.in_gamma);
    REQUIRE(v.applicable_results.size() == 1);
    CHECK(v.applicable_results[0] == ResultFlag::power_critical);
    CHECK(v.lifespan_bound.kind == BoundKind::exponential_q);
    CHECK(v.lifespan_bound.exponent ==
          Catch::Approx(q * (q - 1.0)).epsilon(1e-13));
  }
  {
    // p exactly at the derivative-critical value, q far above the region.
    const auto v = classify(mp(2, 1.0, p1(2, 1.0), 4.0));
    CHECK_FALSE(v.in_gamma);
    CHECK(has_flag(v, ResultFlag::derivative_only));
    CHECK(has_flag(v, ResultFlag::derivative_critical));
    CHECK(v.lifespan_bound.kind == BoundKind::exponential_p);
    CHECK(v.lifespan_bound.exponent ==
          Catch::Approx(p1(2, 1.0) - 1.0).epsilon(1e-13));
  }
}

TEST_CASE("subcritical side results and the sharpest-bound rule") {
  {
    // Outside the region but inside the derivative range: k = 1/(1/(p-1) - (m-1)/2).
    const auto v = classify(mp(2, 1.0, 1.5, 4.0));
    CHECK_FALSE(v.in_gamma);
    CHECK(has_flag(v, ResultFlag::derivative_only));
    CHECK(v.lifespan_bound.kind == BoundKind::polynomial);
    CHECK(v.lifespan_bound.exponent == Catch::Approx(2.0).epsilon(1e-13));
  }
  {
    // Low-dimension power bound beats the main theorem when its k is smaller.
    const auto v = classify(mp(1, 1.0, 10.0, 2.0));
    CHECK(v.in_gamma);
    CHECK(has_flag(v, ResultFlag::main_theorem));
    CHECK(has_flag(v, ResultFlag::kato_low_dim));
    CHECK(v.lifespan_bound.kind == BoundKind::polynomial);
    CHECK(v.lifespan_bound.exponent == Catch::Approx(1.0).epsilon(1e-13));
    CHECK(v.notes.find("kato-low-dim k=1") != std::string::npos);
    CHECK(v.notes.find("selected kato-low-dim") != std::string::npos);
  }
  {
    // Power-subcritical candidate: k = q(q-1)/gamma.
    const auto v = classify(mp(2, 1.0, 6.0, 1.5));
    CHECK(has_flag(v, ResultFlag::power_subcritical));
    bool found_poly = v.lifespan_bound.kind == BoundKind::polynomial;
    CHECK(found_poly);
    // gamma(2,1,1.5) = 7/8, so that candidate is 1.5*0.5/0.875 = 6/7.
    CHECK(v.notes.find("power-subcritical") != std::string::npos);
  }
}

TEST_CASE("region samples carry the labelled anchor points") {
  {
    const auto pts = region_boundary_samples(2, 1.0, 1.1, 6.0, 200);
    bool s = false, pp = false, d = false, qq = false;
    int boundary_rows = 0;
    double prev_q = std::numeric_limits<double>::infinity();
    for (const auto& r : pts) {
      if (r.kind == "boundary") {
        ++boundary_rows;
        CHECK(r.q < prev_q);
        prev_q = r.q;
        CHECK(boundary_q(r.p, 2, 1.0) == Catch::Approx(r.q));
      } else if (r.kind == "special") {
        if (r.label == "S") {
          s = true;
          CHECK(r.p == Catch::Approx(p1(2, 1.0)));
          CHECK(r.q == Catch::Approx(p0(2, 1.0)));
        }
        if (r.label == "P") {
          pp = true;
          CHECK(r.q == Catch::Approx(3.4));
        }
        if (r.label == "D") {
          d = true;
          CHECK(r.p == Catch::Approx(r.q));
        }
        if (r.label == "Q") {
          qq = true;
          CHECK(r.p == Catch::Approx(p_tilde0(2, 1.0)));
        }
      }
    }
    CHECK(boundary_rows > 100);
    CHECK((s && pp && d && qq));
  }
  {
    // 1D shallow degeneracy: whole quadrant inside, only the S' anchor.
    const auto pts = region_boundary_samples(1, 1.0, 1.1, 6.0, 100);
    int boundary_rows = 0, asymptotes = 0;
    bool sprime = false;
    for (const auto& r : pts) {
      if (r.kind == "boundary") ++boundary_rows;
      if (r.kind == "asymptote") ++asymptotes;
      if (r.kind == "special" && r.label == "S'") {
        sprime = true;
        CHECK(r.p == Catch::Approx(3.0));
        CHECK(r.q == Catch::Approx(3.0));
      }
    }
    CHECK(boundary_rows == 0);
    CHECK(asymptotes == 0);
    CHECK(sprime);
  }
  {
    // 1D strong degeneracy: live boundary branch left of the asymptote.
    const auto pts = region_boundary_samples(1, 6.0, 1.05, 3.0, 400);
    int boundary_rows = 0, asymptotes = 0;
    for (const auto& r : pts) {
      if (r.kind == "boundary") {
        ++boundary_rows;
        CHECK(r.p < 5.0 / 3.0);
      }
      if (r.kind == "asymptote") {
        ++asymptotes;
        CHECK(r.p == Catch::Approx(5.0 / 3.0).epsilon(1e-14));
      }
    }
    CHECK(boundary_rows > 50);
    CHECK(asymptotes == 1);
  }
  CHECK_THROWS_AS(region_boundary_samples(2, 1.0, 0.9, 6.0, 100), config_error);
  CHECK_THROWS_AS(region_boundary_samples(2, 1.0, 1.1, 6.0, 1), config_error);
}

TEST_CASE("parameter validation rejects out-of-domain input") {
  CHECK_THROWS_AS(theta(mp(0, 1.0, 2.0, 2.0)), domain_error);
  CHECK_THROWS_AS(theta(mp(2, -0.5, 2.0, 2.0)), domain_error);
  CHECK_THROWS_AS(theta(mp(2, 1.0, 1.0, 2.0)), domain_error);
  CHECK_THROWS_AS(theta(mp(2, 1.0, 2.0, 0.5)), domain_error);
  {
    auto P = mp(2, 1.0, 2.0, 2.0);
    P.epsilon = 0.0;
    CHECK_THROWS_AS(validate(P), domain_error);
    P.epsilon = 1.0;
    P.R = -1.0;
    CHECK_THROWS_AS(validate(P), domain_error);
  }
  CHECK_THROWS_AS(p0(1, 1.0), domain_error);
  CHECK_THROWS_AS(p1(1, 0.0), domain_error);
  CHECK_THROWS_AS(gamma_exp(1, 1.0, 2.0), domain_error);
  CHECK_THROWS_AS(family_exponents(1.0), domain_error);
  CHECK_THROWS_AS(p_diag(1, 1.0), domain_error);
  CHECK_THROWS_AS(p_tilde0(1, 1.0), domain_error);
  CHECK_THROWS_AS(p_tilde1(1, 1.0), domain_error);
}
