#pragma once

// Experiment harness on top of the exponent algebra, the iteration engine
// and the radial solver: lifespan sweeps over the data size with parallel
// workers, power-law fits of T(eps), region-figure CSV export, and the
// plain-text/CSV reports behind the command-line tool.  All numeric CSV
// fields are written with 17 significant digits so a write/read cycle is
// bit-identical.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "exponents.hpp"
#include "iteration.hpp"
#include "solver.hpp"

namespace tricomi::harness {

using exponents::ModelParams;

// ---------------------------------------------------------------------------
// CSV plumbing

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Sweep records and power-law fitting

struct SweepRecord {
  double epsilon = 0.0;
  std::optional<double> T_measured;  // absent: no blow-up observed
  double T_bound = 0.0;              // analytic divergence time
  double uncertainty = 0.0;          // grid-refinement spread of T_measured
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int n_points = 0;
};

// Least-squares fit of log T against log eps over the measured records.
inline FitResult fit_power_law(const std::vector<SweepRecord>& records) {
  std::vector<double> x, y;
  for (const auto& r : records) {
    if (r.T_measured.has_value()) {
      x.push_back(std::log(r.epsilon));
      y.push_back(std::log(*r.T_measured));
    }
  }
  const int m = static_cast<int>(x.size());
  if (m < 3) {
    throw insufficient_data_error("power-law fit needs at least 3 measured points");
  }
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) {
    throw fit_error("degenerate abscissae: all epsilon values coincide");
  }
  FitResult f;
  f.n_points = m;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (int i = 0; i < m; ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += e * e;
  }
  f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

// ---------------------------------------------------------------------------
// Lifespan sweep

struct SweepOptions {
  double dx = 0.01;          // base grid spacing
  int refinements = 2;       // grid doublings per measurement
  std::vector<double> tmax_ladder = {2.0, 4.0, 8.0, 16.0, 32.0};
  double margin = 0.5;       // Dirichlet wall clearance beyond the cone
  double blowup_threshold = 1e6;
  double cfl = 0.5;
  int workers = 1;
};

// Measure one data size: escalate t_max along the ladder until blow-up is
// observed (small data live long), then record the refined estimate next
// to the analytic divergence time of the derivative-seeded envelope.
inline SweepRecord sweep_point(ModelParams P, const SweepOptions& opts) {
  SweepRecord rec;
  rec.epsilon = P.epsilon;
  rec.T_bound = iteration::lifespan_upper_bound(
      P, iteration::seed(P, iteration::SeedVariant::derivative));
  for (double tmax : opts.tmax_ladder) {
    auto cfg = solver::make_bump_config(P, tmax, opts.dx, opts.margin);
    cfg.cfl_safety = opts.cfl;
    cfg.blowup_threshold = opts.blowup_threshold;
    const auto est = solver::estimate_lifespan(cfg, opts.refinements);
    if (est.observed) {
      rec.T_measured = est.T_est;
      rec.uncertainty = est.uncertainty;
      break;
    }
  }
  return rec;
}

// Sweep over data sizes, largest first; records come back in that order
// regardless of which worker finished when.
inline std::vector<SweepRecord> run_sweep(const ModelParams& base,
                                          std::vector<double> epsilons,
                                          const SweepOptions& opts) {
  if (epsilons.size() < 3) {
    throw config_error("sweep needs at least 3 epsilon values");
  }
  for (double e : epsilons) {
    if (!(e > 0.0)) throw config_error("epsilon values must be positive");
  }
  if (exponents::theta(base) <= 0.0) {
    throw outside_region_error("sweep parameters lie outside the blow-up region");
  }
  std::sort(epsilons.begin(), epsilons.end(), std::greater<double>());

  std::vector<SweepRecord> records(epsilons.size());
  const int workers =
      std::max(1, std::min<int>(opts.workers, static_cast<int>(epsilons.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= epsilons.size()) return;
      ModelParams P = base;
      P.epsilon = epsilons[i];
      records[i] = sweep_point(P, opts);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return records;
}

struct SweepReport {
  FitResult fit;
  double theoretical_slope = 0.0;  // -p(q-1)/theta
  double c_fit = 0.0;              // max T eps^{p(q-1)/theta} over records
  bool compliant = false;          // every T <= c_fit eps^{-p(q-1)/theta}
};

inline SweepReport analyze_sweep(const ModelParams& base,
                                 const std::vector<SweepRecord>& records) {
  const double th = exponents::theta(base);
  if (!(th > 0.0)) {
    throw outside_region_error("sweep parameters lie outside the blow-up region");
  }
  SweepReport rep;
  const double k = base.p * (base.q - 1.0) / th;
  rep.theoretical_slope = -k;
  rep.fit = fit_power_law(records);
  for (const auto& r : records) {
    if (r.T_measured.has_value()) {
      rep.c_fit = std::max(rep.c_fit, *r.T_measured * std::pow(r.epsilon, k));
    }
  }
  rep.compliant = true;
  for (const auto& r : records) {
    if (r.T_measured.has_value() &&
        !(*r.T_measured <= rep.c_fit * std::pow(r.epsilon, -k) * (1.0 + 1e-12))) {
      rep.compliant = false;
    }
  }
  return rep;
}

inline void write_sweep_csv(std::ostream& os,
                            const std::vector<SweepRecord>& records) {
  os << "epsilon,T_measured,T_bound,uncertainty\n";
  for (const auto& r : records) {
    os << format_double(r.epsilon) << ',';
    if (r.T_measured.has_value()) os << format_double(*r.T_measured);
    os << ',' << format_double(r.T_bound) << ',' << format_double(r.uncertainty)
       << '\n';
  }
}

inline void write_sweep_summary(std::ostream& os, const SweepReport& rep) {
  os << "# fitted_slope = " << format_double(rep.fit.slope) << '\n'
     << "# intercept = " << format_double(rep.fit.intercept) << '\n'
     << "# r_squared = " << format_double(rep.fit.r_squared) << '\n'
     << "# n_points = " << rep.fit.n_points << '\n'
     << "# theoretical_slope = " << format_double(rep.theoretical_slope) << '\n'
     << "# c_fit = " << format_double(rep.c_fit) << '\n'
     << "# compliant = " << (rep.compliant ? "true" : "false") << '\n';
}

inline std::vector<SweepRecord> read_sweep_csv(std::istream& is) {
  std::vector<SweepRecord> out;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    SweepRecord r;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    while (cells.size() < 4) cells.emplace_back();
    if (cells.size() != 4) throw config_error("malformed sweep CSV row");
    r.epsilon = std::strtod(cells[0].c_str(), nullptr);
    if (!cells[1].empty()) r.T_measured = std::strtod(cells[1].c_str(), nullptr);
    r.T_bound = std::strtod(cells[2].c_str(), nullptr);
    r.uncertainty = std::strtod(cells[3].c_str(), nullptr);
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Region figure

inline void write_region_plot_csv(std::ostream& os, int n, double ell,
                                  double p_lo, double p_hi, int count) {
  const auto pts = exponents::region_boundary_samples(n, ell, p_lo, p_hi, count);
  os << "kind,label,p,q\n";
  auto row = [&os](const std::string& kind, const std::string& label, double p,
                   double q) {
    os << kind << ',' << label << ',';
    if (std::isfinite(p)) os << format_double(p);
    os << ',';
    if (std::isfinite(q)) os << format_double(q);
    os << '\n';
  };
  for (const auto& r : pts) row(r.kind, r.label, r.p, r.q);

  const double m = (ell + 1.0) * n;
  if (n >= 2) {
    row("refline", "q=p0", std::numeric_limits<double>::quiet_NaN(),
        exponents::p0(n, ell));
    row("refline", "p=p1", exponents::p1(n, ell),
        std::numeric_limits<double>::quiet_NaN());
  } else if (m > 1.0) {
    const auto fam = exponents::family_exponents(m);
    row("refline", "q=p_kat", std::numeric_limits<double>::quiet_NaN(),
        fam.p_kat);
    row("refline", "p=p_gla", fam.p_gla,
        std::numeric_limits<double>::quiet_NaN());
  }

  if (n == 1) {
    if (ell <= 2.0) {
      row("note", "full-plane coverage: every p,q > 1 lies in the region",
          std::numeric_limits<double>::quiet_NaN(),
          std::numeric_limits<double>::quiet_NaN());
    } else if (ell <= 4.0) {
      row("note", "complement covered by the derivative range p <= p_gla",
          std::numeric_limits<double>::quiet_NaN(),
          std::numeric_limits<double>::quiet_NaN());
    } else {
      row("note", "gap strip between p_gla and the asymptote is unresolved",
          std::numeric_limits<double>::quiet_NaN(),
          std::numeric_limits<double>::quiet_NaN());
      // Polygon of the uncovered strip: boundary curve from p_gla to the
      // asymptote, closed along a horizontal cap.
      const double pg = exponents::family_exponents(ell + 1.0).p_gla;
      const double p_star = 2.0 - 2.0 / ell;
      const double q_hi =
          std::max(p_hi, exponents::boundary_q(pg, 1, ell) + 1.0);
      const int segs = 32;
      for (int k = 0; k <= segs; ++k) {
        const double p = pg + (p_star - pg) * k / (segs + 1);
        row("gap_vertex", "", p,
            std::min(exponents::boundary_q(p, 1, ell), q_hi));
      }
      row("gap_vertex", "", p_star, q_hi);
      row("gap_vertex", "", pg, q_hi);
    }
  }
}

// ---------------------------------------------------------------------------
// Classification and exponent reports

inline void write_classify_report(std::ostream& os, const ModelParams& P) {
  const auto v = exponents::classify(P);
  os << "in_gamma: " << (v.in_gamma ? "true" : "false") << '\n';
  os << "theta: " << format_double(exponents::theta(P)) << '\n';
  os << "applicable:";
  for (auto f : v.applicable_results) os << ' ' << exponents::flag_name(f);
  os << '\n';
  os << "lifespan_kind: " << exponents::bound_kind_name(v.lifespan_bound.kind)
     << '\n';
  os << "lifespan_exponent: " << format_double(v.lifespan_bound.exponent)
     << '\n';
  os << "notes: " << v.notes << '\n';
}

inline void write_exponents_csv(std::ostream& os, int n, double ell) {
  if (n < 1) throw domain_error("dimension n must be >= 1");
  if (!(std::isfinite(ell) && ell >= 0.0)) throw domain_error("ell must be >= 0");
  const double m = (ell + 1.0) * n;
  os << "name,value\n";
  os << "m," << format_double(m) << '\n';
  if (m > 1.0) {
    os << "p1," << format_double(exponents::p1(n, ell)) << '\n';
    const auto fam = exponents::family_exponents(m);
    os << "p_gla," << format_double(fam.p_gla) << '\n';
    os << "p_kat," << format_double(fam.p_kat) << '\n';
    os << "p_conf," << format_double(fam.p_conf) << '\n';
  }
  if (n >= 2) {
    os << "p0," << format_double(exponents::p0(n, ell)) << '\n';
    os << "p_diag," << format_double(exponents::p_diag(n, ell)) << '\n';
    os << "p_tilde0," << format_double(exponents::p_tilde0(n, ell)) << '\n';
    os << "p_tilde1," << format_double(exponents::p_tilde1(n, ell)) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Simulation CSV

inline void write_sim_csv(std::ostream& os, const solver::SimResult& res) {
  os << "t,U,U0,U1,support_radius,max_abs_u\n";
  for (std::size_t k = 0; k < res.times.size(); ++k) {
    os << format_double(res.times[k]) << ',' << format_double(res.U_series[k])
       << ',' << format_double(res.U0_series[k]) << ','
       << format_double(res.U1_series[k]) << ','
       << format_double(res.support_radius_series[k]) << ','
       << format_double(res.max_abs_series[k]) << '\n';
  }
  if (res.blowup_time.has_value()) {
    os << "# blowup_time = " << format_double(*res.blowup_time) << '\n';
    os << "# blowup_reason = "
       << (res.blowup_reason == solver::BlowupReason::nan ? "nan" : "threshold")
       << '\n';
  }
  os << "# duhamel_max_rel = "
     << format_double(res.identity_residuals.duhamel_max_rel) << '\n';
  os << "# u1u0_max_rel = "
     << format_double(res.identity_residuals.u1u0_max_rel) << '\n';
}

// ---------------------------------------------------------------------------
// Iteration report

struct IterateRow {
  int j = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double log_c = 0.0;
  double log_env = 0.0;  // NaN when t_probe <= 2 t0
};

struct IterateReport {
  std::vector<IterateRow> rows;
  int j0 = 0;
  double divergence_time = 0.0;
  double closed_form_max_rel_delta = 0.0;
};

inline IterateReport iterate_table(const ModelParams& P,
                                   iteration::SeedVariant variant, int jmax,
                                   double t_probe, double t0 = 1.0,
                                   double calibration = 1.0,
                                   double frame_constant = 1.0) {
  if (jmax < 0) throw config_error("jmax must be >= 0");
  const auto s = iteration::seed(P, variant, t0, calibration);
  auto st = iteration::initial_state(s, P, frame_constant);
  const double a = st.a;

  IterateReport rep;
  rep.j0 = iteration::j0_threshold(frame_constant, s.beta0, P.q);
  rep.divergence_time = iteration::lifespan_upper_bound(P, s, frame_constant);
  for (int j = 0; j <= jmax; ++j) {
    IterateRow row;
    row.j = j;
    row.alpha = st.alpha;
    row.beta = st.beta;
    row.log_c = st.log_c;
    row.log_env = t_probe > 2.0 * t0
                      ? iteration::log_envelope(t_probe, st, t0)
                      : std::numeric_limits<double>::quiet_NaN();
    rep.rows.push_back(row);

    const auto [ca, cb] = iteration::closed_forms(s, a, P.q, j);
    const double da = std::abs(st.alpha - ca) / std::max(1.0, std::abs(ca));
    const double db = std::abs(st.beta - cb) / std::max(1.0, std::abs(cb));
    rep.closed_form_max_rel_delta =
        std::max({rep.closed_form_max_rel_delta, da, db});

    st = iteration::recursion_step(st, P.q);
  }
  return rep;
}

inline void write_iterate_csv(std::ostream& os, const IterateReport& rep) {
  os << "j,alpha_j,beta_j,log_c_j,log_envelope\n";
  for (const auto& r : rep.rows) {
    os << r.j << ',' << format_double(r.alpha) << ',' << format_double(r.beta)
       << ',' << format_double(r.log_c) << ',';
    if (std::isfinite(r.log_env)) os << format_double(r.log_env);
    os << '\n';
  }
  os << "# j0 = " << rep.j0 << '\n';
  os << "# divergence_time = " << format_double(rep.divergence_time) << '\n';
  os << "# closed_form_max_rel_delta = "
     << format_double(rep.closed_form_max_rel_delta) << '\n';
}

// ---------------------------------------------------------------------------
// Flat key=value configuration files

inline std::map<std::string, std::string> parse_config(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw config_error("config line " + std::to_string(lineno) +
                         " is not key=value");
    }
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

}  // namespace tricomi::harness
