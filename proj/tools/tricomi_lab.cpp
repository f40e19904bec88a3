// Command-line laboratory for the degenerate wave model: exponent tables,
// region classification and plots, single simulations, lifespan sweeps and
// the iteration-to-blowup report.
//
// Exit codes: 0 success, 2 domain/configuration error, 3 insufficient data.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tricomi/harness.hpp"

namespace {

struct Options {
  int n = 1;
  double ell = 0.0;
  double p = 2.0;
  double q = 2.0;
  std::vector<double> eps = {1.0};
  double radius = 1.0;
  int grid = 512;
  double tmax = 2.0;
  std::string out;
  std::string config_path;
  int workers = 1;

  double p_lo = 1.05;
  double p_hi = 6.0;
  int count = 400;
  double dx = 0.01;
  int refinements = 2;
  double cfl = 0.5;
  double threshold = 1e6;
  int stride = 1;
  bool linear_only = false;
  std::string variant = "derivative";
  int jmax = 10;
  double t_probe = 5.0;
  double t0 = 1.0;
  double calibration = 1.0;
  double frame_constant = 1.0;
  double margin = 0.5;
};

tricomi::exponents::ModelParams params_from(const Options& o) {
  tricomi::exponents::ModelParams P;
  P.n = o.n;
  P.ell = o.ell;
  P.p = o.p;
  P.q = o.q;
  P.epsilon = o.eps.empty() ? 1.0 : o.eps.front();
  P.R = o.radius;
  return P;
}

std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (!tok.empty()) out.push_back(std::strtod(tok.c_str(), nullptr));
  }
  return out;
}

void apply_config(Options& o, const std::map<std::string, std::string>& kv) {
  auto str = [&](const char* k) -> const std::string* {
    const auto it = kv.find(k);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto num = [&](const char* k, double& dst) {
    if (const auto* v = str(k)) dst = std::strtod(v->c_str(), nullptr);
  };
  auto integer = [&](const char* k, int& dst) {
    if (const auto* v = str(k)) dst = std::atoi(v->c_str());
  };
  integer("n", o.n);
  num("ell", o.ell);
  num("p", o.p);
  num("q", o.q);
  if (const auto* v = str("eps")) o.eps = split_doubles(*v);
  num("radius", o.radius);
  integer("grid", o.grid);
  num("tmax", o.tmax);
  if (const auto* v = str("out")) o.out = *v;
  integer("workers", o.workers);
  num("p_lo", o.p_lo);
  num("p_hi", o.p_hi);
  integer("count", o.count);
  num("dx", o.dx);
  integer("refinements", o.refinements);
  num("cfl", o.cfl);
  num("threshold", o.threshold);
  integer("stride", o.stride);
  if (const auto* v = str("linear_only")) {
    o.linear_only = (*v == "true" || *v == "1" || *v == "yes");
  }
  if (const auto* v = str("variant")) o.variant = *v;
  integer("jmax", o.jmax);
  num("t_probe", o.t_probe);
  num("t0", o.t0);
  num("calibration", o.calibration);
  num("frame_constant", o.frame_constant);
  num("margin", o.margin);
}

tricomi::iteration::SeedVariant parse_variant(const std::string& s) {
  if (s == "derivative") return tricomi::iteration::SeedVariant::derivative;
  if (s == "power") return tricomi::iteration::SeedVariant::power;
  if (s == "linear") return tricomi::iteration::SeedVariant::linear;
  throw tricomi::config_error("variant must be derivative, power or linear");
}

// Writes through to --out when given, stdout otherwise.
class OutputStream {
 public:
  explicit OutputStream(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) {
        throw tricomi::config_error("cannot open output file " + path);
      }
    }
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

}  // namespace

int main(int argc, char** argv) {
  using namespace tricomi;
  Options o;

  // Load config-file defaults first so command-line flags override them.
  try {
    for (int i = 1; i < argc; ++i) {
      const std::string a = argv[i];
      if (a == "--config" && i + 1 < argc) {
        o.config_path = argv[i + 1];
      } else if (a.rfind("--config=", 0) == 0) {
        o.config_path = a.substr(9);
      }
    }
    if (!o.config_path.empty()) {
      std::ifstream f(o.config_path);
      if (!f) throw config_error("cannot open config file " + o.config_path);
      apply_config(o, harness::parse_config(f));
    }
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  CLI::App app{"degenerate wave blow-up laboratory"};
  app.require_subcommand(1);

  auto add_model = [&o](CLI::App* sub) {
    sub->add_option("--n", o.n, "space dimension");
    sub->add_option("--ell", o.ell, "degeneracy exponent");
    sub->add_option("--p", o.p, "derivative nonlinearity exponent");
    sub->add_option("--q", o.q, "power nonlinearity exponent");
    sub->add_option("--eps", o.eps, "data size(s)");
    sub->add_option("--radius", o.radius, "data support radius");
    sub->add_option("--out", o.out, "output file (default stdout)");
    sub->add_option("--config", o.config_path, "flat key=value defaults file");
  };

  auto* c_classify = app.add_subcommand("classify", "classify a parameter point");
  add_model(c_classify);

  auto* c_expo = app.add_subcommand("exponents", "critical exponent table");
  add_model(c_expo);

  auto* c_region = app.add_subcommand("region-plot", "region figure as CSV");
  add_model(c_region);
  c_region->add_option("--p-lo", o.p_lo, "left edge of the p range");
  c_region->add_option("--p-hi", o.p_hi, "right edge of the p range");
  c_region->add_option("--count", o.count, "boundary sample count");

  auto* c_sim = app.add_subcommand("simulate", "run one simulation to CSV");
  add_model(c_sim);
  c_sim->add_option("--grid", o.grid, "radial grid points");
  c_sim->add_option("--tmax", o.tmax, "final time");
  c_sim->add_option("--cfl", o.cfl, "time step safety factor");
  c_sim->add_option("--threshold", o.threshold, "blow-up threshold");
  c_sim->add_option("--stride", o.stride, "output stride");
  c_sim->add_flag("--linear-only", o.linear_only, "drop the nonlinear source");
  c_sim->add_option("--margin", o.margin, "wall clearance beyond the cone");

  auto* c_sweep = app.add_subcommand("sweep", "lifespan sweep over data sizes");
  add_model(c_sweep);
  c_sweep->add_option("--dx", o.dx, "base grid spacing");
  c_sweep->add_option("--refinements", o.refinements, "grid doublings per point");
  c_sweep->add_option("--workers", o.workers, "parallel workers");
  c_sweep->add_option("--threshold", o.threshold, "blow-up threshold");
  c_sweep->add_option("--cfl", o.cfl, "time step safety factor");
  c_sweep->add_option("--margin", o.margin, "wall clearance beyond the cone");

  auto* c_iter = app.add_subcommand("iterate", "iteration table and bound");
  add_model(c_iter);
  c_iter->add_option("--variant", o.variant, "seed: derivative, power, linear");
  c_iter->add_option("--jmax", o.jmax, "last iteration index");
  c_iter->add_option("--t-probe", o.t_probe, "time for the envelope column");
  c_iter->add_option("--t0", o.t0, "envelope pivot time");
  c_iter->add_option("--calibration", o.calibration, "seed constant scale");
  c_iter->add_option("--frame-constant", o.frame_constant,
                     "recursion frame constant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    OutputStream out(o.out);
    std::ostream& os = out.get();

    if (app.got_subcommand(c_classify)) {
      harness::write_classify_report(os, params_from(o));
    } else if (app.got_subcommand(c_expo)) {
      harness::write_exponents_csv(os, o.n, o.ell);
    } else if (app.got_subcommand(c_region)) {
      harness::write_region_plot_csv(os, o.n, o.ell, o.p_lo, o.p_hi, o.count);
    } else if (app.got_subcommand(c_sim)) {
      const auto P = params_from(o);
      solver::SimConfig cfg;
      cfg.params = P;
      cfg.t_max = o.tmax;
      cfg.domain_radius =
          P.R + testfun::cone_offset(P.ell, o.tmax) + o.margin;
      cfg.grid_points = o.grid;
      cfg.cfl_safety = o.cfl;
      cfg.blowup_threshold = o.threshold;
      cfg.linear_only = o.linear_only;
      cfg.output_stride = o.stride;
      const double R = P.R;
      cfg.u0_fn = [R](double r) { return solver::bump_profile(r, R); };
      cfg.u1_fn = [R](double r) { return solver::bump_profile(r, R); };
      cfg.data = testfun::sample_data(cfg.u0_fn, cfg.u1_fn,
                                      static_cast<std::size_t>(cfg.grid_points),
                                      cfg.domain_radius, P.n);
      harness::write_sim_csv(os, solver::run(cfg));
    } else if (app.got_subcommand(c_sweep)) {
      if (o.eps.size() >= 2) {
        const auto [lo, hi] = std::minmax_element(o.eps.begin(), o.eps.end());
        if (*hi < 10.0 * *lo * (1.0 - 1e-12)) {
          throw config_error("sweep epsilon values must span at least a decade");
        }
      }
      harness::SweepOptions opts;
      opts.dx = o.dx;
      opts.refinements = o.refinements;
      opts.margin = o.margin;
      opts.blowup_threshold = o.threshold;
      opts.cfl = o.cfl;
      opts.workers = o.workers;
      const auto base = params_from(o);
      const auto records = harness::run_sweep(base, o.eps, opts);
      harness::write_sweep_csv(os, records);
      harness::write_sweep_summary(os, harness::analyze_sweep(base, records));
    } else if (app.got_subcommand(c_iter)) {
      harness::write_iterate_csv(
          os, harness::iterate_table(params_from(o), parse_variant(o.variant),
                                     o.jmax, o.t_probe, o.t0, o.calibration,
                                     o.frame_constant));
    }
  } catch (const insufficient_data_error& e) {
    std::cerr << "insufficient data: " << e.what() << '\n';
    return 3;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
