#pragma once

#include <stdexcept>
#include <string>

namespace tricomi {

// Base class for everything this library throws on purpose.
struct error : std::runtime_error {
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad mathematical input (argument outside the function's domain).
struct domain_error : error {
  explicit domain_error(const std::string& msg) : error(msg) {}
};

// Requested Bessel order outside the supported band.
struct unsupported_order_error : domain_error {
  explicit unsupported_order_error(const std::string& msg) : domain_error(msg) {}
};

// Gamma evaluated at a non-positive integer.
struct pole_error : domain_error {
  explicit pole_error(const std::string& msg) : domain_error(msg) {}
};

// Data profiles that are identically zero (the functional I is undefined as
// a blow-up driver for them).
struct degenerate_data_error : domain_error {
  explicit degenerate_data_error(const std::string& msg) : domain_error(msg) {}
};

// Inconsistent run configuration (domain too small, bad grid, ...).
struct config_error : domain_error {
  explicit config_error(const std::string& msg) : domain_error(msg) {}
};

// Classification found no applicable blow-up result.
struct no_bound_error : domain_error {
  explicit no_bound_error(const std::string& msg) : domain_error(msg) {}
};

// Operation invoked outside its validity range (e.g. j < j0).
struct not_applicable_error : domain_error {
  explicit not_applicable_error(const std::string& msg) : domain_error(msg) {}
};

// Boundary curve evaluated on its vertical asymptote (n = 1 cases).
struct asymptote_error : domain_error {
  explicit asymptote_error(const std::string& msg) : domain_error(msg) {}
};

// Iteration/lifespan machinery invoked with theta <= 0.
struct outside_region_error : domain_error {
  explicit outside_region_error(const std::string& msg) : domain_error(msg) {}
};

// Least-squares fit on degenerate abscissae.
struct fit_error : error {
  explicit fit_error(const std::string& msg) : error(msg) {}
};

// Too few measurements to aggregate (CLI exit code 3).
struct insufficient_data_error : error {
  explicit insufficient_data_error(const std::string& msg) : error(msg) {}
};

}  // namespace tricomi
