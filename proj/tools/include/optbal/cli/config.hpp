#pragma once

#include <optional>
#include <string>
#include <vector>

#include "optbal/balance.hpp"
#include "optbal/diagnostics.hpp"
#include "optbal/error.hpp"

namespace optbal::cli {

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

enum class FitMode { order, alpha };

FitMode parse_fit_mode(const std::string& name);
std::string to_string(FitMode m);

struct FitSpec {
  FitMode mode = FitMode::order;
  FitWindow window = FitWindow::all();
  double d = 1.0;
};

struct TrackingSpec {
  std::vector<int> orders{0, 1};
  Vec q0{1.0, 0.5};
  double slow_horizon = 1.0;
  IntegratorConfig integrator{Scheme::rk4, 1e-2};
  std::vector<double> eps;  // descending
};

/// Everything a run needs. Parsed from JSON; unknown keys are errors.
///
/// Schema (all keys optional):
///   potential     {"kind": "quartic-aniso" | "harmonic" | "zero" | "custom",
///                  "d": int, "terms": [{"coefficient": x, "exponents": [..]}]}
///   ramps         ["algebraic:2", "exponential", ...]   (or "ramp": "...")
///   slow_horizon  number or list of numbers (a, T = a / eps)
///   eps           number, list, or {"lo": x, "hi": y, "count": n}
///   q_star        [..] of length 2d
///   t1_slow       number
///   solver        {"method", "tol", "max_iterations", "jacobian",
///                  "polish_steps", "relaxation"}
///   integrator    {"scheme", "dt", "auto_tol", "sample_stride", "max_steps"}
///                 dt is a number or "auto" (the default, rk4): halve from 0.1
///                 until the ramp endpoint moves by <= auto_tol (default 1e-10)
///   output        CSV path for sweep
///   workers       int, 0 = hardware concurrency
///   fit           {"mode": "order" | "alpha", "window": [lo, hi], "d": x}
///   tracking      {"orders": [..], "q0": [..], "slow_horizon": x,
///                  "integrator": {...}, "eps": ...}; dt must be numeric here
struct RunConfig {
  BalanceProblem problem;  // template; eps, ramp and slow_horizon vary per run
  std::vector<RampSpec> ramps{RampSpec::exponential()};
  std::vector<double> slow_horizons{2.0};
  std::vector<double> eps;  // strictly descending
  double t1_slow = 0.5;
  std::string output;
  unsigned workers = 0;
  std::optional<FitSpec> fit;
  TrackingSpec tracking;

  void validate() const;
};

/// ConfigError with the offending key on any schema violation.
RunConfig parse_config_text(const std::string& text);
/// IoError if the file cannot be read.
RunConfig load_config(const std::string& path);

}  // namespace optbal::cli
