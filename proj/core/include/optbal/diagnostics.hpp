#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "optbal/balance.hpp"

namespace optbal {

/// One point of an imbalance sweep. status is "ok" or "failed:<reason>";
/// failed records carry NaN in the fields that could not be computed.
struct ImbalanceRecord {
  double eps = 0.0;
  std::string ramp;
  double slow_horizon = 0.0;
  double t1_slow = 0.0;
  double imbalance = 0.0;
  double residual_initial = 0.0;
  double residual_rebalance = 0.0;
  int iters_initial = 0;
  int iters_rebalance = 0;
  std::string status = "ok";

  bool ok() const noexcept { return status == "ok"; }
};

/// Largest step <= dt dividing t1, provided it also divides ramp_time
/// (as when a / t1_slow is an integer); otherwise ramp_time / ceil(ramp_time / dt).
/// A shared step keeps the discrete slow manifold identical across the
/// balance and evolution phases.
double commensurate_step(double dt, double t1, double ramp_time);

/// Balance at q*, run the full system for t1 = t1_slow / eps, rebalance at
/// q(t1), and report I = |p(t1) - p1*| / eps. Both solves share prob's
/// settings (prob.q_star is ignored in favor of q_star). With
/// integrator.auto_tol > 0 the step is calibrated once at q*, then made
/// commensurate; both solves and the free run use it.
ImbalanceRecord diagnosed_imbalance(const Vec& q_star, const BalanceProblem& prob,
                                    double t1_slow = 0.5);

/// One record per eps (order preserved); per-record failures are embedded.
/// eps_list must be positive and strictly descending. workers = 0 picks the
/// hardware concurrency.
std::vector<ImbalanceRecord> sweep(const std::vector<double>& eps_list, const Vec& q_star,
                                   const BalanceProblem& prob_template, double t1_slow = 0.5,
                                   unsigned workers = 1);

/// n log-spaced values from hi down to lo (inclusive).
std::vector<double> log_spaced_descending(double lo, double hi, int n);

struct FitWindow {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double eps) const noexcept { return eps >= lo && eps <= hi; }
  static FitWindow all() { return {0.0, 1.0}; }
};

struct FitResult {
  enum class Model { algebraic_slope, exponential_alpha };
  Model model = Model::algebraic_slope;
  double slope = 0.0;      // raw least-squares slope
  double intercept = 0.0;  // raw least-squares intercept
  double alpha = 0.0;      // exponential model: -slope
  double log_c = 0.0;      // exponential model: intercept
  double d = 1.0;
  FitWindow window;
  int points = 0;
  double residual_norm = 0.0;
  // Exponential model: alpha refitted at other d values, (d, alpha).
  std::vector<std::pair<double, double>> d_sensitivity;
};

/// Least-squares line y = intercept + slope x. At least two points.
std::pair<double, double> least_squares_line(const std::vector<double>& x,
                                             const std::vector<double>& y,
                                             double* residual_norm = nullptr);

/// Slope of ln I against ln eps over the ok records inside the window.
/// DomainError on fewer than 4 points or any I <= 0 in the window.
FitResult fit_order(const std::vector<ImbalanceRecord>& records,
                    FitWindow window = FitWindow::all());

/// ln(ln d - ln I) = ln c - alpha ln eps. DomainError if any I >= d in the window.
FitResult fit_alpha(const std::vector<ImbalanceRecord>& records, FitWindow window,
                    double d = 1.0);

/// Second divided differences of ln I against ln eps at interior points.
std::vector<double> log_log_curvature(const std::vector<ImbalanceRecord>& records);

struct SlowTrackingConfig {
  Potential potential = Potential::quartic_aniso();
  Vec q0{1.0, 0.5};
  double slow_horizon = 1.0;
  int order = 0;
  IntegratorConfig integrator{Scheme::rk4, 1e-2};
};

struct SlowTrackingPoint {
  double eps = 0.0;
  double sup_error = 0.0;
};

struct SlowTrackingResult {
  std::vector<SlowTrackingPoint> points;
  double slope = 0.0;
  double expected_slope = 0.0;
};

/// Full system from (q0, G_n(q0)) against dq/dt = G_n(q) from q0; sup-norm of
/// the q difference over [0, a/eps] and its log-log slope in eps.
SlowTrackingResult verify_slow_tracking(const std::vector<double>& eps_list, const SlowTrackingConfig& cfg);

/// Sup over [0, a/eps] of |q_full - q_slow| for one eps.
double slow_tracking_error(double eps, const SlowTrackingConfig& cfg);

struct DriftReport {
  std::vector<double> times;
  // eps^-1 |p(t) + eps J grad V(q(t))| along the free run.
  std::vector<double> deviation;
  double initial = 0.0;
  double maximum = 0.0;
};

/// Balances at prob.q_star, then runs the full system for slow time
/// slow_duration, sampling the leading-order balance deviation.
DriftReport balance_drift(const BalanceProblem& prob, double slow_duration,
                          double sample_slow = 0.01);

}  // namespace optbal
