#include "optbal/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "optbal/error.hpp"
#include "optbal/slow_field.hpp"

namespace optbal {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string failure_tag(const std::exception& e) {
  std::string what = e.what();
  std::replace(what.begin(), what.end(), ',', ';');
  std::replace(what.begin(), what.end(), '\n', ' ');
  return what;
}

std::vector<const ImbalanceRecord*> window_points(const std::vector<ImbalanceRecord>& records,
                                                  FitWindow window) {
  std::vector<const ImbalanceRecord*> out;
  for (const ImbalanceRecord& r : records) {
    if (r.ok() && window.contains(r.eps)) out.push_back(&r);
  }
  if (out.size() < 4) {
    throw DomainError("fit window [" + std::to_string(window.lo) + ", " +
                      std::to_string(window.hi) + "] holds " + std::to_string(out.size()) +
                      " usable points; at least 4 are required");
  }
  return out;
}

FitResult alpha_fit_at(const std::vector<const ImbalanceRecord*>& pts, FitWindow window,
                       double d) {
  std::vector<double> x;
  std::vector<double> y;
  const double ld = std::log(d);
  for (const ImbalanceRecord* r : pts) {
    if (!(r->imbalance > 0.0)) {
      throw DomainError("alpha fit: imbalance must be positive (eps = " + std::to_string(r->eps) +
                        ")");
    }
    if (r->imbalance >= d) {
      throw DomainError("alpha fit: imbalance " + std::to_string(r->imbalance) + " at eps = " +
                        std::to_string(r->eps) + " is not below d = " + std::to_string(d) +
                        "; choose a larger d");
    }
    x.push_back(std::log(r->eps));
    y.push_back(std::log(ld - std::log(r->imbalance)));
  }
  FitResult fit;
  fit.model = FitResult::Model::exponential_alpha;
  fit.d = d;
  fit.window = window;
  fit.points = static_cast<int>(pts.size());
  std::tie(fit.intercept, fit.slope) = least_squares_line(x, y, &fit.residual_norm);
  fit.alpha = -fit.slope;
  fit.log_c = fit.intercept;
  return fit;
}

}  // namespace

double commensurate_step(double dt, double t1, double ramp_time) {
  if (!(dt > 0.0) || !(t1 > 0.0) || !(ramp_time > 0.0)) {
    throw ConfigError("commensurate step: arguments must be positive");
  }
  // Fewest equal pieces of span no longer than dt.
  auto piece = [dt](double span) {
    auto m = static_cast<std::int64_t>(std::ceil(span / dt - 1e-9));
    if (span / static_cast<double>(m) > dt) ++m;
    return span / static_cast<double>(m);
  };
  const double h = piece(t1);
  const double ratio = ramp_time / h;
  if (std::abs(ratio - std::round(ratio)) <= 1e-6 * ratio) return h;
  // No common grid: equalize the ramp steps instead.
  return piece(ramp_time);
}

ImbalanceRecord diagnosed_imbalance(const Vec& q_star, const BalanceProblem& prob,
                                    double t1_slow) {
  if (!(t1_slow > 0.0)) throw ConfigError("t1_slow must be positive");
  ImbalanceRecord rec;
  rec.eps = prob.eps;
  rec.ramp = prob.ramp.name();
  rec.slow_horizon = prob.slow_horizon;
  rec.t1_slow = t1_slow;
  rec.imbalance = kNaN;
  rec.residual_initial = kNaN;
  rec.residual_rebalance = kNaN;

  BalanceProblem first = prob;
  first.q_star = q_star;
  first.keep_trajectory = false;
  BalanceResult initial;
  try {
    first = with_calibrated_step(first);
    first.integrator.dt =
        commensurate_step(first.integrator.dt, t1_slow / prob.eps, prob.ramp_time());
    initial = solve_balance(first);
  } catch (const Error& e) {
    rec.status = "failed:initial:" + failure_tag(e);
    return rec;
  }
  rec.residual_initial = initial.residual;
  rec.iters_initial = initial.iterations;

  State evolved;
  try {
    const System full = System::full(prob.potential, SmallParam(prob.eps));
    IntegratorConfig cfg = first.integrator;
    cfg.direction = Direction::forward;
    evolved = propagate(State(q_star, initial.p_star), 0.0, t1_slow / prob.eps, cfg, full);
  } catch (const Error& e) {
    rec.status = "failed:evolve:" + failure_tag(e);
    return rec;
  }

  BalanceProblem second = first;
  second.q_star = evolved.q;
  BalanceResult rebalanced;
  try {
    rebalanced = solve_balance(second);
  } catch (const Error& e) {
    rec.status = "failed:rebalance:" + failure_tag(e);
    return rec;
  }
  rec.residual_rebalance = rebalanced.residual;
  rec.iters_rebalance = rebalanced.iterations;
  rec.imbalance = distance(evolved.p, rebalanced.p_star) / prob.eps;
  return rec;
}

std::vector<ImbalanceRecord> sweep(const std::vector<double>& eps_list, const Vec& q_star,
                                   const BalanceProblem& prob_template, double t1_slow,
                                   unsigned workers) {
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    (void)SmallParam(eps_list[i]);
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) {
      throw ConfigError("sweep: eps list must be strictly descending");
    }
  }
  std::vector<ImbalanceRecord> out(eps_list.size());
  if (eps_list.empty()) return out;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(eps_list.size()));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < eps_list.size(); i = next++) {
      BalanceProblem prob = prob_template;
      prob.eps = eps_list[i];
      out[i] = diagnosed_imbalance(q_star, prob, t1_slow);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return out;
}

std::vector<double> log_spaced_descending(double lo, double hi, int n) {
  if (n < 0) throw ConfigError("grid size must be non-negative");
  if (n == 0) return {};
  if (!(lo > 0.0) || !(hi >= lo)) throw ConfigError("log grid needs 0 < lo <= hi");
  if (n == 1) return {hi};
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  const double a = std::log(hi);
  const double b = std::log(lo);
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      out.push_back(hi);
    } else if (i == n - 1) {
      out.push_back(lo);
    } else {
      out.push_back(std::exp(a + (b - a) * i / (n - 1)));
    }
  }
  return out;
}

std::pair<double, double> least_squares_line(const std::vector<double>& x,
                                             const std::vector<double>& y,
                                             double* residual_norm) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DomainError("least squares needs at least two paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("least squares: abscissae are all equal");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  if (residual_norm != nullptr) {
    double r = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - (intercept + slope * x[i]);
      r += e * e;
    }
    *residual_norm = std::sqrt(r);
  }
  return {intercept, slope};
}

FitResult fit_order(const std::vector<ImbalanceRecord>& records, FitWindow window) {
  const auto pts = window_points(records, window);
  std::vector<double> x;
  std::vector<double> y;
  for (const ImbalanceRecord* r : pts) {
    if (!(r->imbalance > 0.0)) {
      throw DomainError("order fit: imbalance must be positive (eps = " + std::to_string(r->eps) +
                        ")");
    }
    x.push_back(std::log(r->eps));
    y.push_back(std::log(r->imbalance));
  }
  FitResult fit;
  fit.model = FitResult::Model::algebraic_slope;
  fit.window = window;
  fit.points = static_cast<int>(pts.size());
  std::tie(fit.intercept, fit.slope) = least_squares_line(x, y, &fit.residual_norm);
  return fit;
}

FitResult fit_alpha(const std::vector<ImbalanceRecord>& records, FitWindow window, double d) {
  if (!(d > 0.0)) throw DomainError("alpha fit: d must be positive");
  const auto pts = window_points(records, window);
  FitResult fit = alpha_fit_at(pts, window, d);
  for (double factor : {0.1, 10.0, 100.0}) {
    try {
      const FitResult other = alpha_fit_at(pts, window, d * factor);
      fit.d_sensitivity.emplace_back(d * factor, other.alpha);
    } catch (const DomainError&) {
      // d * factor below some I: not a valid member of the family.
    }
  }
  return fit;
}

std::vector<double> log_log_curvature(const std::vector<ImbalanceRecord>& records) {
  std::vector<double> x;
  std::vector<double> y;
  for (const ImbalanceRecord& r : records) {
    if (!r.ok() || !(r.imbalance > 0.0)) continue;
    x.push_back(std::log(r.eps));
    y.push_back(std::log(r.imbalance));
  }
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    const double d1 = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
    const double d2 = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    out.push_back((d2 - d1) / (x[i + 1] - x[i - 1]) * 2.0);
  }
  return out;
}

double slow_tracking_error(double eps, const SlowTrackingConfig& cfg) {
  const SmallParam e(eps);
  if (cfg.order < 0 || cfg.order > kMaxSlowOrder) {
    throw CapabilityError("slow tracking: order out of range");
  }
  if (!(cfg.slow_horizon > 0.0)) throw ConfigError("slow tracking: horizon must be positive");
  const double horizon = cfg.slow_horizon / eps;
  const SlowField field(cfg.potential);
  const Vec p0 = field.G(cfg.order, cfg.q0, e);

  IntegratorConfig full_cfg = cfg.integrator;
  full_cfg.direction = Direction::forward;
  const auto ratio = static_cast<std::int64_t>(std::floor(0.1 / full_cfg.dt + 1e-9));
  const std::int64_t m = std::max<std::int64_t>(1, ratio);
  full_cfg.sample_stride = m;
  IntegratorConfig slow_cfg{Scheme::rk4, full_cfg.dt * static_cast<double>(m)};
  slow_cfg.sample_stride = 1;
  slow_cfg.max_steps = full_cfg.max_steps;

  const Trajectory full = integrate(State(cfg.q0, p0), 0.0, horizon, full_cfg,
                                    System::full(cfg.potential, e));
  const Trajectory slow = integrate(State(cfg.q0, p0), 0.0, horizon, slow_cfg,
                                    System::slow_G(cfg.potential, e, cfg.order));
  if (full.states.size() != slow.states.size()) {
    throw Error("slow tracking: sample grids of the full and slow runs differ");
  }
  double sup = 0.0;
  for (std::size_t i = 0; i < full.states.size(); ++i) {
    sup = std::max(sup, distance(full.states[i].q, slow.states[i].q));
  }
  return sup;
}

SlowTrackingResult verify_slow_tracking(const std::vector<double>& eps_list, const SlowTrackingConfig& cfg) {
  SlowTrackingResult result;
  result.expected_slope = cfg.order + 2;
  std::vector<double> x;
  std::vector<double> y;
  for (double eps : eps_list) {
    const double err = slow_tracking_error(eps, cfg);
    result.points.push_back({eps, err});
    if (err > 0.0) {
      x.push_back(std::log(eps));
      y.push_back(std::log(err));
    }
  }
  if (x.size() >= 2) result.slope = least_squares_line(x, y).second;
  return result;
}

DriftReport balance_drift(const BalanceProblem& prob, double slow_duration, double sample_slow) {
  if (!(slow_duration > 0.0) || !(sample_slow > 0.0)) {
    throw ConfigError("drift check: durations must be positive");
  }
  const BalanceResult bal = solve_balance(prob);
  const SmallParam eps(prob.eps);
  IntegratorConfig cfg = prob.integrator;
  cfg.direction = Direction::forward;
  cfg.sample_stride =
      std::max<std::int64_t>(1, std::llround(sample_slow / prob.eps / cfg.dt));
  const Trajectory traj = integrate(State(prob.q_star, bal.p_star), 0.0, slow_duration / eps,
                                    cfg, System::full(prob.potential, eps));
  DriftReport report;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const State& s = traj.states[i];
    const Vec jg = apply_J(prob.potential.gradient(s.q));
    Vec diff = s.p;
    for (std::size_t c = 0; c < diff.size(); ++c) diff[c] += eps * jg[c];
    const double dev = norm(diff) / eps;
    report.times.push_back(traj.times[i]);
    report.deviation.push_back(dev);
    report.maximum = std::max(report.maximum, dev);
  }
  report.initial = report.deviation.front();
  return report;
}

}  // namespace optbal
