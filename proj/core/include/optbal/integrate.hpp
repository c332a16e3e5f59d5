#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "optbal/potential.hpp"
#include "optbal/ramp.hpp"
#include "optbal/slow_field.hpp"
#include "optbal/state.hpp"

namespace optbal {

enum class Scheme { splitting, rk4 };
enum class Direction { forward, backward };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& name);

struct IntegratorConfig {
  Scheme scheme = Scheme::splitting;
  double dt = 1e-2;
  Direction direction = Direction::forward;
  // Record every stride-th step; 0 records only the two endpoints.
  std::int64_t sample_stride = 0;
  std::int64_t max_steps = 10'000'000;
  // > 0: callers that support it replace dt by calibrate_step(..., auto_tol).
  double auto_tol = 0.0;

  /// ConfigError unless 0 < dt <= 0.1, max_steps > 0 and auto_tol >= 0.
  void validate() const;

  /// dt left to calibration at tolerance tol.
  static IntegratorConfig calibrated(Scheme scheme = Scheme::rk4, double tol = 1e-10) {
    IntegratorConfig c{scheme, 0.1};
    c.auto_tol = tol;
    return c;
  }
};

/// A vector field in fast time t, possibly non-autonomous.
class System {
 public:
  enum class Kind { full, ramped, slow_G, ramped_F };

  /// dq = p, dp = Jp - eps grad V(q).
  static System full(Potential V, SmallParam eps);
  /// dq = p, dp = Jp - eps rho(t/T) grad V(q) on [0, T].
  static System ramped(Potential V, SmallParam eps, RampSpec ramp, double ramp_time);
  /// dq = G_n(q); p is slaved to G_n(q).
  static System slow_G(Potential V, SmallParam eps, int order);
  /// dq = eps F_n(q, eps t) on slow horizon a = eps T; p slaved to eps F_n.
  static System ramped_F(Potential V, SmallParam eps, RampSpec ramp, double slow_horizon,
                         int order);

  Kind kind() const noexcept { return kind_; }
  std::string id() const;
  const Potential& potential() const noexcept { return *V_; }
  double eps() const noexcept { return eps_; }
  const RampSpec& ramp() const noexcept { return ramp_; }
  double ramp_time() const noexcept { return ramp_time_; }
  int order() const noexcept { return order_; }
  bool has_rotation() const noexcept { return kind_ == Kind::full || kind_ == Kind::ramped; }

  /// Weight w(t) in dp = Jp - w(t) grad V for the rotating systems.
  double potential_weight(double t) const;
  /// Time derivative of the state at time t.
  State rhs(const State& s, double t) const;
  /// Re-slaves p to q for the slow systems; no-op otherwise.
  void slave_momentum(State& s, double t) const;

 private:
  System(Kind k, Potential V, double eps, RampSpec ramp, double ramp_time, int order);

  Kind kind_;
  std::shared_ptr<const Potential> V_;
  std::shared_ptr<const SlowField> field_;
  double eps_;
  RampSpec ramp_;
  double ramp_time_;
  int order_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  Scheme scheme = Scheme::splitting;
  double dt = 0.0;
  std::string system_id;

  const State& back() const { return states.back(); }
};

/// exp(Jt) p: simultaneous rotations of the planes (p_i, p_{d+i}).
Vec rotate_exact(std::span<const double> p, double t);

/// Exact flow of dq = p, dp = Jp over time h, in place.
void linear_flow(State& s, double h);

/// One step from time t to t_next (h = t_next - t, either sign).
State step(const State& s, double t, double t_next, Scheme scheme, const System& system);

/// Integrates from t0 to t1; the last step is shortened so t1 is hit exactly.
Trajectory integrate(const State& s0, double t0, double t1, const IntegratorConfig& cfg,
                     const System& system);

/// Endpoint only.
State propagate(const State& s0, double t0, double t1, const IntegratorConfig& cfg,
                const System& system);

/// Largest dt = 0.1 / 2^j (dt >= dt_min) whose endpoint over [t0, t1] moves by
/// at most tol when the step is halved. CapabilityError if none qualifies.
double calibrate_step(const State& s0, double t0, double t1, Scheme scheme, const System& system,
                      double tol = 1e-10, double dt_min = 1e-4);

}  // namespace optbal
