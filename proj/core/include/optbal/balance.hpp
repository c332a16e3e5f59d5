#pragma once

#include <optional>
#include <string>
#include <vector>

#include "optbal/integrate.hpp"
#include "optbal/potential.hpp"
#include "optbal/ramp.hpp"
#include "optbal/state.hpp"

namespace optbal {

enum class Solver { shooting, nudging };
enum class JacobianUpdate { finite_difference, broyden };

std::string to_string(Solver s);
Solver parse_solver(const std::string& name);

/// One optimal-balance boundary value problem:
///   dq = p, dp = Jp - eps rho(t/T) grad V(q) on [0, T], T = a / eps,
///   p(0) = 0, q(T) = q*.
struct BalanceProblem {
  Vec q_star;
  double eps = 1e-2;
  RampSpec ramp = RampSpec::exponential();
  double slow_horizon = 2.0;  // a
  Potential potential = Potential::quartic_aniso();
  Solver solver = Solver::shooting;
  double tol = 1e-10;
  int max_iterations = 50;
  IntegratorConfig integrator = IntegratorConfig::calibrated();
  JacobianUpdate jacobian = JacobianUpdate::finite_difference;
  // Extra Newton steps after reaching tol; each is kept only if it lowers the residual.
  int polish_steps = 1;
  // Nudging under-relaxation in (0, 1].
  double relaxation = 1.0;
  bool keep_trajectory = false;

  double ramp_time() const { return slow_horizon / eps; }
  /// ConfigError on any inconsistent field.
  void validate() const;
};

struct BalanceResult {
  Vec p_star;
  Vec q0;
  // Shooting: |q(T) - q*|. Nudging: last sweep-to-sweep change scaled by
  // 1 / (1 - observed contraction rate).
  double residual = 0.0;
  // |q(T) - q*| of the trajectory that produced p_star.
  double boundary_residual = 0.0;
  int iterations = 0;
  // Step size actually used.
  double dt = 0.0;
  std::vector<double> history;
  std::optional<Trajectory> trajectory;
};

/// With integrator.auto_tol > 0: a copy whose dt comes from calibrate_step on
/// the ramped system from (q*, 0) over [0, T], auto_tol cleared. Otherwise prob.
BalanceProblem with_calibrated_step(const BalanceProblem& prob);

/// Start guess for q(0): the leading-order ramped slow flow
/// dq/dtau = -rho(tau/a) J grad V(q), run backward from q* at tau = a to 0.
Vec initial_guess(const Vec& q_star, const BalanceProblem& prob);

/// Simple shooting on q(0) with p(0) = 0 held fixed.
BalanceResult shoot(const BalanceProblem& prob);

/// Back-and-forth nudging: forward sweep, reset q(T) = q*, backward sweep,
/// reset p(0) = 0, repeat.
BalanceResult nudge(const BalanceProblem& prob);

/// Dispatches on prob.solver.
BalanceResult solve_balance(const BalanceProblem& prob);

}  // namespace optbal
