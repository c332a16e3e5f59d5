#include "optbal/balance.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "optbal/error.hpp"

namespace optbal {

namespace {

Eigen::VectorXd as_eigen(const Vec& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vec as_vec(const Eigen::VectorXd& v) { return Vec(v.data(), v.data() + v.size()); }

class ShootingMap {
 public:
  explicit ShootingMap(const BalanceProblem& prob)
      : prob_(prob),
        system_(System::ramped(prob.potential, SmallParam(prob.eps), prob.ramp, prob.ramp_time())) {
    cfg_ = prob.integrator;
    cfg_.direction = Direction::forward;
    cfg_.sample_stride = 0;
  }

  State endpoint(const Vec& q0) const {
    State s(q0, Vec(q0.size(), 0.0));
    return propagate(s, 0.0, prob_.ramp_time(), cfg_, system_);
  }

  Trajectory trajectory(const Vec& q0) const {
    State s(q0, Vec(q0.size(), 0.0));
    return integrate(s, 0.0, prob_.ramp_time(), prob_.integrator, system_);
  }

  Eigen::VectorXd residual(const State& end) const {
    return as_eigen(end.q) - as_eigen(prob_.q_star);
  }

  const System& system() const { return system_; }

 private:
  const BalanceProblem& prob_;
  System system_;
  IntegratorConfig cfg_;
};

}  // namespace

std::string to_string(Solver s) { return s == Solver::shooting ? "shooting" : "nudging"; }

Solver parse_solver(const std::string& name) {
  if (name == "shooting") return Solver::shooting;
  if (name == "nudging") return Solver::nudging;
  throw ConfigError("unknown solver '" + name + "' (expected shooting or nudging)");
}

void BalanceProblem::validate() const {
  (void)SmallParam(eps);
  if (q_star.size() != potential.dim()) {
    throw ConfigError("balance: q* has length " + std::to_string(q_star.size()) +
                      ", potential expects " + std::to_string(potential.dim()));
  }
  if (!all_finite(q_star)) throw ConfigError("balance: q* must be finite");
  if (!(slow_horizon > 0.0) || !std::isfinite(slow_horizon)) {
    throw ConfigError("balance: slow horizon a must be positive");
  }
  if (!(tol > 0.0)) throw ConfigError("balance: tolerance must be positive");
  if (max_iterations < 1) throw ConfigError("balance: max iterations must be at least 1");
  if (polish_steps < 0) throw ConfigError("balance: polish steps must be non-negative");
  if (!(relaxation > 0.0 && relaxation <= 1.0)) {
    throw ConfigError("balance: relaxation must lie in (0, 1]");
  }
  if (ramp.family() == RampSpec::Family::unit) {
    throw ConfigError("balance: the unit ramp is not a homotopy");
  }
  integrator.validate();
}

BalanceProblem with_calibrated_step(const BalanceProblem& prob) {
  if (!(prob.integrator.auto_tol > 0.0)) return prob;
  prob.validate();
  BalanceProblem out = prob;
  const System sys =
      System::ramped(prob.potential, SmallParam(prob.eps), prob.ramp, prob.ramp_time());
  out.integrator.dt = calibrate_step(State(prob.q_star, Vec(prob.q_star.size(), 0.0)), 0.0,
                                     prob.ramp_time(), prob.integrator.scheme, sys,
                                     prob.integrator.auto_tol);
  out.integrator.auto_tol = 0.0;
  return out;
}

Vec initial_guess(const Vec& q_star, const BalanceProblem& prob) {
  const Potential& V = prob.potential;
  const double a = prob.slow_horizon;
  const int n = std::max(200, static_cast<int>(std::ceil(a * 1000.0)));
  const double h = -a / n;
  auto field = [&](const Vec& q, double tau) {
    Vec g = V.gradient(q);
    Vec out = apply_J(g);
    const double w = -ramp_eval(prob.ramp, std::clamp(tau / a, 0.0, 1.0));
    for (double& x : out) x *= w;
    return out;
  };
  auto shifted = [](const Vec& q, double s, const Vec& k) {
    Vec out = q;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * k[i];
    return out;
  };
  Vec q = q_star;
  for (int i = 0; i < n; ++i) {
    const double tau = a + i * h;
    const double tau_next = (i + 1 == n) ? 0.0 : a + (i + 1) * h;
    const Vec k1 = field(q, tau);
    const Vec k2 = field(shifted(q, 0.5 * h, k1), tau + 0.5 * h);
    const Vec k3 = field(shifted(q, 0.5 * h, k2), tau + 0.5 * h);
    const Vec k4 = field(shifted(q, h, k3), tau_next);
    for (std::size_t c = 0; c < q.size(); ++c) {
      q[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    }
    if (!all_finite(q)) throw IntegrationFailure("initial guess flow diverged", tau_next);
  }
  return q;
}

BalanceResult shoot(const BalanceProblem& problem) {
  const BalanceProblem prob = with_calibrated_step(problem);
  prob.validate();
  const ShootingMap map(prob);
  const auto n = static_cast<Eigen::Index>(prob.q_star.size());

  Eigen::VectorXd q0 = as_eigen(initial_guess(prob.q_star, prob));
  State end = map.endpoint(as_vec(q0));
  Eigen::VectorXd r = map.residual(end);
  double res = r.norm();
  int iterations = 1;
  int polish_left = prob.polish_steps;
  bool converged = res <= prob.tol;

  Eigen::MatrixXd jac(n, n);
  bool jac_fresh = false;
  auto refresh_jacobian = [&] {
    const double h = 1e-7 * (1.0 + q0.norm());
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::VectorXd qp = q0;
      qp[j] += h;
      jac.col(j) = (map.residual(map.endpoint(as_vec(qp))) - r) / h;
    }
    jac_fresh = true;
  };

  std::vector<double> history{res};
  while (!(converged && polish_left == 0)) {
    if (converged) --polish_left;
    if (!converged && iterations >= prob.max_iterations) break;
    if (!jac_fresh || prob.jacobian == JacobianUpdate::finite_difference) refresh_jacobian();
    const Eigen::VectorXd delta = jac.partialPivLu().solve(-r);
    if (!delta.allFinite()) {
      throw SolverFailure("shooting: singular Jacobian", res, iterations);
    }
    // Backtracking on the residual norm.
    double lambda = 1.0;
    bool accepted = false;
    Eigen::VectorXd q_try;
    State end_try;
    Eigen::VectorXd r_try;
    for (int bt = 0; bt < 12; ++bt) {
      q_try = q0 + lambda * delta;
      try {
        end_try = map.endpoint(as_vec(q_try));
        r_try = map.residual(end_try);
        if (r_try.norm() < res) {
          accepted = true;
          break;
        }
      } catch (const IntegrationFailure&) {
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      if (converged) break;  // polishing could not improve further
      if (prob.jacobian == JacobianUpdate::broyden && jac_fresh) {
        jac_fresh = false;  // retry once with a finite-difference Jacobian
        continue;
      }
      throw SolverFailure("shooting: no descent along the Newton direction", res, iterations);
    }
    if (prob.jacobian == JacobianUpdate::broyden) {
      const Eigen::VectorXd s = q_try - q0;
      const Eigen::VectorXd y = r_try - r;
      const double ss = s.squaredNorm();
      if (ss > 0.0) jac += (y - jac * s) * s.transpose() / ss;
    }
    q0 = q_try;
    end = end_try;
    r = r_try;
    res = r.norm();
    history.push_back(res);
    if (!converged) ++iterations;
    converged = converged || res <= prob.tol;
  }
  if (!converged) {
    std::ostringstream os;
    os << "shooting did not converge in " << prob.max_iterations << " iterations (residual "
       << res << ")";
    throw SolverFailure(os.str(), res, iterations);
  }

  BalanceResult out;
  out.q0 = as_vec(q0);
  out.p_star = end.p;
  out.residual = res;
  out.boundary_residual = res;
  out.iterations = iterations;
  out.dt = prob.integrator.dt;
  out.history = std::move(history);
  if (prob.keep_trajectory) out.trajectory = map.trajectory(out.q0);
  return out;
}

BalanceResult nudge(const BalanceProblem& problem) {
  const BalanceProblem prob = with_calibrated_step(problem);
  prob.validate();
  const System sys =
      System::ramped(prob.potential, SmallParam(prob.eps), prob.ramp, prob.ramp_time());
  IntegratorConfig fwd = prob.integrator;
  fwd.direction = Direction::forward;
  fwd.sample_stride = 0;
  IntegratorConfig bwd = fwd;
  bwd.direction = Direction::backward;
  const double T = prob.ramp_time();
  const std::size_t n = prob.q_star.size();

  Vec q0 = initial_guess(prob.q_star, prob);
  Vec p_prev;
  std::vector<double> history;
  for (int sweep = 1; sweep <= prob.max_iterations; ++sweep) {
    const State end = propagate(State(q0, Vec(n, 0.0)), 0.0, T, fwd, sys);
    const double boundary = distance(end.q, prob.q_star);
    const State start = propagate(State(prob.q_star, end.p), T, 0.0, bwd, sys);
    Vec q_next = q0;
    for (std::size_t i = 0; i < n; ++i) q_next[i] += prob.relaxation * (start.q[i] - q0[i]);
    const double dq = distance(q_next, q0);
    const double change = dq + (p_prev.empty() ? boundary : distance(end.p, p_prev));
    // Remaining distance to the fixed point, from the observed contraction rate.
    double estimate = change;
    if (!history.empty() && history.back() > 0.0) {
      const double rate = change / history.back();
      estimate = rate < 1.0 ? change / (1.0 - rate) : change;
    }
    history.push_back(change);
    if (estimate <= prob.tol) {
      BalanceResult out;
      out.q0 = q0;
      out.p_star = end.p;
      out.residual = estimate;
      out.boundary_residual = boundary;
      out.iterations = sweep;
      out.dt = prob.integrator.dt;
      out.history = std::move(history);
      if (prob.keep_trajectory) {
        out.trajectory = integrate(State(q0, Vec(n, 0.0)), 0.0, T, prob.integrator, sys);
      }
      return out;
    }
    p_prev = end.p;
    q0 = std::move(q_next);
  }
  std::ostringstream os;
  os << "nudging did not converge in " << prob.max_iterations << " sweeps; changes:";
  const std::size_t first = history.size() > 8 ? history.size() - 8 : 0;
  for (std::size_t i = first; i < history.size(); ++i) os << ' ' << history[i];
  throw SolverFailure(os.str(), history.empty() ? 0.0 : history.back(),
                      static_cast<int>(history.size()));
}

BalanceResult solve_balance(const BalanceProblem& prob) {
  return prob.solver == Solver::shooting ? shoot(prob) : nudge(prob);
}

}  // namespace optbal
