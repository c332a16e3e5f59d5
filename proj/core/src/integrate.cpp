#include "optbal/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "optbal/error.hpp"
#include "optbal/model.hpp"

namespace optbal {

namespace {

void axpy(double a, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

State combine(const State& s, double h, const State& k) {
  State out = s;
  axpy(h, k.q, out.q);
  axpy(h, k.p, out.p);
  return out;
}

// Increments (dq, dp) such that the step maps s to s + delta. Keeping the
// increment separate lets the driver accumulate it with compensated summation.
State rk4_increment(const State& s, double t, double t_next, const System& sys) {
  const double h = t_next - t;
  const double t_mid = t + 0.5 * h;
  const State k1 = sys.rhs(s, t);
  const State k2 = sys.rhs(combine(s, 0.5 * h, k1), t_mid);
  const State k3 = sys.rhs(combine(s, 0.5 * h, k2), t_mid);
  const State k4 = sys.rhs(combine(s, h, k3), t_next);
  State delta = k1;
  const double w = h / 6.0;
  for (std::size_t i = 0; i < delta.q.size(); ++i) {
    delta.q[i] = w * (k1.q[i] + 2.0 * k2.q[i] + 2.0 * k3.q[i] + k4.q[i]);
    delta.p[i] = w * (k1.p[i] + 2.0 * k2.p[i] + 2.0 * k3.p[i] + k4.p[i]);
  }
  return delta;
}

// Increment of the exact linear flow over h applied to (q, p).
void linear_increment(const Vec& p, double h, Vec& dq, Vec& dp) {
  const std::size_t d = p.size() / 2;
  const double s = std::sin(h);
  const double half = std::sin(0.5 * h);
  const double cm1 = -2.0 * half * half;
  for (std::size_t i = 0; i < d; ++i) {
    const double a = p[i];
    const double b = p[d + i];
    dq[i] += s * a - cm1 * b;
    dq[d + i] += cm1 * a + s * b;
    dp[i] += cm1 * a + s * b;
    dp[d + i] += -s * a + cm1 * b;
  }
}

// Strang: half rotation, full kick at the midpoint time, half rotation.
State splitting_increment(const State& s, double t, double t_next, const System& sys) {
  const double h = t_next - t;
  State delta = State::zero(s.half_dim());
  linear_increment(s.p, 0.5 * h, delta.q, delta.p);
  const double w = sys.potential_weight(t + 0.5 * h);
  if (w != 0.0) {
    Vec q_mid = s.q;
    axpy(1.0, delta.q, q_mid);
    const Vec grad = sys.potential().gradient(q_mid);
    axpy(-h * w, grad, delta.p);
  }
  Vec p_mid = s.p;
  axpy(1.0, delta.p, p_mid);
  linear_increment(p_mid, 0.5 * h, delta.q, delta.p);
  return delta;
}

State increment(const State& s, double t, double t_next, Scheme scheme, const System& system) {
  if (scheme == Scheme::splitting) {
    if (!system.has_rotation()) {
      throw ConfigError("splitting scheme requires a system with a fast rotation (" +
                        system.id() + ")");
    }
    return splitting_increment(s, t, t_next, system);
  }
  return rk4_increment(s, t, t_next, system);
}

// Kahan summation x += delta with running compensation c.
void compensated_add(Vec& x, const Vec& delta, Vec& c) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double y = delta[i] - c[i];
    const double sum = x[i] + y;
    c[i] = (sum - x[i]) - y;
    x[i] = sum;
  }
}

void check_finite(const State& out, const State& s, double t, const System& system);

std::string describe(const State& s) {
  std::ostringstream os;
  os.precision(17);
  os << "q = (";
  for (std::size_t i = 0; i < s.q.size(); ++i) os << (i ? ", " : "") << s.q[i];
  os << "), p = (";
  for (std::size_t i = 0; i < s.p.size(); ++i) os << (i ? ", " : "") << s.p[i];
  os << ')';
  return os.str();
}

void check_finite(const State& out, const State& s, double t, const System& system) {
  if (!out.finite()) {
    std::ostringstream os;
    os.precision(17);
    os << "integration produced a non-finite state at t = " << t << " (" << system.id()
       << ", start of step: " << describe(s) << ")";
    throw IntegrationFailure(os.str(), t);
  }
}

}  // namespace

std::string to_string(Scheme s) { return s == Scheme::splitting ? "splitting" : "rk4"; }

Scheme parse_scheme(const std::string& name) {
  if (name == "splitting") return Scheme::splitting;
  if (name == "rk4") return Scheme::rk4;
  throw ConfigError("unknown integration scheme '" + name + "' (expected splitting or rk4)");
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || dt > 0.1) {
    throw ConfigError("integrator dt must lie in (0, 0.1], got " + std::to_string(dt));
  }
  if (max_steps <= 0) throw ConfigError("integrator step budget must be positive");
  if (sample_stride < 0) throw ConfigError("sample stride must be non-negative");
  if (!(auto_tol >= 0.0)) throw ConfigError("integrator auto_tol must be non-negative");
}

System::System(Kind k, Potential V, double eps, RampSpec ramp, double ramp_time, int order)
    : kind_(k),
      V_(std::make_shared<const Potential>(std::move(V))),
      eps_(eps),
      ramp_(ramp),
      ramp_time_(ramp_time),
      order_(order) {
  if (kind_ == Kind::slow_G || kind_ == Kind::ramped_F) {
    field_ = std::make_shared<const SlowField>(*V_);
  }
}

System System::full(Potential V, SmallParam eps) {
  return System(Kind::full, std::move(V), eps.value(), RampSpec::unit(), 0.0, 0);
}

System System::ramped(Potential V, SmallParam eps, RampSpec ramp, double ramp_time) {
  if (!(ramp_time > 0.0) || !std::isfinite(ramp_time)) {
    throw ConfigError("ramp time must be positive and finite");
  }
  return System(Kind::ramped, std::move(V), eps.value(), ramp, ramp_time, 0);
}

System System::slow_G(Potential V, SmallParam eps, int order) {
  if (order < 0 || order > kMaxSlowOrder) throw CapabilityError("slow field order out of range");
  return System(Kind::slow_G, std::move(V), eps.value(), RampSpec::unit(), 0.0, order);
}

System System::ramped_F(Potential V, SmallParam eps, RampSpec ramp, double slow_horizon,
                        int order) {
  if (order < 0 || order > kMaxRampedCoeff) {
    throw CapabilityError("ramped slow field order out of range");
  }
  if (!(slow_horizon > 0.0)) throw ConfigError("slow horizon must be positive");
  return System(Kind::ramped_F, std::move(V), eps.value(), ramp, slow_horizon / eps.value(),
                order);
}

std::string System::id() const {
  switch (kind_) {
    case Kind::full:
      return "full";
    case Kind::ramped:
      return "ramped[" + ramp_.name() + "]";
    case Kind::slow_G:
      return "slow-G" + std::to_string(order_);
    case Kind::ramped_F:
      return "ramped-F" + std::to_string(order_) + "[" + ramp_.name() + "]";
  }
  return {};
}

double System::potential_weight(double t) const {
  switch (kind_) {
    case Kind::full:
      return eps_;
    case Kind::ramped:
      if (!(t >= 0.0 && t <= ramp_time_)) {
        throw DomainError("ramped system evaluated at t = " + std::to_string(t) +
                          " outside [0, " + std::to_string(ramp_time_) + "]");
      }
      return eps_ * ramp_eval(ramp_, t / ramp_time_);
    default:
      throw ConfigError("potential weight requested for a slow system");
  }
}

State System::rhs(const State& s, double t) const {
  switch (kind_) {
    case Kind::full:
    case Kind::ramped: {
      State out;
      scaled_rhs(s, potential_weight(t), *V_, out);
      return out;
    }
    case Kind::slow_G: {
      State out;
      out.q = field_->G(order_, s.q, SmallParam(eps_));
      out.p.assign(s.p.size(), 0.0);
      return out;
    }
    case Kind::ramped_F: {
      State out;
      const double horizon = eps_ * ramp_time_;
      const double tau = std::min(std::max(eps_ * t, 0.0), horizon);
      out.q = field_->F(order_, s.q, tau, SmallParam(eps_), ramp_, horizon);
      for (double& x : out.q) x *= eps_;
      out.p.assign(s.p.size(), 0.0);
      return out;
    }
  }
  return {};
}

void System::slave_momentum(State& s, double t) const {
  if (kind_ == Kind::slow_G) {
    s.p = field_->G(order_, s.q, SmallParam(eps_));
  } else if (kind_ == Kind::ramped_F) {
    const double horizon = eps_ * ramp_time_;
    const double tau = std::min(std::max(eps_ * t, 0.0), horizon);
    s.p = field_->F(order_, s.q, tau, SmallParam(eps_), ramp_, horizon);
    for (double& x : s.p) x *= eps_;
  }
}

Vec rotate_exact(std::span<const double> p, double t) {
  require_phase_dim(p, "rotate_exact");
  const std::size_t d = p.size() / 2;
  const double c = std::cos(t);
  const double s = std::sin(t);
  Vec out(p.size());
  for (std::size_t i = 0; i < d; ++i) {
    const double a = p[i];
    const double b = p[d + i];
    out[i] = c * a + s * b;
    out[d + i] = -s * a + c * b;
  }
  return out;
}

void linear_flow(State& st, double h) {
  const std::size_t d = st.half_dim();
  const double c = std::cos(h);
  const double s = std::sin(h);
  const double half = std::sin(0.5 * h);
  const double cm1 = -2.0 * half * half;  // cos(h) - 1 without cancellation
  for (std::size_t i = 0; i < d; ++i) {
    const double a = st.p[i];
    const double b = st.p[d + i];
    // q <- q - J (exp(Jh) - I) p
    st.q[i] += s * a - cm1 * b;
    st.q[d + i] += cm1 * a + s * b;
    st.p[i] = c * a + s * b;
    st.p[d + i] = -s * a + c * b;
  }
}

State step(const State& s, double t, double t_next, Scheme scheme, const System& system) {
  const State delta = increment(s, t, t_next, scheme, system);
  State out = s;
  axpy(1.0, delta.q, out.q);
  axpy(1.0, delta.p, out.p);
  system.slave_momentum(out, t_next);
  check_finite(out, s, t, system);
  return out;
}

Trajectory integrate(const State& s0, double t0, double t1, const IntegratorConfig& cfg,
                     const System& system) {
  cfg.validate();
  if (s0.size() != system.potential().dim()) {
    throw ConfigError("integrate: state dimension does not match the system");
  }
  if (!std::isfinite(t0) || !std::isfinite(t1)) throw ConfigError("integrate: non-finite time");
  const bool forward = cfg.direction == Direction::forward;
  if ((forward && t1 < t0) || (!forward && t1 > t0)) {
    throw ConfigError("integrate: interval direction disagrees with the configured direction");
  }
  const double span = std::abs(t1 - t0);
  // Tolerate a final step a hair longer than dt instead of adding a sliver.
  const double raw = span / cfg.dt;
  const double n_real = std::ceil(raw - 1e-9);
  if (n_real > static_cast<double>(cfg.max_steps)) {
    throw ResourceError("integrate: " + std::to_string(static_cast<long long>(n_real)) +
                        " steps exceed the budget of " + std::to_string(cfg.max_steps));
  }
  const auto n = static_cast<std::int64_t>(n_real);
  const double h = forward ? cfg.dt : -cfg.dt;

  Trajectory traj;
  traj.scheme = cfg.scheme;
  traj.dt = cfg.dt;
  traj.system_id = system.id();
  State s = s0;
  system.slave_momentum(s, t0);
  traj.times.push_back(t0);
  traj.states.push_back(s);

  double t = t0;
  State comp = State::zero(s.half_dim());
  for (std::int64_t i = 0; i < n; ++i) {
    const double t_next = (i + 1 == n) ? t1 : t0 + static_cast<double>(i + 1) * h;
    const State prev = s;
    const State delta = increment(s, t, t_next, cfg.scheme, system);
    compensated_add(s.q, delta.q, comp.q);
    compensated_add(s.p, delta.p, comp.p);
    if (!system.has_rotation()) {
      system.slave_momentum(s, t_next);
      std::fill(comp.p.begin(), comp.p.end(), 0.0);
    }
    check_finite(s, prev, t, system);
    t = t_next;
    const bool last = (i + 1 == n);
    if (last || (cfg.sample_stride > 0 && (i + 1) % cfg.sample_stride == 0)) {
      traj.times.push_back(t);
      traj.states.push_back(s);
    }
  }
  return traj;
}

State propagate(const State& s0, double t0, double t1, const IntegratorConfig& cfg,
                const System& system) {
  IntegratorConfig c = cfg;
  c.sample_stride = 0;
  return integrate(s0, t0, t1, c, system).back();
}

double calibrate_step(const State& s0, double t0, double t1, Scheme scheme, const System& system,
                      double tol, double dt_min) {
  if (!(tol > 0.0) || !(dt_min > 0.0)) throw ConfigError("calibrate_step: tol and dt_min must be positive");
  IntegratorConfig cfg{scheme, 0.1};
  cfg.direction = t1 >= t0 ? Direction::forward : Direction::backward;
  State coarse = propagate(s0, t0, t1, cfg, system);
  double last = std::numeric_limits<double>::infinity();
  for (double dt = 0.1; dt / 2 >= dt_min; dt /= 2) {
    cfg.dt = dt / 2;
    const State fine = propagate(s0, t0, t1, cfg, system);
    last = std::hypot(distance(fine.q, coarse.q), distance(fine.p, coarse.p));
    if (last <= tol) return dt;
    coarse = fine;
  }
  std::ostringstream os;
  os << "calibrate_step: no dt >= " << dt_min << " meets tol " << tol << " on " << system.id()
     << " over [" << t0 << ", " << t1 << "]; last change " << last;
  throw CapabilityError(os.str());
}

}  // namespace optbal
