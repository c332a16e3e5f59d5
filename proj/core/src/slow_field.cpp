#include "optbal/slow_field.hpp"

#include <algorithm>
#include <string>

#include "optbal/error.hpp"

namespace optbal {

namespace {

void check_order(int k, int max, const char* what) {
  if (k < 0 || k > max) {
    throw CapabilityError(std::string(what) + " order " + std::to_string(k) +
                          " outside supported range [0, " + std::to_string(max) + "]");
  }
}

void add_into(JetVec& acc, const JetVec& x) {
  if (acc.empty()) {
    acc = x;
    return;
  }
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += x[i];
}

JetVec neg_J(const JetVec& v) {
  JetVec out = apply_J(v);
  for (Jet& x : out) x *= -1.0;
  return out;
}

Vec to_plain(const JetVec& v) { return values(v); }

}  // namespace

SlowField::SlowField(Potential V) : V_(std::move(V)) {}

JetVec SlowField::g0(std::span<const Jet> q) const { return neg_J(V_.gradient(q)); }

JetVec SlowField::g(int k, std::span<const Jet> q) const {
  check_order(k, kMaxSlowOrder, "slow coefficient g");
  if (q.size() != V_.dim()) throw ConfigError("slow field: q has wrong length");
  std::vector<JetVec> gs;
  gs.reserve(static_cast<std::size_t>(k) + 1);
  gs.push_back(g0(q));
  const int gen = max_depth(q);
  for (int m = 1; m <= k; ++m) {
    JetVec sum;
    for (int i = 0; i < m; ++i) {
      const JetVec& w = gs[static_cast<std::size_t>(m - 1 - i)];
      const JetVec shifted = seed(q, w, gen);
      add_into(sum, derivative(g(i, shifted), gen));
    }
    gs.push_back(neg_J(sum));
  }
  return gs.back();
}

JetVec SlowField::f(int k, std::span<const Jet> q, const Jet& tau, const RampSpec& ramp,
                    double horizon) const {
  check_order(k, kMaxRampedCoeff, "ramped coefficient f");
  if (q.size() != V_.dim()) throw ConfigError("slow field: q has wrong length");
  if (!(horizon > 0.0)) throw ConfigError("ramp horizon must be positive");
  const double tau0 = tau.value();
  if (!(tau0 >= 0.0 && tau0 <= horizon)) {
    throw DomainError("ramped coefficient: tau = " + std::to_string(tau0) + " outside [0, " +
                      std::to_string(horizon) + "]");
  }
  const int gen = std::max(max_depth(q), tau.depth());
  if (k == 0) {
    const Jet theta = tau * (1.0 / horizon);
    const std::vector<double> derivs =
        ramp_derivs(ramp, std::clamp(theta.value(), 0.0, 1.0), theta.depth());
    const Jet rho = theta.compose(derivs);
    JetVec out = neg_J(V_.gradient(q));
    for (Jet& x : out) x = x * rho;
    return out;
  }
  // -J d/dtau f_{k-1}
  const Jet tau_seeded = tau + Jet::generator(gen);
  JetVec sum = derivative(f(k - 1, q, tau_seeded, ramp, horizon), gen);
  // -J sum Df_i f_j
  for (int i = 0; i < k; ++i) {
    const JetVec w = f(k - 1 - i, q, tau, ramp, horizon);
    const JetVec shifted = seed(q, w, gen);
    add_into(sum, derivative(f(i, shifted, tau, ramp, horizon), gen));
  }
  return neg_J(sum);
}

Vec SlowField::g(int k, std::span<const double> q) const { return to_plain(g(k, to_jets(q))); }

Vec SlowField::g_directional(int k, std::span<const double> q,
                             std::span<const double> v) const {
  if (v.size() != q.size()) throw ConfigError("g_directional: direction has wrong length");
  const JetVec qs = seed(to_jets(q), to_jets(v), 0);
  return to_plain(derivative(g(k, qs), 0));
}

Vec SlowField::G(int n, std::span<const double> q, SmallParam eps) const {
  check_order(n, kMaxSlowOrder, "slow field G");
  Vec out(q.size(), 0.0);
  double scale = eps.value();
  for (int i = 0; i <= n; ++i) {
    const Vec gi = g(i, q);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += scale * gi[c];
    scale *= eps.value();
  }
  return out;
}

Vec SlowField::f(int k, std::span<const double> q, double tau, const RampSpec& ramp,
                 double horizon) const {
  return to_plain(f(k, to_jets(q), Jet(tau), ramp, horizon));
}

Vec SlowField::F(int n, std::span<const double> q, double tau, SmallParam eps,
                 const RampSpec& ramp, double horizon) const {
  check_order(n, kMaxRampedCoeff, "ramped field F");
  Vec out(q.size(), 0.0);
  double scale = 1.0;
  for (int i = 0; i <= n; ++i) {
    const Vec fi = f(i, q, tau, ramp, horizon);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += scale * fi[c];
    scale *= eps.value();
  }
  return out;
}

Vec slow_coeff_g(int k, std::span<const double> q, const Potential& V) {
  return SlowField(V).g(k, q);
}

Vec slow_field_G(int n, std::span<const double> q, SmallParam eps, const Potential& V) {
  return SlowField(V).G(n, q, eps);
}

Vec ramped_coeff_f(int k, std::span<const double> q, double tau, const RampSpec& ramp,
                   double horizon, const Potential& V) {
  return SlowField(V).f(k, q, tau, ramp, horizon);
}

Vec ramped_field_F(int n, std::span<const double> q, double tau, SmallParam eps,
                   const RampSpec& ramp, double horizon, const Potential& V) {
  return SlowField(V).F(n, q, tau, eps, ramp, horizon);
}

}  // namespace optbal
