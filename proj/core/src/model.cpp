#include "optbal/model.hpp"

#include <string>

#include "optbal/error.hpp"

namespace optbal {

void scaled_rhs(const State& s, double weight, const Potential& V, State& out) {
  const std::size_t n = s.size();
  if (n != V.dim()) {
    throw ConfigError("rhs: state length " + std::to_string(n) +
                      " does not match potential dimension " + std::to_string(V.dim()));
  }
  out.q.resize(n);
  out.p.resize(n);
  V.gradient(s.q, out.p);
  const std::size_t d = n / 2;
  for (std::size_t i = 0; i < d; ++i) {
    const double jp_top = s.p[d + i];
    const double jp_bot = -s.p[i];
    out.p[i] = jp_top - weight * out.p[i];
    out.p[d + i] = jp_bot - weight * out.p[d + i];
  }
  out.q = s.p;
}

State full_rhs(const State& s, SmallParam eps, const Potential& V) {
  State out;
  scaled_rhs(s, eps.value(), V, out);
  return out;
}

State ramped_rhs(const State& s, double t, SmallParam eps, double ramp_time,
                 const RampSpec& ramp, const Potential& V) {
  if (!(ramp_time > 0.0)) throw ConfigError("ramp time must be positive");
  if (!(t >= 0.0 && t <= ramp_time)) {
    throw DomainError("ramped rhs: t = " + std::to_string(t) + " outside [0, " +
                      std::to_string(ramp_time) + "]");
  }
  State out;
  scaled_rhs(s, eps.value() * ramp_eval(ramp, t / ramp_time), V, out);
  return out;
}

double energy(const State& s, SmallParam eps, const Potential& V) {
  return 0.5 * dot(s.p, s.p) + eps.value() * V.value(s.q);
}

}  // namespace optbal
