#include "optbal/state.hpp"

#include <cmath>
#include <string>

#include "optbal/error.hpp"

namespace optbal {

State::State(Vec q_, Vec p_) : q(std::move(q_)), p(std::move(p_)) {
  if (q.size() != p.size()) {
    throw ConfigError("state: q and p lengths differ (" +
                      std::to_string(q.size()) + " vs " +
                      std::to_string(p.size()) + ")");
  }
  require_phase_dim(q, "state");
}

State State::zero(std::size_t half_dim) {
  if (half_dim == 0) throw ConfigError("state: d must be at least 1");
  return State(Vec(2 * half_dim, 0.0), Vec(2 * half_dim, 0.0));
}

bool State::finite() const noexcept { return all_finite(q) && all_finite(p); }

SmallParam::SmallParam(double eps) : eps_(eps) {
  if (!(eps > 0.0) || eps > 1.0) {
    throw ConfigError("epsilon must lie in (0, 1], got " + std::to_string(eps));
  }
}

void require_phase_dim(std::span<const double> v, const char* what) {
  if (v.empty() || v.size() % 2 != 0) {
    throw ConfigError(std::string(what) +
                      ": vector length must be 2d with d >= 1, got " +
                      std::to_string(v.size()));
  }
}

void apply_J(std::span<const double> v, std::span<double> out) {
  require_phase_dim(v, "apply_J");
  if (out.size() != v.size()) throw ConfigError("apply_J: output length mismatch");
  const std::size_t d = v.size() / 2;
  for (std::size_t i = 0; i < d; ++i) {
    const double top = v[i];
    out[i] = v[d + i];
    out[d + i] = -top;
  }
}

Vec apply_J(std::span<const double> v) {
  Vec out(v.size());
  apply_J(v, out);
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("distance: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

bool all_finite(std::span<const double> v) noexcept {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace optbal
