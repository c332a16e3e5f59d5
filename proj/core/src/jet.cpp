#include "optbal/jet.hpp"

#include <string>

#include "optbal/error.hpp"
#include "optbal/state.hpp"

namespace optbal {

namespace {

void check_depth(int depth) {
  if (depth < 0 || depth > kMaxJetDepth) {
    throw CapabilityError("jet depth " + std::to_string(depth) +
                          " exceeds the supported maximum " +
                          std::to_string(kMaxJetDepth));
  }
}

}  // namespace

Jet Jet::generator(int g) {
  check_depth(g + 1);
  Jet e;
  e.grow(g + 1);
  e.coeffs_[std::size_t{1} << g] = 1.0;
  return e;
}

double Jet::coeff(std::uint32_t mask) const {
  return mask < coeffs_.size() ? coeffs_[mask] : 0.0;
}

void Jet::grow(int depth) {
  if (depth <= depth_) return;
  check_depth(depth);
  coeffs_.resize(std::size_t{1} << depth, 0.0);
  depth_ = depth;
}

Jet Jet::lifted(int depth) const {
  Jet out = *this;
  out.grow(depth);
  return out;
}

Jet Jet::derivative(int g) const {
  Jet out;
  if (g >= depth_) return out;
  out.grow(depth_ - 1);
  const std::uint32_t bit = 1u << g;
  const std::uint32_t low = bit - 1;
  for (std::uint32_t m = 0; m < coeffs_.size(); ++m) {
    if (!(m & bit)) continue;
    const std::uint32_t reduced = (m & low) | ((m >> 1) & ~low);
    out.coeffs_[reduced] = coeffs_[m];
  }
  return out;
}

Jet Jet::compose(std::span<const double> derivs) const {
  if (derivs.empty()) throw CapabilityError("jet compose: no derivatives supplied");
  if (static_cast<int>(derivs.size()) < depth_ + 1) {
    throw CapabilityError("jet compose: need " + std::to_string(depth_ + 1) +
                          " derivatives, got " + std::to_string(derivs.size()));
  }
  Jet nil = *this;
  nil.coeffs_[0] = 0.0;
  Jet out(derivs[0]);
  out.grow(depth_);
  Jet power(1.0);
  double factorial = 1.0;
  for (int j = 1; j <= depth_; ++j) {
    power *= nil;
    factorial *= j;
    out += power * (derivs[static_cast<std::size_t>(j)] / factorial);
  }
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  grow(o.depth_);
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  grow(o.depth_);
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

Jet& Jet::operator*=(const Jet& o) {
  *this = *this * o;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  if (a.depth_ == 0) return b * a.coeffs_[0];
  if (b.depth_ == 0) return a * b.coeffs_[0];
  const int depth = a.depth_ > b.depth_ ? a.depth_ : b.depth_;
  Jet out;
  out.grow(depth);
  const std::uint32_t n = 1u << depth;
  for (std::uint32_t c = 0; c < n; ++c) {
    double acc = 0.0;
    // Sum over submasks s of c: a[s] * b[c \ s].
    for (std::uint32_t s = c;; s = (s - 1) & c) {
      acc += a.coeff(s) * b.coeff(c ^ s);
      if (s == 0) break;
    }
    out.coeffs_[c] = acc;
  }
  return out;
}

JetVec to_jets(std::span<const double> v) { return JetVec(v.begin(), v.end()); }

std::vector<double> values(std::span<const Jet> v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const Jet& x : v) out.push_back(x.value());
  return out;
}

int max_depth(std::span<const Jet> v) {
  int m = 0;
  for (const Jet& x : v) m = x.depth() > m ? x.depth() : m;
  return m;
}

JetVec derivative(std::span<const Jet> v, int g) {
  JetVec out;
  out.reserve(v.size());
  for (const Jet& x : v) out.push_back(x.derivative(g));
  return out;
}

JetVec seed(std::span<const Jet> q, std::span<const Jet> w, int g) {
  if (q.size() != w.size()) throw ConfigError("jet seed: length mismatch");
  const Jet e = Jet::generator(g);
  JetVec out;
  out.reserve(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out.push_back(q[i] + e * w[i]);
  return out;
}

JetVec apply_J(std::span<const Jet> v) {
  if (v.empty() || v.size() % 2 != 0) {
    throw ConfigError("apply_J: vector length must be 2d with d >= 1");
  }
  const std::size_t d = v.size() / 2;
  JetVec out(v.size());
  for (std::size_t i = 0; i < d; ++i) {
    out[i] = v[d + i];
    out[d + i] = -v[i];
  }
  return out;
}

}  // namespace optbal
