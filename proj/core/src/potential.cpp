#include "optbal/potential.hpp"

#include <cmath>
#include <sstream>

#include "optbal/error.hpp"

namespace optbal {

namespace {

template <typename T>
T ipow(const T& x, int e) {
  T r(1.0);
  for (int i = 0; i < e; ++i) r = r * x;
  return r;
}

template <typename T>
T eval_monomials(const std::vector<Monomial>& terms, std::span<const T> q) {
  T sum(0.0);
  for (const Monomial& m : terms) {
    T prod(m.coefficient);
    for (std::size_t i = 0; i < m.exponents.size(); ++i) {
      if (m.exponents[i] != 0) prod = prod * ipow(q[i], m.exponents[i]);
    }
    sum = sum + prod;
  }
  return sum;
}

std::string describe(std::span<const double> q) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < q.size(); ++i) os << (i ? ", " : "") << q[i];
  os << ')';
  return os.str();
}

}  // namespace

Potential::Potential(std::size_t half_dim, std::vector<Monomial> terms, std::string tag)
    : half_dim_(half_dim), terms_(std::move(terms)), tag_(std::move(tag)) {
  if (half_dim_ == 0) throw ConfigError("potential: d must be at least 1");
  const std::size_t n = dim();
  for (const Monomial& m : terms_) {
    if (m.exponents.size() != n) {
      throw ConfigError("potential: monomial exponent vector has length " +
                        std::to_string(m.exponents.size()) + ", expected " +
                        std::to_string(n));
    }
    for (int e : m.exponents) {
      if (e < 0) throw ConfigError("potential: negative exponent");
    }
    if (!std::isfinite(m.coefficient)) throw ConfigError("potential: non-finite coefficient");
  }
  partials_.resize(n);
  for (const Monomial& m : terms_) {
    for (std::size_t i = 0; i < n; ++i) {
      if (m.exponents[i] == 0 || m.coefficient == 0.0) continue;
      Monomial dm = m;
      dm.coefficient *= m.exponents[i];
      dm.exponents[i] -= 1;
      partials_[i].push_back(std::move(dm));
    }
  }
}

Potential Potential::quartic_aniso() {
  return Potential(1, {{0.75, {4, 0}}, {0.25, {0, 4}}}, "quartic-aniso");
}

Potential Potential::harmonic(std::size_t half_dim) {
  std::vector<Monomial> terms;
  for (std::size_t i = 0; i < 2 * half_dim; ++i) {
    Monomial m{0.5, std::vector<int>(2 * half_dim, 0)};
    m.exponents[i] = 2;
    terms.push_back(std::move(m));
  }
  return Potential(half_dim, std::move(terms), "harmonic");
}

Potential Potential::zero(std::size_t half_dim) { return Potential(half_dim, {}, "zero"); }

Potential Potential::custom(std::size_t half_dim, std::vector<Monomial> terms) {
  return Potential(half_dim, std::move(terms), "custom-polynomial");
}

void Potential::check_dim(std::size_t n, const char* what) const {
  if (n != dim()) {
    throw ConfigError(std::string("potential ") + what + ": expected length " +
                      std::to_string(dim()) + ", got " + std::to_string(n));
  }
}

double Potential::value(std::span<const double> q) const {
  check_dim(q.size(), "value");
  const double v = eval_monomials<double>(terms_, q);
  if (!std::isfinite(v)) throw EvaluationError("potential value not finite at q = " + describe(q));
  return v;
}

void Potential::gradient(std::span<const double> q, std::span<double> out) const {
  check_dim(q.size(), "gradient");
  check_dim(out.size(), "gradient output");
  for (std::size_t i = 0; i < q.size(); ++i) {
    out[i] = eval_monomials<double>(partials_[i], q);
    if (!std::isfinite(out[i])) {
      throw EvaluationError("potential gradient not finite at q = " + describe(q));
    }
  }
}

Vec Potential::gradient(std::span<const double> q) const {
  Vec g(q.size());
  gradient(q, g);
  return g;
}

JetVec Potential::gradient(std::span<const Jet> q) const {
  check_dim(q.size(), "jet gradient");
  JetVec out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    out[i] = eval_monomials<Jet>(partials_[i], q);
    for (double c : out[i].coeffs()) {
      if (!std::isfinite(c)) {
        throw EvaluationError("potential jet gradient not finite at q = " +
                              describe(values(q)));
      }
    }
  }
  return out;
}

}  // namespace optbal
