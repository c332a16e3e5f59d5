#pragma once

// Truncated Taylor arithmetic over nilpotent generators.
//
// A Jet of depth m is a polynomial in m generators e_0..e_{m-1} with
// e_i^2 = 0, stored as 2^m coefficients indexed by generator bitmask. Seeding
// q + e_g * w and reading the e_g coefficient of f(q + e_g * w) yields the
// directional derivative Df(q) w; nesting generators gives higher mixed
// derivatives exactly (up to rounding) for polynomial maps.

#include <cstdint>
#include <span>
#include <vector>

namespace optbal {

inline constexpr int kMaxJetDepth = 5;

class Jet {
 public:
  Jet() : coeffs_(1, 0.0) {}
  Jet(double value) : coeffs_(1, value) {}  // NOLINT: implicit by design of the algebra

  /// The generator e_g as a jet of depth g + 1.
  static Jet generator(int g);

  int depth() const noexcept { return depth_; }
  double value() const noexcept { return coeffs_[0]; }
  double coeff(std::uint32_t mask) const;
  std::span<const double> coeffs() const noexcept { return coeffs_; }

  /// Same jet embedded in a larger generator set.
  Jet lifted(int depth) const;

  /// Coefficient of generator g, as a jet over the remaining generators
  /// (generators above g are renumbered down by one).
  Jet derivative(int g) const;

  /// Applies a scalar function given its derivatives at value():
  /// f(x0 + N) = sum_j derivs[j] / j! * N^j. derivs.size() must exceed the
  /// nilpotency index of N (depth + 1 suffices).
  Jet compose(std::span<const double> derivs) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator*=(double s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator-(Jet a) { return a *= -1.0; }

 private:
  void grow(int depth);

  int depth_ = 0;
  std::vector<double> coeffs_;
};

using JetVec = std::vector<Jet>;

/// Lifts a plain vector to depth-0 jets.
JetVec to_jets(std::span<const double> v);
/// Order-0 projection.
std::vector<double> values(std::span<const Jet> v);
/// Largest depth over the components.
int max_depth(std::span<const Jet> v);
/// Component-wise derivative(g).
JetVec derivative(std::span<const Jet> v, int g);
/// q + e_g * w component-wise.
JetVec seed(std::span<const Jet> q, std::span<const Jet> w, int g);
/// J applied to a jet vector (same block convention as apply_J).
JetVec apply_J(std::span<const Jet> v);

}  // namespace optbal
