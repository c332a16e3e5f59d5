#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "optbal/jet.hpp"
#include "optbal/state.hpp"

namespace optbal {

/// One monomial coefficient * prod_i q_i^exponents[i].
struct Monomial {
  double coefficient = 0.0;
  std::vector<int> exponents;
};

/// Polynomial potential V on R^{2d}.
///
/// Every catalog entry is a polynomial, so gradients lifted to jets are exact
/// to any depth. Instances are immutable and safe to share between threads.
class Potential {
 public:
  /// Builds a polynomial from monomials; all exponent vectors must have
  /// length 2d and non-negative entries.
  Potential(std::size_t half_dim, std::vector<Monomial> terms, std::string tag);

  /// V(q) = 3/4 q1^4 + 1/4 q2^4 (d = 1).
  static Potential quartic_aniso();
  /// V(q) = 1/2 |q|^2.
  static Potential harmonic(std::size_t half_dim = 1);
  /// V = 0.
  static Potential zero(std::size_t half_dim = 1);
  static Potential custom(std::size_t half_dim, std::vector<Monomial> terms);

  std::size_t half_dim() const noexcept { return half_dim_; }
  std::size_t dim() const noexcept { return 2 * half_dim_; }
  const std::string& tag() const noexcept { return tag_; }
  const std::vector<Monomial>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  double value(std::span<const double> q) const;
  /// Throws EvaluationError if the result is not finite.
  void gradient(std::span<const double> q, std::span<double> out) const;
  Vec gradient(std::span<const double> q) const;
  /// Gradient evaluated on jets; depth-0 input reproduces gradient() exactly.
  JetVec gradient(std::span<const Jet> q) const;

 private:
  void check_dim(std::size_t n, const char* what) const;

  std::size_t half_dim_;
  std::vector<Monomial> terms_;
  // For each coordinate, the differentiated monomials of dV/dq_i.
  std::vector<std::vector<Monomial>> partials_;
  std::string tag_;
};

}  // namespace optbal
