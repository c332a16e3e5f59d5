#pragma once

#include <string>
#include <vector>

namespace optbal {

/// Multi-index of non-negative integers.
using MultiIndex = std::vector<int>;

struct InequalityViolation {
  std::string where;  // human-readable grid point
  std::string lhs;    // exact decimal values
  std::string rhs;
};

struct InequalityReport {
  long long cases = 0;
  std::vector<InequalityViolation> violations;
  double max_ratio = 0.0;  // largest lhs / rhs seen
  std::string max_ratio_at;

  bool passed() const noexcept { return violations.empty(); }
};

/// sum_{m=0}^{n} (m+l)! (n+k-m-l)! <= (n+k)! over 0 <= n <= n_max,
/// 1 <= l < k <= k_max, in exact integer arithmetic.
InequalityReport factorial_convolution_check(int n_max, int k_max);

/// sum_{|beta|=n} (alpha+beta)!^2 / beta! <= (n+k)!^2 / n! over all
/// strictly positive alpha with |alpha| = k <= k_max and length s <= s_max,
/// beta of the same length, n <= n_max. Multi-index factorials are products
/// of component factorials.
InequalityReport multinomial_factorial_check(int n_max, int s_max, int k_max);

/// Exact decimal value of the multinomial left side for one (alpha, n).
std::string multinomial_factorial_lhs(const MultiIndex& alpha, int n);
/// Exact decimal value of the multinomial right side (n+k)!^2 / n!.
std::string multinomial_factorial_rhs(int k, int n);

/// All length-s compositions of total into non-negative (min_part = 0) or
/// positive (min_part = 1) parts, in lexicographic order.
std::vector<MultiIndex> compositions(int total, int s, int min_part);

}  // namespace optbal
