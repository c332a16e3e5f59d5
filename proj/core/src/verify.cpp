#include "optbal/verify.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <sstream>

#include "optbal/error.hpp"

namespace optbal {

namespace {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// Enumeration is exponential in the grid; keep requests to desk scale.
constexpr int kMaxInequalityGrid = 40;

BigInt factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void compose_into(int total, int s, int min_part, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (s == 0) {
    if (total == 0) out.push_back(cur);
    return;
  }
  const int max_here = total - (s - 1) * min_part;
  for (int v = min_part; v <= max_here; ++v) {
    cur.push_back(v);
    compose_into(total - v, s - 1, min_part, cur, out);
    cur.pop_back();
  }
}

// (alpha+beta)!^2 / beta! is an integer component-wise.
BigInt mf_term(const MultiIndex& alpha, const MultiIndex& beta) {
  BigInt t = 1;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const BigInt f = factorial(alpha[i] + beta[i]);
    t *= f * f / factorial(beta[i]);
  }
  return t;
}

BigInt mf_lhs(const MultiIndex& alpha, int n) {
  BigInt sum = 0;
  for (const MultiIndex& beta : compositions(n, static_cast<int>(alpha.size()), 0)) {
    sum += mf_term(alpha, beta);
  }
  return sum;
}

BigInt mf_rhs(int k, int n) {
  const BigInt f = factorial(n + k);
  return f * f / factorial(n);
}

std::string format(const MultiIndex& m) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < m.size(); ++i) os << (i ? "," : "") << m[i];
  os << ')';
  return os.str();
}

void track(InequalityReport& report, const BigInt& lhs, const BigInt& rhs, const std::string& where) {
  ++report.cases;
  const double ratio = static_cast<double>(BigRational(lhs, rhs));
  if (ratio > report.max_ratio) {
    report.max_ratio = ratio;
    report.max_ratio_at = where;
  }
  if (lhs > rhs) report.violations.push_back({where, lhs.str(), rhs.str()});
}

void check_grid(int v, const char* what) {
  if (v < 0 || v > kMaxInequalityGrid) {
    throw CapabilityError(std::string(what) + " = " + std::to_string(v) +
                          " outside the supported range [0, " + std::to_string(kMaxInequalityGrid) +
                          "]");
  }
}

}  // namespace

std::vector<MultiIndex> compositions(int total, int s, int min_part) {
  if (total < 0 || s < 0 || min_part < 0) throw DomainError("compositions: negative argument");
  std::vector<MultiIndex> out;
  MultiIndex cur;
  compose_into(total, s, min_part, cur, out);
  return out;
}

InequalityReport factorial_convolution_check(int n_max, int k_max) {
  check_grid(n_max, "n_max");
  check_grid(k_max, "k_max");
  InequalityReport report;
  for (int n = 0; n <= n_max; ++n) {
    for (int k = 2; k <= k_max; ++k) {
      const BigInt rhs = factorial(n + k);
      for (int l = 1; l < k; ++l) {
        BigInt lhs = 0;
        for (int m = 0; m <= n; ++m) lhs += factorial(m + l) * factorial(n + k - m - l);
        std::ostringstream where;
        where << "n=" << n << " k=" << k << " l=" << l;
        track(report, lhs, rhs, where.str());
      }
    }
  }
  return report;
}

InequalityReport multinomial_factorial_check(int n_max, int s_max, int k_max) {
  check_grid(n_max, "n_max");
  check_grid(s_max, "s_max");
  check_grid(k_max, "k_max");
  InequalityReport report;
  for (int s = 1; s <= s_max; ++s) {
    for (int k = s; k <= k_max; ++k) {
      for (const MultiIndex& alpha : compositions(k, s, 1)) {
        for (int n = 0; n <= n_max; ++n) {
          std::ostringstream where;
          where << "s=" << s << " alpha=" << format(alpha) << " n=" << n;
          track(report, mf_lhs(alpha, n), mf_rhs(k, n), where.str());
        }
      }
    }
  }
  return report;
}

std::string multinomial_factorial_lhs(const MultiIndex& alpha, int n) {
  for (int a : alpha) {
    if (a < 1) throw DomainError("multinomial check: alpha entries must be strictly positive");
  }
  if (n < 0) throw DomainError("multinomial check: n must be non-negative");
  return mf_lhs(alpha, n).str();
}

std::string multinomial_factorial_rhs(int k, int n) {
  if (k < 0 || n < 0) throw DomainError("multinomial check: negative argument");
  return mf_rhs(k, n).str();
}

}  // namespace optbal
