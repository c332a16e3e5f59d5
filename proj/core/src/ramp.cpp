#include "optbal/ramp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "optbal/error.hpp"

namespace optbal {

namespace {

using Series = std::vector<double>;  // Taylor coefficients in h = theta - theta0

// r = a / b, truncated to a.size() terms.
Series divide(const Series& a, const Series& b) {
  Series r(a.size(), 0.0);
  for (std::size_t j = 0; j < a.size(); ++j) {
    double acc = a[j];
    for (std::size_t i = 0; i < j; ++i) acc -= r[i] * b[j - i];
    r[j] = acc / b[0];
  }
  return r;
}

// exp(u) for a series u.
Series exp_series(const Series& u) {
  Series e(u.size(), 0.0);
  e[0] = std::exp(u[0]);
  for (std::size_t j = 1; j < u.size(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 1; i <= j; ++i) acc += static_cast<double>(i) * u[i] * e[j - i];
    e[j] = acc / static_cast<double>(j);
  }
  return e;
}

// (c + s h)^k
Series binomial_power(double c, double s, int k, std::size_t terms) {
  Series out(terms, 0.0);
  double binom = 1.0;
  for (int j = 0; j <= k && static_cast<std::size_t>(j) < terms; ++j) {
    out[static_cast<std::size_t>(j)] = binom * std::pow(c, k - j) * std::pow(s, j);
    binom = binom * (k - j) / (j + 1);
  }
  return out;
}

// -1 / (c + s h) with c > 0.
Series neg_reciprocal(double c, double s, std::size_t terms) {
  Series out(terms, 0.0);
  double term = -1.0 / c;
  for (std::size_t j = 0; j < terms; ++j) {
    out[j] = term;
    term *= -s / c;
  }
  return out;
}

Series ramp_series(const RampSpec& ramp, double theta, std::size_t terms) {
  switch (ramp.family()) {
    case RampSpec::Family::unit: {
      Series s(terms, 0.0);
      s[0] = 1.0;
      return s;
    }
    case RampSpec::Family::algebraic: {
      const int k = ramp.power();
      Series num = binomial_power(theta, 1.0, k, terms);
      Series den = binomial_power(1.0 - theta, -1.0, k, terms);
      for (std::size_t j = 0; j < terms; ++j) den[j] += num[j];
      return divide(num, den);
    }
    case RampSpec::Family::exponential: {
      Series s(terms, 0.0);
      // One-sided limits: every derivative vanishes at both endpoints.
      if (theta <= 0.0) return s;
      if (theta >= 1.0) {
        s[0] = 1.0;
        return s;
      }
      Series left = neg_reciprocal(theta, 1.0, terms);
      Series right = neg_reciprocal(1.0 - theta, -1.0, terms);
      // Scale both exponentials by the larger one so neither overflows and
      // the dominant one is O(1).
      const double shift = std::max(left[0], right[0]);
      left[0] -= shift;
      right[0] -= shift;
      Series num = exp_series(left);
      Series den = exp_series(right);
      for (std::size_t j = 0; j < terms; ++j) den[j] += num[j];
      return divide(num, den);
    }
  }
  return {};
}

void check_theta(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw DomainError("ramp argument must lie in [0, 1], got " + std::to_string(theta));
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

RampSpec RampSpec::algebraic(int k) {
  if (k < 1) throw ConfigError("algebraic ramp needs k >= 1, got " + std::to_string(k));
  return RampSpec(Family::algebraic, k);
}

RampSpec RampSpec::exponential() { return RampSpec(Family::exponential, 0); }

RampSpec RampSpec::unit() { return RampSpec(Family::unit, 0); }

RampSpec RampSpec::parse(const std::string& name) {
  if (name == "exponential") return exponential();
  if (name == "unit") return unit();
  const std::string prefix = "algebraic:";
  if (name.rfind(prefix, 0) == 0) {
    const std::string digits = name.substr(prefix.size());
    if (digits.empty() || digits.size() > 3 ||
        !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      throw ConfigError("bad ramp power in '" + name + "'");
    }
    return algebraic(std::stoi(digits));
  }
  throw ConfigError("unknown ramp '" + name + "' (expected algebraic:k or exponential)");
}

std::string RampSpec::name() const {
  switch (family_) {
    case Family::algebraic:
      return "algebraic:" + std::to_string(k_);
    case Family::exponential:
      return "exponential";
    case Family::unit:
      return "unit";
  }
  return {};
}

double ramp_eval(const RampSpec& ramp, double theta) {
  check_theta(theta);
  switch (ramp.family()) {
    case RampSpec::Family::unit:
      return 1.0;
    case RampSpec::Family::algebraic: {
      if (theta == 0.0) return 0.0;
      if (theta == 1.0) return 1.0;
      const double a = std::pow(theta, ramp.power());
      const double b = std::pow(1.0 - theta, ramp.power());
      return a / (a + b);
    }
    case RampSpec::Family::exponential: {
      if (theta == 0.0) return 0.0;
      if (theta == 1.0) return 1.0;
      // f(t)/(f(t)+f(1-t)) = 1 / (1 + exp(1/t - 1/(1-t)))
      const double x = 1.0 / theta - 1.0 / (1.0 - theta);
      return 1.0 / (1.0 + std::exp(x));
    }
  }
  return 0.0;
}

std::vector<double> ramp_derivs(const RampSpec& ramp, double theta, int max_order) {
  check_theta(theta);
  if (max_order < 0) throw DomainError("negative derivative order");
  if (max_order > kMaxRampOrder) {
    throw CapabilityError("ramp derivative order " + std::to_string(max_order) +
                          " exceeds maximum " + std::to_string(kMaxRampOrder));
  }
  Series s = ramp_series(ramp, theta, static_cast<std::size_t>(max_order) + 1);
  double f = 1.0;
  for (int j = 0; j <= max_order; ++j) {
    if (j > 0) f *= j;
    s[static_cast<std::size_t>(j)] *= f;
  }
  s[0] = ramp_eval(ramp, theta);
  return s;
}

double ramp_deriv(const RampSpec& ramp, double theta, int order) {
  if (order == 0) return ramp_eval(ramp, theta);
  return ramp_derivs(ramp, theta, order)[static_cast<std::size_t>(order)];
}

OrderConditionReport check_order_condition(const RampSpec& ramp, int n, double tol) {
  if (n < 0) throw DomainError("order condition needs n >= 0");
  OrderConditionReport report;
  report.n = n;
  report.tol = tol;
  if (n == 0) return report;
  const std::vector<double> d0 = ramp_derivs(ramp, 0.0, n);
  const std::vector<double> d1 = ramp_derivs(ramp, 1.0, n);
  for (int i = 1; i <= n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    report.at_zero.push_back(d0[idx]);
    report.at_one.push_back(d1[idx]);
    if (std::abs(d0[idx]) > tol || std::abs(d1[idx]) > tol) report.satisfied = false;
  }
  return report;
}

double gevrey_eta(double lambda) {
  if (!(lambda > 0.0 && lambda < 0.5)) {
    throw DomainError("lambda must lie in (0, 1/2), got " + std::to_string(lambda));
  }
  return lambda * (1.0 - lambda) / ((1.0 + lambda) * (1.0 + lambda));
}

std::vector<double> exp_inverse_derivative_poly(int n) {
  if (n < 0) throw DomainError("negative derivative order");
  // P_0 = 1, P_{n+1}(y) = y^2 (P_n(y) - P_n'(y)).
  std::vector<double> p{1.0};
  for (int step = 0; step < n; ++step) {
    std::vector<double> next(p.size() + 2, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) next[i + 2] += p[i];
    for (std::size_t i = 1; i < p.size(); ++i) next[i + 1] -= static_cast<double>(i) * p[i];
    p = std::move(next);
  }
  return p;
}

GevreyReport check_gevrey2_bound(int n_max, double lambda) {
  const double eta = gevrey_eta(lambda);
  if (n_max < 0 || n_max > 10) {
    throw DomainError("gevrey check supports 0 <= n_max <= 10, got " + std::to_string(n_max));
  }
  GevreyReport report;
  report.lambda = lambda;
  report.eta = eta;

  // Log-spaced grid in y = 1/x over [1e-3, 1e4]; exp(-y) y^m is negligible
  // beyond, and |f^{(n)}| -> 0 as x -> infinity for n >= 1.
  constexpr int kGrid = 200000;
  const double lo = std::log(1e-3);
  const double hi = std::log(1e4);
  for (int n = 0; n <= n_max; ++n) {
    const std::vector<double> poly = exp_inverse_derivative_poly(n);
    double sup = 0.0;
    for (int g = 0; g <= kGrid; ++g) {
      const double y = std::exp(lo + (hi - lo) * g / kGrid);
      const double ly = std::log(y);
      double v = 0.0;
      for (std::size_t i = 0; i < poly.size(); ++i) {
        if (poly[i] != 0.0) v += poly[i] * std::exp(static_cast<double>(i) * ly - y);
      }
      sup = std::max(sup, std::abs(v));
    }
    if (n == 0) sup = 1.0;  // sup of exp(-1/x) is the limit x -> infinity
    GevreyEntry e;
    e.n = n;
    e.sup = sup;
    const double f = factorial(n + 1);
    e.bound = f * f / std::pow(eta, n + 1);
    e.margin = e.bound - e.sup;
    if (e.margin < 0.0) report.passed = false;
    report.entries.push_back(e);
  }
  return report;
}

RampGevreyReport fit_ramp_gevrey2(const RampSpec& ramp, int n_max, int grid) {
  if (n_max < 0 || n_max > kMaxRampOrder) throw CapabilityError("ramp gevrey order out of range");
  if (grid < 2) throw DomainError("ramp gevrey grid needs at least 2 points");
  RampGevreyReport report;
  report.sups.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int g = 0; g <= grid; ++g) {
    const double theta = static_cast<double>(g) / grid;
    const std::vector<double> d = ramp_derivs(ramp, theta, n_max);
    for (int n = 0; n <= n_max; ++n) {
      const auto idx = static_cast<std::size_t>(n);
      report.sups[idx] = std::max(report.sups[idx], std::abs(d[idx]));
    }
  }
  double eta = std::numeric_limits<double>::infinity();
  for (int n = 0; n <= n_max; ++n) {
    const double s = report.sups[static_cast<std::size_t>(n)];
    if (s == 0.0) continue;
    const double f = factorial(n + 1);
    eta = std::min(eta, std::pow(f * f / s, 1.0 / (n + 1)));
  }
  report.eta = eta;
  for (int n = 0; n <= n_max; ++n) {
    const double f = factorial(n + 1);
    report.normalized.push_back(report.sups[static_cast<std::size_t>(n)] *
                                std::pow(eta, n + 1) / (f * f));
  }
  return report;
}

}  // namespace optbal
