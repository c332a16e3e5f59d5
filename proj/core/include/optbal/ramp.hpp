#pragma once

#include <string>
#include <vector>

namespace optbal {

/// Highest derivative order ramp_deriv supports.
inline constexpr int kMaxRampOrder = 12;

/// Ramp rho(theta) = f(theta) / (f(theta) + f(1 - theta)) on [0, 1], with
/// f(theta) = theta^k (algebraic) or exp(-1/theta) (exponential).
///
/// The unit family (rho = 1 everywhere) is not a homotopy; it exists so the
/// ramped system can be compared against the autonomous one.
class RampSpec {
 public:
  enum class Family { algebraic, exponential, unit };

  static RampSpec algebraic(int k);
  static RampSpec exponential();
  static RampSpec unit();
  /// Parses "algebraic:k", "exponential" or "unit".
  static RampSpec parse(const std::string& name);

  Family family() const noexcept { return family_; }
  int power() const noexcept { return k_; }
  /// Canonical name, round-trips through parse().
  std::string name() const;

  friend bool operator==(const RampSpec&, const RampSpec&) = default;

 private:
  RampSpec(Family f, int k) : family_(f), k_(k) {}
  Family family_;
  int k_;
};

/// rho(theta); exact 0 and 1 at the endpoints. DomainError outside [0, 1].
double ramp_eval(const RampSpec& ramp, double theta);

/// i-th derivative of rho at theta (one-sided at the endpoints).
/// CapabilityError if order > kMaxRampOrder.
double ramp_deriv(const RampSpec& ramp, double theta, int order);

/// rho and its derivatives 0..max_order at theta in one pass.
std::vector<double> ramp_derivs(const RampSpec& ramp, double theta, int max_order);

struct OrderConditionReport {
  bool satisfied = true;
  int n = 0;
  double tol = 0.0;
  // Entry i-1 holds rho^{(i)} at the endpoint, i = 1..n.
  std::vector<double> at_zero;
  std::vector<double> at_one;
};

/// Checks |rho^{(i)}(0)| <= tol and |rho^{(i)}(1)| <= tol for i = 1..n.
OrderConditionReport check_order_condition(const RampSpec& ramp, int n, double tol = 1e-12);

struct GevreyEntry {
  int n = 0;
  double sup = 0.0;     // numerical sup of |f^{(n)}| on the grid
  double bound = 0.0;   // (n+1)!^2 / eta^{n+1}
  double margin = 0.0;  // bound - sup
};

struct GevreyReport {
  bool passed = true;
  double lambda = 0.0;
  double eta = 0.0;
  std::vector<GevreyEntry> entries;
};

/// eta = lambda (1 - lambda) / (1 + lambda)^2; DomainError unless
/// lambda in (0, 1/2).
double gevrey_eta(double lambda);

/// Coefficients (ascending powers of y) of P_n with
/// d^n/dx^n exp(-1/x) = exp(-1/x) P_n(1/x).
std::vector<double> exp_inverse_derivative_poly(int n);

/// Sup of |d^n/dx^n exp(-1/x)| over x > 0 versus (n+1)!^2 / eta^{n+1}
/// for n = 0..n_max.
GevreyReport check_gevrey2_bound(int n_max, double lambda = 1.0 / 3.0);

struct RampGevreyReport {
  double eta = 0.0;                // largest eta with sup_n <= (n+1)!^2/eta^{n+1} for all n
  std::vector<double> sups;        // sup over (0,1) of |rho^{(n)}|, n = 0..n_max
  std::vector<double> normalized;  // sups[n] * eta^{n+1} / (n+1)!^2, all <= 1
};

/// Fits the (n+1)!^2 envelope to the ramp's own derivatives up to n_max.
RampGevreyReport fit_ramp_gevrey2(const RampSpec& ramp, int n_max, int grid = 4000);

}  // namespace optbal
