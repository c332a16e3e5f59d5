#pragma once

#include <optional>
#include <span>

#include "optbal/jet.hpp"
#include "optbal/potential.hpp"
#include "optbal/ramp.hpp"
#include "optbal/state.hpp"

namespace optbal {

inline constexpr int kMaxSlowOrder = 4;
inline constexpr int kMaxRampedCoeff = 5;

/// Slow vector fields of the fast-slow system.
///
/// Autonomous coefficients:
///   g_0 = -J grad V,   g_k = -J sum_{i+j=k-1} Dg_i g_j,
///   G_n = eps sum_{i<=n} g_i eps^i.
/// Ramped coefficients (slow time tau, ramp rho(tau/a)):
///   f_0 = -rho J grad V,
///   f_k = -J d/dtau f_{k-1} - J sum_{i+j=k-1} Df_i f_j,
///   F_n = sum_{i<=n} f_i eps^i, so that eps F_n = G_n when rho = 1.
/// Jacobian-vector products and tau derivatives are taken with jets, so the
/// recursion is exact for polynomial potentials.
class SlowField {
 public:
  explicit SlowField(Potential V);

  const Potential& potential() const noexcept { return V_; }

  /// g_k evaluated on jets; k <= kMaxSlowOrder.
  JetVec g(int k, std::span<const Jet> q) const;
  /// f_k evaluated on jets; k <= kMaxRampedCoeff.
  JetVec f(int k, std::span<const Jet> q, const Jet& tau, const RampSpec& ramp,
           double horizon) const;

  Vec g(int k, std::span<const double> q) const;
  /// Dg_k(q) v.
  Vec g_directional(int k, std::span<const double> q, std::span<const double> v) const;
  Vec G(int n, std::span<const double> q, SmallParam eps) const;

  Vec f(int k, std::span<const double> q, double tau, const RampSpec& ramp,
        double horizon) const;
  Vec F(int n, std::span<const double> q, double tau, SmallParam eps, const RampSpec& ramp,
        double horizon) const;

 private:
  JetVec g0(std::span<const Jet> q) const;
  Potential V_;
};

Vec slow_coeff_g(int k, std::span<const double> q, const Potential& V);
Vec slow_field_G(int n, std::span<const double> q, SmallParam eps, const Potential& V);
Vec ramped_coeff_f(int k, std::span<const double> q, double tau, const RampSpec& ramp,
                   double horizon, const Potential& V);
Vec ramped_field_F(int n, std::span<const double> q, double tau, SmallParam eps,
                   const RampSpec& ramp, double horizon, const Potential& V);

}  // namespace optbal
