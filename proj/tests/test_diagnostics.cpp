#include <cmath>
#include <complex>

#include "doctest.h"
#include "optbal/diagnostics.hpp"
#include "optbal/error.hpp"

using namespace optbal;

namespace {

std::vector<ImbalanceRecord> synthetic(const std::vector<double>& eps, double (*model)(double)) {
  std::vector<ImbalanceRecord> out;
  for (double e : eps) {
    ImbalanceRecord r;
    r.eps = e;
    r.ramp = "synthetic";
    r.imbalance = model(e);
    out.push_back(r);
  }
  return out;
}

BalanceProblem quartic(double eps, RampSpec ramp) {
  BalanceProblem p;
  p.q_star = {1.0, 0.5};
  p.eps = eps;
  p.ramp = ramp;
  return p;
}

}  // namespace

TEST_CASE("order fit on constructed data") {
  const auto eps = log_spaced_descending(1e-3, 1e-1, 9);
  const FitResult a = fit_order(synthetic(eps, [](double e) { return e * e; }));
  CHECK(std::abs(a.slope - 2.0) < 1e-12);
  CHECK(a.points == 9);
  const FitResult b = fit_order(synthetic(eps, [](double e) { return 5 * std::pow(e, 4); }));
  CHECK(std::abs(b.slope - 4.0) < 1e-12);
  const FitResult w = fit_order(synthetic(eps, [](double e) { return e * e * e; }), {1e-3, 1e-2});
  CHECK(w.points == 5);
  CHECK(std::abs(w.slope - 3.0) < 1e-12);
}

TEST_CASE("order fit rejects thin or non-positive data") {
  const auto eps = log_spaced_descending(1e-3, 1e-1, 9);
  CHECK_THROWS_AS(fit_order(synthetic(eps, [](double e) { return e; }), {1e-3, 3e-3}),
                  DomainError);
  auto recs = synthetic(eps, [](double e) { return e; });
  recs[3].imbalance = 0.0;
  CHECK_THROWS_AS(fit_order(recs), DomainError);
}

TEST_CASE("order fit ignores failed records") {
  const auto eps = log_spaced_descending(1e-3, 1e-1, 9);
  auto recs = synthetic(eps, [](double e) { return e * e; });
  recs[2].status = "failed:initial:solver";
  recs[2].imbalance = std::nan("");
  const FitResult f = fit_order(recs);
  CHECK(f.points == 8);
  CHECK(std::abs(f.slope - 2.0) < 1e-12);
}

TEST_CASE("alpha fit inverts the exponential model") {
  const auto eps = log_spaced_descending(1e-3, 1e-2, 8);
  const FitResult a =
      fit_alpha(synthetic(eps, [](double e) { return std::exp(-3 * std::pow(e, -0.5)); }),
                {1e-3, 1e-2}, 1.0);
  CHECK(a.alpha == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(a.log_c == doctest::Approx(std::log(3.0)).epsilon(1e-10));
  CHECK(a.d_sensitivity.size() == 3);
  const FitResult b = fit_alpha(
      synthetic(eps, [](double e) { return std::exp(-0.02 / e); }), {1e-3, 1e-2}, 1.0);
  CHECK(b.alpha == doctest::Approx(1.0).epsilon(1e-10));
  const FitResult c = fit_alpha(
      synthetic(eps, [](double e) { return 2 * std::exp(-0.1 * std::pow(e, -0.7)); }),
      {1e-3, 1e-2}, 2.0);
  CHECK(c.alpha == doctest::Approx(0.7).epsilon(1e-10));
}

TEST_CASE("alpha fit needs I below d") {
  const auto eps = log_spaced_descending(1e-3, 1e-2, 8);
  CHECK_THROWS_AS(fit_alpha(synthetic(eps, [](double e) { return 1000 * e; }), {1e-3, 1e-2}, 1.0),
                  DomainError);
}

TEST_CASE("log-log curvature") {
  const auto eps = log_spaced_descending(1e-3, 1e-1, 7);
  for (double c : log_log_curvature(synthetic(eps, [](double e) { return e * e; }))) {
    CHECK(std::abs(c) < 1e-9);
  }
  // ln I = -eps^(-1/2): second derivative in ln eps is -eps^(-1/2) / 4 < 0
  for (double c : log_log_curvature(
           synthetic(eps, [](double e) { return std::exp(-std::pow(e, -0.5)); }))) {
    CHECK(c < 0.0);
  }
}

TEST_CASE("log grid") {
  const auto g = log_spaced_descending(1e-3, 1e-1, 21);
  REQUIRE(g.size() == 21);
  CHECK(g.front() == 1e-1);
  CHECK(g.back() == 1e-3);
  CHECK(g[10] == doctest::Approx(1e-2).epsilon(1e-14));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] < g[i - 1]);
  CHECK(log_spaced_descending(1e-3, 1e-1, 0).empty());
}

TEST_CASE("commensurate step divides both intervals") {
  const double h = commensurate_step(1e-2, 0.5 / 0.013, 2.0 / 0.013);
  CHECK(h <= 1e-2);
  const double n1 = (0.5 / 0.013) / h;
  const double n2 = (2.0 / 0.013) / h;
  CHECK(std::abs(n1 - std::round(n1)) < 1e-6);
  CHECK(std::abs(n2 - std::round(n2)) < 1e-6);
  // Never longer than the requested step, even when dt divides t1 up to rounding.
  for (double eps : log_spaced_descending(1e-3, 1e-1, 21)) {
    CHECK(commensurate_step(0.1, 0.5 / eps, 2.0 / eps) <= 0.1);
    CHECK(commensurate_step(0.05, 0.5 / eps, 1.0 / eps) <= 0.05);
  }
}

TEST_CASE("zero potential has no imbalance") {
  BalanceProblem p = quartic(0.05, RampSpec::exponential());
  p.potential = Potential::zero(1);
  const ImbalanceRecord r = diagnosed_imbalance(p.q_star, p, 0.5);
  CHECK(r.ok());
  CHECK(r.imbalance == 0.0);
}

TEST_CASE("sweep preserves order and ramp id") {
  CHECK(sweep({}, {1.0, 0.5}, quartic(0.1, RampSpec::algebraic(2)), 0.5).empty());
  const std::vector<double> eps{0.08, 0.05, 0.03};
  const auto serial = sweep(eps, {1.0, 0.5}, quartic(0.1, RampSpec::algebraic(2)), 0.5, 1);
  const auto parallel = sweep(eps, {1.0, 0.5}, quartic(0.1, RampSpec::algebraic(2)), 0.5, 3);
  REQUIRE(serial.size() == 3);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    CHECK(serial[i].eps == eps[i]);
    CHECK(serial[i].ramp == "algebraic:2");
    CHECK(serial[i].ok());
    CHECK(serial[i].residual_initial <= 1e-10);
    CHECK(serial[i].residual_rebalance <= 1e-10);
    CHECK(serial[i].imbalance == parallel[i].imbalance);
  }
  CHECK_THROWS_AS(sweep({0.01, 0.05}, {1.0, 0.5}, quartic(0.1, RampSpec::algebraic(2)), 0.5),
                  ConfigError);
}

TEST_CASE("solver failures become tagged records") {
  BalanceProblem p = quartic(0.05, RampSpec::exponential());
  p.max_iterations = 1;
  p.tol = 1e-300;
  const ImbalanceRecord r = diagnosed_imbalance(p.q_star, p, 0.5);
  CHECK_FALSE(r.ok());
  CHECK(r.status.rfind("failed:initial:", 0) == 0);
  CHECK(std::isnan(r.imbalance));
}

TEST_CASE("rebalancing the rebalanced point is idempotent") {
  const BalanceProblem p = quartic(0.02, RampSpec::exponential());
  const BalanceResult a = solve_balance(p);
  const BalanceResult b = solve_balance(p);
  CHECK(distance(a.p_star, b.p_star) <= 10 * p.tol);
  const ImbalanceRecord r1 = diagnosed_imbalance(p.q_star, p, 0.5);
  const ImbalanceRecord r2 = diagnosed_imbalance(p.q_star, p, 0.5);
  CHECK(r1.imbalance == r2.imbalance);
}

TEST_CASE("slow tracking error matches the harmonic closed form") {
  // z = q1 + i q2; J acts as -i. Full modes i(-1 +- sqrt(1+4 eps))/2; the
  // slow flow of G_n rotates z at the truncated rate r_n.
  using cplx = std::complex<double>;
  const cplx I(0.0, 1.0);
  const double catalan[] = {1, 1, 2, 5, 14};
  for (int n : {0, 1}) {
    for (double eps : {0.02, 0.01}) {
      SlowTrackingConfig cfg;
      cfg.potential = Potential::harmonic(1);
      cfg.q0 = {1.0, 0.5};
      cfg.order = n;
      double rate = 0.0;
      for (int k = 0; k <= n; ++k) rate += (k % 2 ? -1.0 : 1.0) * catalan[k] * std::pow(eps, k + 1);
      const double r = std::sqrt(1.0 + 4.0 * eps);
      const cplx lp = I * (-1.0 + r) / 2.0, lm = I * (-1.0 - r) / 2.0;
      const cplx z0(1.0, 0.5);
      const cplx w0 = I * rate * z0;
      const cplx A = (w0 - lm * z0) / (lp - lm), B = z0 - A;
      double sup = 0.0;
      const int samples = static_cast<int>(std::llround(1.0 / eps / 0.1));
      for (int i = 0; i <= samples; ++i) {
        const double t = 0.1 * i;
        const cplx full = A * std::exp(lp * t) + B * std::exp(lm * t);
        const cplx slow = z0 * std::exp(I * rate * t);
        sup = std::max(sup, std::abs(full - slow));
      }
      CAPTURE(n);
      CAPTURE(eps);
      CHECK(slow_tracking_error(eps, cfg) == doctest::Approx(sup).epsilon(1e-4));
    }
  }
}

TEST_CASE("slow tracking vanishes without a potential") {
  SlowTrackingConfig cfg;
  cfg.potential = Potential::zero(1);
  const auto res = verify_slow_tracking({0.05, 0.02}, cfg);
  for (const auto& p : res.points) CHECK(p.sup_error == 0.0);
  CHECK(res.expected_slope == 2.0);
}

TEST_CASE("balanced state stays balanced over a bounded horizon") {
  BalanceProblem p = quartic(1e-2, RampSpec::exponential());
  const DriftReport d = balance_drift(p, 2.0);
  CHECK(d.initial > 0.0);
  CHECK(d.maximum <= 5 * d.initial);
  CHECK(d.times.size() == d.deviation.size());
}
