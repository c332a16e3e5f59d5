#include <cmath>
#include <random>

#include "doctest.h"
#include "optbal/error.hpp"
#include "optbal/model.hpp"
#include "optbal/potential.hpp"
#include "optbal/ramp.hpp"
#include "optbal/state.hpp"

using namespace optbal;

TEST_CASE("apply_J uses the [[0, I], [-I, 0]] block convention") {
  CHECK(apply_J(Vec{1.0, 0.0}) == Vec{0.0, -1.0});
  CHECK(apply_J(Vec{0.0, 1.0}) == Vec{1.0, 0.0});
  CHECK(apply_J(Vec{1.0, 2.0, 3.0, 4.0}) == Vec{3.0, 4.0, -1.0, -2.0});
}

TEST_CASE("J is antisymmetric and squares to -I") {
  std::mt19937 rng(7);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 20; ++trial) {
    Vec v(6);
    for (double& x : v) x = n01(rng);
    CHECK(std::abs(dot(v, apply_J(v))) < 1e-14);
    const Vec jj = apply_J(apply_J(v));
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(jj[i] == -v[i]);
  }
}

TEST_CASE("dimension errors") {
  CHECK_THROWS_AS(apply_J(Vec{1.0, 2.0, 3.0}), ConfigError);
  CHECK_THROWS_AS(apply_J(Vec{}), ConfigError);
  CHECK_THROWS_AS(State(Vec{1.0, 2.0}, Vec{1.0}), ConfigError);
  CHECK_THROWS_AS(State(Vec{1.0}, Vec{1.0}), ConfigError);
}

TEST_CASE("small parameter range") {
  CHECK_THROWS_AS(SmallParam(0.0), ConfigError);
  CHECK_THROWS_AS(SmallParam(-1e-3), ConfigError);
  CHECK_THROWS_AS(SmallParam(1.5), ConfigError);
  CHECK_THROWS_AS(SmallParam(std::nan("")), ConfigError);
  CHECK(SmallParam(1.0).value() == 1.0);
}

TEST_CASE("full_rhs examples") {
  SUBCASE("zero potential rotates p") {
    const State d = full_rhs(State({0.0, 0.0}, {1.0, 0.0}), SmallParam(0.1), Potential::zero());
    CHECK(d.q == Vec{1.0, 0.0});
    CHECK(d.p == Vec{0.0, -1.0});
  }
  SUBCASE("harmonic force") {
    const State d = full_rhs(State({1.0, 0.0}, {0.0, 0.0}), SmallParam(0.1), Potential::harmonic());
    CHECK(d.p[0] == doctest::Approx(-0.1).epsilon(1e-15));
    CHECK(d.p[1] == 0.0);
  }
  SUBCASE("quartic force by hand") {
    const State d =
        full_rhs(State({1.0, 0.5}, {0.2, -0.1}), SmallParam(0.5), Potential::quartic_aniso());
    // Jp = (-0.1, -0.2), grad V = (3, 0.125)
    CHECK(d.p[0] == doctest::Approx(-0.1 - 1.5));
    CHECK(d.p[1] == doctest::Approx(-0.2 - 0.0625));
  }
}

TEST_CASE("ramped_rhs matches the frozen systems at the endpoints") {
  const Potential V = Potential::quartic_aniso();
  const State s({0.3, -0.7}, {0.1, 0.4});
  const SmallParam eps(0.05);
  const double T = 2.0 / eps;
  for (const auto& ramp : {RampSpec::algebraic(2), RampSpec::algebraic(4), RampSpec::exponential()}) {
    const State at0 = ramped_rhs(s, 0.0, eps, T, ramp, V);
    const State free = full_rhs(s, eps, Potential::zero());
    CHECK(at0.q == free.q);
    CHECK(at0.p == free.p);
    const State atT = ramped_rhs(s, T, eps, T, ramp, V);
    const State full = full_rhs(s, eps, V);
    CHECK(atT.p == full.p);
  }
  CHECK_THROWS_AS(ramped_rhs(s, -1e-9, eps, T, RampSpec::exponential(), V), DomainError);
  CHECK_THROWS_AS(ramped_rhs(s, T * (1 + 1e-12), eps, T, RampSpec::exponential(), V),
                  DomainError);
}

TEST_CASE("energy is a first integral of full_rhs") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const Potential V = Potential::quartic_aniso();
  for (int trial = 0; trial < 20; ++trial) {
    const State s({u(rng), u(rng)}, {u(rng), u(rng)});
    const SmallParam eps(0.1);
    const State d = full_rhs(s, eps, V);
    const Vec g = V.gradient(s.q);
    // dE/dt = p . dp + eps grad V . dq
    const double rate = dot(s.p, d.p) + eps * dot(g, d.q);
    CHECK(std::abs(rate) < 1e-14);
  }
}

TEST_CASE("potential gradients agree with central differences") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const std::vector<Potential> catalog = {
      Potential::quartic_aniso(), Potential::harmonic(2),
      Potential::custom(1, {{1.5, {2, 1}}, {-0.25, {0, 3}}, {2.0, {1, 0}}})};
  for (const auto& V : catalog) {
    for (int trial = 0; trial < 25; ++trial) {
      Vec q(V.dim());
      for (double& x : q) x = u(rng);
      const Vec g = V.gradient(q);
      for (std::size_t i = 0; i < q.size(); ++i) {
        const double h = 1e-5;
        Vec a = q, b = q;
        a[i] += h;
        b[i] -= h;
        const double fd = (V.value(a) - V.value(b)) / (2 * h);
        CHECK(std::abs(fd - g[i]) <= 1e-6 * std::max(1.0, std::abs(g[i])));
      }
    }
  }
}

TEST_CASE("catalog values") {
  CHECK(Potential::quartic_aniso().value(Vec{1.0, 0.5}) == doctest::Approx(0.75 + 0.25 / 16));
  CHECK(Potential::harmonic(1).value(Vec{3.0, 4.0}) == doctest::Approx(12.5));
  CHECK(Potential::zero(2).is_zero());
  CHECK_THROWS_AS(Potential::custom(1, {{1.0, {1, 2, 3}}}), ConfigError);
  CHECK_THROWS_AS(Potential::custom(1, {{1.0, {-1, 2}}}), ConfigError);
  CHECK_THROWS_AS(Potential::quartic_aniso().gradient(Vec{1.0, 2.0, 3.0, 4.0}), ConfigError);
}

TEST_CASE("non-finite gradients are reported") {
  const Potential V = Potential::quartic_aniso();
  CHECK_THROWS_AS(V.gradient(Vec{1e120, 0.0}), EvaluationError);
  CHECK_THROWS_AS(full_rhs(State({1e120, 0.0}, {0.0, 0.0}), SmallParam(0.1), V), EvaluationError);
}
