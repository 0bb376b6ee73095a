#include <doctest.h>

#include <cmath>
#include <random>

#include "phq/airy.hpp"
#include "phq/invariant.hpp"
#include "phq/overlap.hpp"

using namespace phq::invariant;
using phq::weyl::WeylPolynomial;
using cplx = std::complex<double>;

namespace {

// Constant preset by hand: theta = -0.0025 t^2, chi = K/16 = -t^2/16.
double preset_phase(double t, double a_n, double chi_sign) {
  const double theta3 = -0.0025 / 3.0;
  const double chi3 = -1.0 / 48.0;
  return (theta3 + chi_sign * chi3) * t * t * t + a_n * t / 2.0;
}

}  // namespace

TEST_CASE("constant preset coefficients at t = 1") {
  const auto cs = coefficients(Scenario::constant_preset(), 1.0);
  CHECK(cs.a == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(cs.b == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cs.c == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(cs.d == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(cs.K == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(cs.beta == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(cs.zeta == doctest::Approx(0.0025).epsilon(1e-13));
  CHECK(cs.theta == doctest::Approx(-0.0025).epsilon(1e-13));
  CHECK(cs.chi == doctest::Approx(-1.0 / 16).epsilon(1e-14));
}

TEST_CASE("text forms of the invariant and its hermitization") {
  const auto cs = coefficients(Scenario::constant_preset(), 1.0);
  CHECK(build_invariant(cs).to_string() == "(-0.01-0.05i) + (-1+0.2i) p + 1 p^2 + 1 x");
  CHECK(hermitized_invariant(cs).to_string() == "-1 p + 1 p^2 + 1 x");
  const auto u = build_U(cs);
  CHECK(std::abs(u.mu - cplx(0, 0.5)) < 1e-15);
  CHECK(std::abs(u.nu - cplx(0, -0.25)) < 1e-15);
}

TEST_CASE("coefficients vanish at t = 0 and stay inside [0, T]") {
  for (const auto& s : {Scenario::constant_preset(), Scenario::cosine_preset()}) {
    const auto z = coefficients(s, 0.0);
    CHECK(z.a == 0.0);
    CHECK(z.b == 0.0);
    CHECK(z.c == 0.0);
    CHECK(z.d == 0.0);
    CHECK_THROWS_AS(coefficients(s, -0.1), std::domain_error);
    CHECK_THROWS_AS(coefficients(s, 1.1), std::domain_error);
  }
}

TEST_CASE("closed forms agree with quadrature of the rates") {
  Scenario lin = Scenario::cosine_preset();
  lin.mass = {MassLaw::Kind::linear, 1.0, 0.7};
  Scenario tiny = Scenario::constant_preset();
  tiny.mass = {MassLaw::Kind::linear, 2.0, 1e-9};
  for (const auto& s : {Scenario::constant_preset(), Scenario::cosine_preset(), lin, tiny}) {
    for (double t : {0.1, 0.37, 0.8, 1.0}) {
      const auto c = coefficients(s, t), q = coefficients_by_quadrature(s, t);
      CHECK(c.a == doctest::Approx(q.a).epsilon(1e-11));
      CHECK(c.b == doctest::Approx(q.b).epsilon(1e-11));
      CHECK(c.c == doctest::Approx(q.c).epsilon(1e-11));
      CHECK(c.d == doctest::Approx(q.d).epsilon(1e-11));
    }
  }
}

TEST_CASE("von Neumann residual vanishes identically") {
  Scenario lin = Scenario::cosine_preset(0.3);
  lin.mass = {MassLaw::Kind::linear, 0.5, 2.0};
  for (const auto& s : {Scenario::constant_preset(), Scenario::cosine_preset(), lin}) {
    for (int k = 0; k <= 10; ++k) CHECK(von_neumann_residual(s, k / 10.0).max_abs() < 1e-12);
  }
}

TEST_CASE("pseudo-hermiticity and hermitization for random coefficients") {
  std::mt19937_64 g(21);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const auto cs = CoefficientSet::from_abcd(0.0, u(g), u(g), u(g), u(g));
    const auto inv = build_invariant(cs);
    CHECK(distance(conjugate(build_metric(cs), inv), dagger(inv)) < 1e-13);
    const auto eta = compose(build_rho(cs), build_rho(cs));
    CHECK(std::abs(eta.mu - build_metric(cs).mu) + std::abs(eta.nu - build_metric(cs).nu) < 1e-15);
    const auto ih = hermitized_invariant(cs);
    CHECK(distance(ih, dagger(ih)) < 1e-13);
    const auto target = WeylPolynomial::monomial(0, 2) + WeylPolynomial::x();
    CHECK(distance(conjugate(build_U(cs).inverse(), ih), target) < 1e-13);
  }
}

TEST_CASE("eigenstate satisfies I psi = lambda psi") {
  for (int n : {1, 2, 5}) {
    const auto cs = coefficients(Scenario::cosine_preset(), 0.6);
    const auto psi = eigenstate(cs, n);
    const auto ipsi = apply(build_invariant(cs), psi);
    const double lambda = -phq::airy::airy_zero(n).value;
    for (double x : {0.2, 1.0, 2.5}) {
      CHECK(std::abs(ipsi(x) - lambda * psi(x)) <= 1e-11 * std::max(1.0, std::abs(psi(x))));
    }
  }
}

TEST_CASE("wavefunction at t = 0 is the normalized Airy state") {
  const auto s = Scenario::constant_preset();
  CHECK(analytic_wavefunction(s, 1, 0.0, 1.0).real() == doctest::Approx(0.720513335114).epsilon(1e-11));
  CHECK(std::abs(analytic_wavefunction(s, 1, 0.0, 0.0)) < 1e-14);
  CHECK_THROWS_AS(analytic_wavefunction(s, 1, 0.5, -0.1), std::domain_error);
}

TEST_CASE("functional phase equals theta + chi - lambda/2m") {
  const auto s = Scenario::constant_preset();
  const double a1 = phq::airy::airy_zero(1).value;
  for (double t : {0.25, 0.5, 1.0}) {
    const double ref = preset_phase(t, a1, +1.0);
    CHECK(phase_from_functional(s, 1, t).epsilon == doctest::Approx(ref).epsilon(1e-9));
    CHECK(phase_rate_corrected(s, 1, t).epsilon == doctest::Approx(ref).epsilon(1e-12));
    // theta - chi - lambda/2m integrates to a different function of t
    CHECK(phase_closed_form(s, 1, t).epsilon == doctest::Approx(preset_phase(t, a1, -1.0)).epsilon(1e-12));
  }
  CHECK(phase_from_functional(s, 1, 0.25).epsilon == doctest::Approx(-0.292602).epsilon(2e-6));
  CHECK(phase_closed_form(s, 1, 0.25).epsilon == doctest::Approx(-0.291951).epsilon(2e-6));
}

TEST_CASE("LrSolution phase is smooth and starts at zero") {
  const LrSolution sol(Scenario::cosine_preset(), 2);
  CHECK(sol.phase(0.0) == 0.0);
  for (double t : {0.3, 0.7, 1.0}) {
    CHECK(sol.phase(t) == doctest::Approx(phase_from_functional(sol.scenario(), 2, t).epsilon).epsilon(1e-8));
    CHECK(sol.phase_rate(t) == doctest::Approx(phase_rate_functional(sol.scenario(), 2, t)).epsilon(1e-8));
  }
}

TEST_CASE("eta norm is exactly one on the co-moving contour") {
  const auto s = Scenario::constant_preset();
  for (double t : {0.0, 0.5, 1.0}) {
    const auto cs = coefficients(s, t);
    const auto psi = eigenstate(cs, 1);
    const auto eta_psi = psi.displaced(build_metric(cs));
    CHECK(std::abs(phq::overlap(psi, eta_psi, phq::Domain::comoving) - 1.0) < 1e-12);
  }
}

TEST_CASE("parse_scenario") {
  const auto s = parse_scenario(
      R"({"mass": {"kind": "linear", "m0": 1.5, "mu": 0.25}, "drive": {"kind": "cosine", "f0": 0.2, "omega": 3}, "horizon": 2})");
  CHECK(s.m(2.0) == doctest::Approx(2.0));
  CHECK(s.f(0.0) == doctest::Approx(0.2));
  CHECK(parse_scenario(to_json(s)).m(1.0) == s.m(1.0));
  CHECK(to_json(parse_scenario(to_json(s))) == to_json(s));

  const char* bad[] = {
      R"({"mass": {"kind": "constant", "m0": 0}, "drive": {"kind": "constant", "f0": 0.1}, "horizon": 1})",
      R"({"mass": {"kind": "linear", "m0": 1, "mu": -2}, "drive": {"kind": "constant", "f0": 0.1}, "horizon": 1})",
      R"({"mass": {"kind": "constant", "m0": 1, "mu": 1}, "drive": {"kind": "constant", "f0": 0.1}, "horizon": 1})",
      R"({"mass": {"kind": "constant", "m0": 1}, "drive": {"kind": "constant", "f0": 0.1}})",
      R"({"mass": {"kind": "constant", "m0": 1}, "drive": {"kind": "constant", "f0": 0.1}, "horizon": 1, "x": 0})",
      R"({"mass": {"kind": "quadratic", "m0": 1}, "drive": {"kind": "constant", "f0": 0.1}, "horizon": 1})",
      R"({"mass": {"kind": "constant", "m0": "1"}, "drive": {"kind": "constant", "f0": 0.1}, "horizon": 1})",
      R"({"mass": {"kind": "constant", "m0": 1}, "drive": {"kind": "constant", "f0": 0.1}, "horizon": 0})",
      R"({"mass": )",
      R"([1, 2])",
  };
  for (const char* text : bad) CHECK_THROWS_AS(parse_scenario(text), ScenarioError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ScenarioError);
}
