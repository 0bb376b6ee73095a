#include <doctest.h>

#include <cmath>
#include <random>

#include "phq/weyl.hpp"

using namespace phq::weyl;
using cplx = std::complex<double>;

namespace {

const WeylPolynomial X = WeylPolynomial::x();
const WeylPolynomial P = WeylPolynomial::p();
const cplx I(0, 1);

WeylPolynomial random_poly(std::mt19937_64& g, int degree) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  WeylPolynomial r;
  for (int j = 0; j <= degree; ++j)
    for (int k = 0; j + k <= degree; ++k) r += WeylPolynomial::monomial(j, k, cplx(u(g), u(g)));
  return r;
}

WeylDisplacement random_disp(std::mt19937_64& g, bool real = false) {
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  if (real) return {u(g), u(g), 1.0};
  return {cplx(u(g), u(g)), cplx(u(g), u(g)), 1.0};
}

}  // namespace

TEST_CASE("canonical commutator") {
  CHECK(commutator(X, P) == WeylPolynomial::constant(I));
  CHECK(P * X == X * P - WeylPolynomial::constant(I));
  // [x, p^2] = 2 i p, [x^2, p] = 2 i x
  CHECK(distance(commutator(X, P * P), 2.0 * I * P) == 0.0);
  CHECK(distance(commutator(X * X, P), 2.0 * I * X) == 0.0);
}

TEST_CASE("product is associative and distributive") {
  std::mt19937_64 g(1);
  for (int i = 0; i < 30; ++i) {
    const auto a = random_poly(g, 2), b = random_poly(g, 2), c = random_poly(g, 2);
    CHECK(distance((a * b) * c, a * (b * c)) < 1e-14);
    CHECK(distance(a * (b + c), a * b + a * c) < 1e-14);
  }
}

TEST_CASE("Jacobi identity and antisymmetry") {
  std::mt19937_64 g(2);
  for (int i = 0; i < 30; ++i) {
    const auto a = random_poly(g, 2), b = random_poly(g, 2), c = random_poly(g, 2);
    const auto j = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) +
                   commutator(c, commutator(a, b));
    CHECK(j.max_abs() < 1e-13);
    CHECK((commutator(a, b) + commutator(b, a)).max_abs() == 0.0);
  }
}

TEST_CASE("dagger reverses products and conjugates scalars") {
  std::mt19937_64 g(3);
  for (int i = 0; i < 30; ++i) {
    const auto a = random_poly(g, 2), b = random_poly(g, 2);
    CHECK(distance(dagger(a * b), dagger(b) * dagger(a)) < 1e-14);
    CHECK(distance(dagger(dagger(a)), a) < 1e-15);
  }
  CHECK(dagger(X * P) == P * X);
}

TEST_CASE("degree cap") {
  CHECK_THROWS_AS(WeylPolynomial::monomial(4, 3), CapacityError);
  const auto x3 = WeylPolynomial::monomial(3, 0);
  CHECK_THROWS_AS(x3 * WeylPolynomial::monomial(0, 4), CapacityError);
  CHECK_NOTHROW(x3 * WeylPolynomial::monomial(0, 3));
  CHECK_THROWS_AS(WeylPolynomial::monomial(-1, 0), std::invalid_argument);
}

TEST_CASE("to_string is lexicographic with 12 digits") {
  const auto t = WeylPolynomial::monomial(0, 2) + X + WeylPolynomial::monomial(0, 1, cplx(-2, 1)) +
                 WeylPolynomial::constant(cplx(-3, -4));
  CHECK(t.to_string() == "(-3-4i) + (-2+1i) p + 1 p^2 + 1 x");
  CHECK(WeylPolynomial::monomial(2, 1, cplx(0, 0.5)).to_string() == "0.5i x^2 p");
  CHECK(WeylPolynomial().to_string() == "0");
  CHECK(WeylPolynomial::constant(1.0 / 3.0).to_string() == "0.333333333333");
}

TEST_CASE("coefficients cancel to an empty map") {
  auto t = X * P;
  t -= X * P;
  CHECK(t.is_zero());
  CHECK(t.degree() == -1);
  CHECK((X * 0.0).is_zero());
}

TEST_CASE("displacement conjugation matches the adjoint series") {
  std::mt19937_64 g(4);
  for (int i = 0; i < 30; ++i) {
    const auto d = random_disp(g);
    const auto t = random_poly(g, 3);
    CHECK(distance(conjugate(d, t), conjugate_by_exponential(d.generator(), t)) < 1e-13);
    // e^G x e^-G = x + nu [p, x] = x - i nu, e^G p e^-G = p + i mu
    CHECK(distance(conjugate(d, X), X - WeylPolynomial::constant(I * d.nu)) < 1e-15);
    CHECK(distance(conjugate(d, P), P + WeylPolynomial::constant(I * d.mu)) < 1e-15);
  }
}

TEST_CASE("conjugation is an algebra automorphism") {
  std::mt19937_64 g(5);
  for (int i = 0; i < 30; ++i) {
    const auto d = random_disp(g);
    const auto a = random_poly(g, 2), b = random_poly(g, 2);
    CHECK(distance(conjugate(d, a * b), conjugate(d, a) * conjugate(d, b)) < 1e-12);
    CHECK(distance(conjugate(d.inverse(), conjugate(d, a)), a) < 1e-13);
  }
}

TEST_CASE("compose multiplies exponentials") {
  std::mt19937_64 g(6);
  for (int i = 0; i < 30; ++i) {
    const auto d1 = random_disp(g), d2 = random_disp(g);
    const auto c = compose(d1, d2);
    CHECK(std::abs(c.mu - (d1.mu + d2.mu)) < 1e-15);
    CHECK(std::abs(c.nu - (d1.nu + d2.nu)) < 1e-15);
    CHECK(std::abs(c.prefactor - std::exp(I * (d1.mu * d2.nu - d1.nu * d2.mu) / 2.0)) < 1e-15);
    const auto t = random_poly(g, 2);
    CHECK(distance(conjugate(c, t), conjugate(d1, conjugate(d2, t))) < 1e-12);
    const auto e = compose(d1, d1.inverse());
    CHECK(std::abs(e.mu) + std::abs(e.nu) + std::abs(e.prefactor - 1.0) < 1e-15);
  }
}

TEST_CASE("apply_displacement agrees with composition on functions") {
  std::mt19937_64 g(7);
  const AnalyticFunction f = [](cplx z) { return std::exp(-(z - 1.0) * (z - 1.0)) * (z + 2.0); };
  for (int i = 0; i < 30; ++i) {
    const auto d1 = random_disp(g), d2 = random_disp(g);
    const auto nested = displaced(d1, displaced(d2, f));
    const auto joint = displaced(compose(d1, d2), f);
    for (double x : {-0.5, 0.4, 1.3}) {
      CHECK(std::abs(nested(x) - joint(x)) <= 1e-13 * std::abs(joint(x)));
    }
  }
}

TEST_CASE("apply_displacement intertwines with the operator action") {
  // D (x psi) = (D x D^-1) D psi on a test function
  std::mt19937_64 g(8);
  const AnalyticFunction f = [](cplx z) { return std::exp(-z * z / 2.0); };
  const AnalyticFunction xf = [&f](cplx z) { return z * f(z); };
  for (int i = 0; i < 20; ++i) {
    const auto d = random_disp(g);
    const cplx shift = -I * d.nu;  // D x D^-1 = x - i nu
    for (double x : {-0.3, 0.7}) {
      const cplx lhs = apply_displacement(d, xf, x);
      const cplx rhs = (x + shift) * apply_displacement(d, f, x);
      CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST_CASE("conjugate_by_exponential rejects quadratic generators") {
  CHECK_THROWS_AS(conjugate_by_exponential(X * X, P), UnsupportedGenerator);
  CHECK_NOTHROW(conjugate_by_exponential(0.3 * X + 0.2 * P, P * P));
}

TEST_CASE("solve_metric_parameters recovers the metric") {
  std::mt19937_64 g(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    const double a = u(g), b = u(g), c = u(g), d = u(g);
    const auto inv = P * P + X + cplx(-b, a) * P + WeylPolynomial::constant(cplx(-c, -d));
    const auto mp = solve_metric_parameters(inv);
    CHECK(std::abs(mp.alpha + a) < 1e-13);
    CHECK(std::abs(mp.beta - (a * b - 2 * d)) < 1e-13);
    const WeylDisplacement eta{mp.alpha, mp.beta, 1.0};
    CHECK(distance(conjugate(eta, inv), dagger(inv)) < 1e-13);
  }
}

TEST_CASE("solve_metric_parameters rejects other shapes") {
  CHECK_THROWS_AS(solve_metric_parameters(X * X + P * P), NoMetricOfThisForm);
  CHECK_THROWS_AS(solve_metric_parameters(cplx(1, 1) * P * P + X), NoMetricOfThisForm);
  CHECK_THROWS_AS(solve_metric_parameters(X * P + X), NoMetricOfThisForm);
}
