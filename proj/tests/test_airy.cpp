#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "phq/airy.hpp"

using phq::airy::airy_eval;
using phq::airy::airy_zero;
using cplx = std::complex<double>;

namespace {

constexpr std::array<std::array<double, 6>, 558> kReference = {{
#include "data/airy_reference.inc"
}};

constexpr std::array<double, 100> kZeros = {
#include "data/airy_zeros.inc"
};

double rel(cplx got, cplx want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

}  // namespace

TEST_CASE("airy_eval matches the frozen mpmath table") {
  double worst_ai = 0, worst_aip = 0;
  for (const auto& r : kReference) {
    const auto v = airy_eval({r[0], r[1]});
    worst_ai = std::max(worst_ai, rel(v.ai, {r[2], r[3]}));
    worst_aip = std::max(worst_aip, rel(v.ai_prime, {r[4], r[5]}));
  }
  CHECK(worst_ai < 5e-13);
  CHECK(worst_aip < 5e-13);
}

TEST_CASE("airy_eval special values") {
  const auto v0 = airy_eval(0.0);
  CHECK(v0.ai.real() == doctest::Approx(0.355028053887817239).epsilon(1e-15));
  CHECK(v0.ai_prime.real() == doctest::Approx(-0.258819403792806798).epsilon(1e-15));
  CHECK(v0.ai.imag() == 0.0);
}

TEST_CASE("airy_eval obeys Ai'' = z Ai") {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(-12.0, 12.0);
  const double h = 1e-4;
  for (int i = 0; i < 200; ++i) {
    const cplx z(u(g), u(g) * 0.5);
    const cplx second = (airy_eval(z + h).ai_prime - airy_eval(z - h).ai_prime) / (2 * h);
    const cplx zai = z * airy_eval(z).ai;
    CHECK(std::abs(second - zai) <= 1e-6 * std::max(1.0, std::abs(zai)));
  }
}

TEST_CASE("airy_eval is real on the real axis and reflection symmetric") {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> u(-40.0, 40.0);
  for (int i = 0; i < 200; ++i) {
    const double x = u(g), y = u(g) * 0.5;
    if (std::hypot(x, y) > phq::airy::kMaxArgument) continue;
    const auto a = airy_eval({x, y});
    const auto b = airy_eval({x, -y});
    CHECK(rel(a.ai, std::conj(b.ai)) < 1e-14);
    CHECK(rel(a.ai_prime, std::conj(b.ai_prime)) < 1e-14);
    CHECK(airy_eval(x).ai.imag() == 0.0);
  }
}

TEST_CASE("airy_eval is analytic across the method switch radius") {
  const double r = phq::airy::kSwitchRadius;
  for (double phi = 0.0; phi < 2 * M_PI; phi += 0.1) {
    const cplx in = std::polar(r - 1e-13, phi), out = std::polar(r + 1e-13, phi);
    CHECK(rel(airy_eval(in).ai, airy_eval(out).ai) < 1e-11);
  }
}

TEST_CASE("airy_eval rejects arguments outside the window") {
  CHECK_THROWS_AS(airy_eval(65.0), phq::airy::UnsupportedArgument);
  CHECK_THROWS_AS(airy_eval(cplx(0, -64.5)), phq::airy::UnsupportedArgument);
  CHECK_THROWS_AS(airy_eval(cplx(std::nan(""), 0)), std::domain_error);
  CHECK_NOTHROW(airy_eval(-64.0));
}

TEST_CASE("airy_zero matches mpmath for n = 1..100") {
  for (int n = 1; n <= 100; ++n) {
    const auto z = airy_zero(n);
    CHECK(z.n == n);
    CHECK(std::abs(z.value - kZeros[n - 1]) <= 4e-15 * std::abs(kZeros[n - 1]));
    CHECK(std::abs(airy_eval(z.value).ai) < 1e-13);
  }
}

TEST_CASE("airy_zero is strictly decreasing with interlaced spacing") {
  for (int n = 1; n < 100; ++n) CHECK(airy_zero(n + 1).value < airy_zero(n).value);
  for (int n = 2; n < 100; ++n) {
    const double d1 = airy_zero(n).value - airy_zero(n + 1).value;
    const double d0 = airy_zero(n - 1).value - airy_zero(n).value;
    CHECK(d1 < d0);
  }
}

TEST_CASE("airy_zero index bounds") {
  CHECK_THROWS_AS(airy_zero(0), std::out_of_range);
  CHECK_THROWS_AS(airy_zero(101), std::out_of_range);
  CHECK_THROWS_AS(airy_zero(-3), std::out_of_range);
}

TEST_CASE("airy_norm_sq equals Ai'(a_n)^2") {
  for (int n : {1, 2, 3, 10, 40}) {
    const double d = airy_eval(airy_zero(n).value).ai_prime.real();
    CHECK(phq::airy::airy_norm_sq(n) == doctest::Approx(d * d).epsilon(1e-11));
  }
}
