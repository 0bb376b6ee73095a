#pragma once

// Exact algebra on the canonical pair (x, p), [x, p] = i.
//
// Polynomials are kept in normal order (every x to the left of every p), so a
// polynomial is a map (j, k) -> coefficient of x^j p^k and equality is a
// coefficient comparison. Exponentials of linear generators, exp(mu x + nu p),
// act by conjugation through a terminating adjoint series and on analytic
// wavefunctions by a multiplier and a complex argument shift.

#include <complex>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace phq::weyl {

using cplx = std::complex<double>;

class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class UnsupportedGenerator : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NoMetricOfThisForm : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class WeylPolynomial {
 public:
  static constexpr int kMaxDegree = 6;
  using Key = std::pair<int, int>;  // (power of x, power of p)

  WeylPolynomial() = default;

  static WeylPolynomial constant(cplx c);
  static WeylPolynomial x();
  static WeylPolynomial p();
  static WeylPolynomial monomial(int x_power, int p_power, cplx c = 1.0);

  cplx coeff(int x_power, int p_power) const;
  int degree() const;  // -1 for the zero polynomial
  bool is_zero() const { return terms_.empty(); }
  const std::map<Key, cplx>& terms() const { return terms_; }

  /// Largest coefficient magnitude; the norm used for "exact" comparisons.
  double max_abs() const;

  WeylPolynomial& operator+=(const WeylPolynomial& o);
  WeylPolynomial& operator-=(const WeylPolynomial& o);
  WeylPolynomial& operator*=(cplx s);

  friend WeylPolynomial operator+(WeylPolynomial a, const WeylPolynomial& b) { return a += b; }
  friend WeylPolynomial operator-(WeylPolynomial a, const WeylPolynomial& b) { return a -= b; }
  friend WeylPolynomial operator*(WeylPolynomial a, cplx s) { return a *= s; }
  friend WeylPolynomial operator*(cplx s, WeylPolynomial a) { return a *= s; }
  /// Operator product, re-expressed in normal order.
  friend WeylPolynomial operator*(const WeylPolynomial& a, const WeylPolynomial& b);

  bool operator==(const WeylPolynomial& o) const { return terms_ == o.terms_; }

  /// Deterministic text form, terms in lexicographic (j, k) order,
  /// e.g. "(-3-4i) + (-2+1i) p + 1 p^2 + 1 x".
  std::string to_string() const;

 private:
  void add_term(int j, int k, cplx c);
  std::map<Key, cplx> terms_;
};

/// Coefficient-wise distance max |a_jk - b_jk|.
double distance(const WeylPolynomial& a, const WeylPolynomial& b);

/// Formal adjoint with x, p self-adjoint.
WeylPolynomial dagger(const WeylPolynomial& t);

WeylPolynomial commutator(const WeylPolynomial& a, const WeylPolynomial& b);

/// prefactor * exp(mu x + nu p).
struct WeylDisplacement {
  cplx mu = 0.0;
  cplx nu = 0.0;
  cplx prefactor = 1.0;

  static WeylDisplacement identity() { return {}; }
  WeylPolynomial generator() const;
  WeylDisplacement inverse() const;
  /// Displacement with conjugated parameters; the adjoint when mu, nu are real.
  WeylDisplacement adjoint() const;
};

/// D1 * D2 = exp(G1) exp(G2) = exp(G1 + G2) exp([G1, G2] / 2).
WeylDisplacement compose(const WeylDisplacement& d1, const WeylDisplacement& d2);

/// D T D^{-1}, exact: sum_{k <= deg T} ad_G^k(T) / k!.
WeylPolynomial conjugate(const WeylDisplacement& d, const WeylPolynomial& t);

/// exp(G) T exp(-G) for a generator given as a polynomial. Only generators of
/// degree <= 1 have a terminating series; anything else throws
/// UnsupportedGenerator.
WeylPolynomial conjugate_by_exponential(const WeylPolynomial& generator, const WeylPolynomial& t);

struct MetricParameters {
  double alpha;  // coefficient of x
  double beta;   // coefficient of p
};

/// Real (alpha, beta) with exp(alpha x + beta p) I exp(-alpha x - beta p) = I^dagger,
/// for I = g1 p^2 + g2 x + g3 p + g4 with real g1, g2. Throws NoMetricOfThisForm
/// if I has another shape or the coefficient equations have no real solution.
MetricParameters solve_metric_parameters(const WeylPolynomial& invariant);

/// Complex-argument function handle (position representation).
using AnalyticFunction = std::function<cplx(cplx)>;

/// (D psi)(x) = prefactor e^{-i mu nu / 2} e^{mu x} psi(x - i nu), from p = -i d/dx.
cplx apply_displacement(const WeylDisplacement& d, const AnalyticFunction& psi, cplx x);

/// Handle for D psi.
AnalyticFunction displaced(const WeylDisplacement& d, AnalyticFunction psi);

}  // namespace phq::weyl
