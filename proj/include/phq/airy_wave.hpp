#pragma once

// Closed family of analytic wavefunctions
//
//   psi(z) = A e^{r z} [ P(z) Ai(z + s) + Q(z) Ai'(z + s) ]
//
// with polynomials P, Q. The family is closed under d/dz, multiplication by z
// and Weyl displacements, so H psi, eta psi, rho psi, ... are all exact members
// and can be evaluated at complex arguments without finite differences.

#include <complex>
#include <vector>

#include "phq/weyl.hpp"

namespace phq {

class AiryWave {
 public:
  using cplx = std::complex<double>;
  using Poly = std::vector<cplx>;  // ascending coefficients

  AiryWave(cplx amplitude, cplx rate, cplx shift, Poly p, Poly q, double anchor);

  /// Ai(z + a_n) / Ai'(a_n), vanishing at z = 0.
  static AiryWave bound_state(int n);

  cplx operator()(cplx z) const;

  AiryWave derivative() const;
  AiryWave times_z() const;
  AiryWave scaled(cplx s) const;
  /// prefactor e^{mu x + nu p} applied with p = -i d/dz.
  AiryWave displaced(const weyl::WeylDisplacement& d) const;
  /// z -> conj(psi(conj z)); agrees with conj(psi) on the real axis and is the
  /// analytic continuation of the bra.
  AiryWave reflected() const;

  /// Sum of two waves in the same frame (equal rate and shift).
  friend AiryWave operator+(const AiryWave& a, const AiryWave& b);

  cplx amplitude() const { return amplitude_; }
  cplx rate() const { return rate_; }
  cplx shift() const { return shift_; }
  const Poly& p_poly() const { return p_; }
  const Poly& q_poly() const { return q_; }
  /// Airy argument of the node that sits on the wall at t = 0 (a zero a_n).
  double anchor() const { return anchor_; }
  /// Point z where z + shift = anchor: the wall carried along by the shift.
  cplx comoving_wall() const { return anchor_ - shift_; }

  weyl::AnalyticFunction as_function() const;

 private:
  cplx amplitude_;
  cplx rate_;
  cplx shift_;
  Poly p_;
  Poly q_;
  double anchor_;
};

/// T psi for a normal-ordered polynomial T (x^j p^k acts as z^j (-i d/dz)^k).
AiryWave apply(const weyl::WeylPolynomial& t, const AiryWave& psi);

}  // namespace phq
