#pragma once

#include <complex>
#include <stdexcept>

namespace phq::airy {

using cplx = std::complex<double>;

/// Largest |z| accepted by airy_eval. Covers the first 100 negative zeros
/// (a_100 ~ -60.46) with room for bracketing.
inline constexpr double kMaxArgument = 64.0;

/// Radius below which the lattice of local Taylor expansions (seeded by an
/// extended-precision Maclaurin series) is used; asymptotic expansions beyond.
inline constexpr double kSwitchRadius = 9.0;

inline constexpr int kMaxZeroIndex = 100;

class UnsupportedArgument : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct AiryValue {
  cplx ai;
  cplx ai_prime;
};

struct AiryZero {
  int n;         // 1-based
  double value;  // negative
};

/// Ai(z) and Ai'(z) for |z| <= kMaxArgument.
/// Relative accuracy ~1e-14 except in the immediate neighbourhood of zeros.
AiryValue airy_eval(cplx z);

/// n-th negative real zero of Ai, 1 <= n <= kMaxZeroIndex.
/// Throws std::out_of_range otherwise.
AiryZero airy_zero(int n);

/// Integral of Ai(x + a_n)^2 over x in (0, inf) by adaptive quadrature.
/// Equals Ai'(a_n)^2.
double airy_norm_sq(int n);

namespace detail {

// Individual evaluation routes, exposed for overlap tests.
AiryValue maclaurin(cplx z);        // double-double Maclaurin series
AiryValue local_taylor(cplx z);     // Taylor expansion about nearest lattice node
AiryValue asymptotic(cplx z);       // large-|z| expansions with sector choice
double zero_initial_guess(int n);   // asymptotic formula for a_n

}  // namespace detail

}  // namespace phq::airy
