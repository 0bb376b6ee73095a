#pragma once

// Metric-modified uncertainty relation for the Airy eigenstates: moments,
// variances by the eta route and by the rho psi route, the commutator bound,
// and the CSV / SVG report of the variances against n.

#include <complex>
#include <ostream>
#include <string>
#include <vector>

#include "phq/invariant.hpp"
#include "phq/overlap.hpp"
#include "phq/weyl.hpp"

namespace phq::uncertainty {

using cplx = std::complex<double>;
using invariant::VerificationFailure;

struct Moments {
  double mean_x = 0.0;
  double mean_x2 = 0.0;
  double mean_p = 0.0;
  double mean_p2 = 0.0;
};

/// Moments of Ai(x + a_n) / Ai'(a_n) on (0, inf) by quadrature.
Moments moments_airy(int n);
/// -2a/3, 8a^2/15, 0, -a/3.
Moments moments_closed_form(int n);

struct UncertaintyReport {
  int n = 0;
  double a_n = 0.0;
  double mean_x = 0.0, mean_x2 = 0.0, mean_p = 0.0, mean_p2 = 0.0;  // quadrature
  double var_x = 0.0;       // 4 a^2 / 45
  double var_p = 0.0;       // -a / 3
  double product = 0.0;     // sqrt(var_x var_p)
  double product_quadrature = 0.0;  // from the quadrature moments
  double bound = 0.25;      // (1/4) |<[X, P]>|^2 with [X, P] = i, normalized state
};

/// Closed-form variances with the quadrature moments alongside. Throws
/// VerificationFailure if product != sqrt(-4 a^3 / 135) to 1e-12 or product <= 1/2.
UncertaintyReport uncertainty_product(int n);

enum class Observable { X, P };

weyl::WeylPolynomial observable_polynomial(Observable a);

struct VarianceRoutes {
  cplx eta_route;  // <A psi|eta A psi> - <psi|eta A psi><A psi|eta psi>, normalized
  cplx rho_route;  // <phi|A^2 phi> - <phi|A phi>^2 with phi = rho psi, normalized
};

/// Both routes for A~ = rho^{-1} A rho on the eigenstate n at time t.
VarianceRoutes variance_routes(const weyl::WeylPolynomial& a, const invariant::Scenario& s,
                               double t, int n, Domain domain = Domain::comoving);

/// Real variance; throws VerificationFailure if the routes differ by more than
/// 1e-8 (relative to max(1, |value|)).
double pseudo_variance(Observable a, const invariant::Scenario& s, double t, int n,
                       Domain domain = Domain::comoving);
double pseudo_variance(const weyl::WeylPolynomial& a, const invariant::Scenario& s, double t,
                       int n, Domain domain = Domain::comoving);

struct BoundSides {
  double lhs;  // (Delta A)^2 (Delta B)^2
  double rhs;  // (1/4) |<psi|eta [A~, B~] psi>|^2 / <psi|eta psi>^2
};

/// Both sides with the commutator formed symbolically. Throws
/// VerificationFailure if lhs < rhs - 1e-10.
BoundSides generic_uncertainty_bound(const weyl::WeylPolynomial& a, const weyl::WeylPolynomial& b,
                                     const invariant::Scenario& s, double t, int n,
                                     Domain domain = Domain::comoving);

/// Reports for n = 1..n_max.
std::vector<UncertaintyReport> report_table(int n_max);

/// Columns n, a_n, var_x, var_p, product, bound; 12 significant digits.
void write_report_csv(std::ostream& out, const std::vector<UncertaintyReport>& rows);

/// Polyline plot of var_x, var_p and product against n.
std::string report_svg(const std::vector<UncertaintyReport>& rows);

}  // namespace phq::uncertainty
