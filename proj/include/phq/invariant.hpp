#pragma once

// Time-dependent ingredients of the driven triangular well
//
//   H(t) = p^2 / (2 m(t)) + i f(t) x      on x > 0,
//
// the invariant I_ph = p^2 + x + (i a - b) p - c - i d, its metric, Dyson map,
// the unitary that reduces it to p^2 + x, the Lewis-Riesenfeld phase and the
// analytic solution built from Airy states.

#include <complex>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include "phq/airy_wave.hpp"
#include "phq/chebyshev.hpp"
#include "phq/weyl.hpp"

namespace phq::invariant {

using cplx = std::complex<double>;

class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class VerificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MassLaw {
  enum class Kind { constant, linear };
  Kind kind = Kind::constant;
  double m0 = 1.0;
  double mu = 0.0;  // m(t) = m0 + mu t for the linear law
};

struct DriveLaw {
  enum class Kind { constant, cosine };
  Kind kind = Kind::constant;
  double f0 = 0.0;
  double omega = 0.0;  // f(t) = f0 cos(omega t) for the cosine law
};

struct Scenario {
  MassLaw mass;
  DriveLaw drive;
  double horizon = 1.0;

  double m(double t) const;
  double f(double t) const;
  /// Throws ScenarioError unless m > 0 on [0, T], T > 0 and all parameters are finite.
  void validate() const;

  /// m0 = 1, f0 = 0.1, T = 1.
  static Scenario constant_preset(double f0 = 0.1);
  /// m0 = 1, f0 = 0.1 cos(2 pi t), T = 1.
  static Scenario cosine_preset(double f0 = 0.1);
  /// f = 0, m = 1.
  static Scenario free_well(double horizon = 1.0);
};

/// Strict JSON: {"mass": {"kind", "m0", "mu"?}, "drive": {"kind", "f0", "omega"?}, "horizon"}.
/// Unknown keys, missing keys and m(t) <= 0 raise ScenarioError.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& path);
std::string to_json(const Scenario& s);

struct CoefficientSet {
  double t = 0.0;
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  double K = 0.0;      // a^2 - b^2 - 4c
  double beta = 0.0;   // a b - 2 d
  double zeta = 0.0;   // a beta / 8
  double theta = 0.0;  // -(f/2)(a b / 2 - d)
  double chi = 0.0;    // K / (16 m)

  /// Fills K, beta, zeta, theta and chi from a, b, c, d, m and f.
  static CoefficientSet from_abcd(double t, double a, double b, double c, double d,
                                  double m = 1.0, double f = 0.0);
};

/// Closed forms with every antiderivative vanishing at t = 0:
/// a = 2 int f, b = int 1/m, c = int f a, d = int f b.
/// Throws std::domain_error for t outside [0, T].
CoefficientSet coefficients(const Scenario& s, double t);

/// Same quantities by adaptive quadrature of the defining rates.
CoefficientSet coefficients_by_quadrature(const Scenario& s, double t);

/// (a', b', c', d') = (2f, 1/m, f a, f b).
struct CoefficientRates {
  double a, b, c, d;
};
CoefficientRates coefficient_rates(const Scenario& s, double t);

weyl::WeylPolynomial build_invariant(const CoefficientSet& cs);
weyl::WeylPolynomial build_hamiltonian(const Scenario& s, double t);
/// eta = exp(-a x + beta p)
weyl::WeylDisplacement build_metric(const CoefficientSet& cs);
/// rho = exp(-(a/2) x + (beta/2) p), eta = rho^2
weyl::WeylDisplacement build_rho(const CoefficientSet& cs);
/// U = exp(i (b/2) x + i (K/4) p)
weyl::WeylDisplacement build_U(const CoefficientSet& cs);

/// p^2 + x - b p + a^2/4 - c.
weyl::WeylPolynomial hermitized_closed_form(const CoefficientSet& cs);
/// rho I_ph rho^{-1}, checked against the closed form; throws VerificationFailure.
weyl::WeylPolynomial hermitized_invariant(const CoefficientSet& cs);

/// dI/dt - i [I, H], normal-ordered. Vanishes identically for the closed forms.
weyl::WeylPolynomial von_neumann_residual(const Scenario& s, double t);

struct PhaseRecord {
  int n = 1;
  double t = 0.0;
  double epsilon = 0.0;
  double lambda = 0.0;  // -a_n
};

/// int_0^t (theta - chi - lambda/(2m)) dtau by adaptive quadrature.
PhaseRecord phase_closed_form(const Scenario& s, int n, double t);

/// The same integral with the sign of chi reversed; this is the rate that
/// makes the analytic state an exact solution.
PhaseRecord phase_rate_corrected(const Scenario& s, int n, double t);

/// Eigenstate of I_ph(t) without the phase: rho^{-1} U [Ai(x + a_n) / Ai'(a_n)].
AiryWave eigenstate(const CoefficientSet& cs, int n);

/// <psi|eta (i d/dt - H) psi> / <psi|eta psi> at time t, spatial integrals on
/// [0, inf), d/dt by central differences (one-sided near the ends of [0, T]).
double phase_rate_functional(const Scenario& s, int n, double t);

/// int_0^t of phase_rate_functional by adaptive quadrature.
PhaseRecord phase_from_functional(const Scenario& s, int n, double t);

/// Psi_n(x, t) = e^{i eps(t)} eigenstate(t) with eps from the functional rate.
/// The rate is tabulated once at Chebyshev nodes on [0, T] and integrated
/// exactly, so the phase is smooth in t.
class LrSolution {
 public:
  LrSolution(const Scenario& s, int n);

  const Scenario& scenario() const { return s_; }
  int n() const { return n_; }
  double phase(double t) const;
  double phase_rate(double t) const;
  AiryWave wave(double t) const;
  cplx operator()(double t, cplx x) const { return wave(t)(x); }

 private:
  Scenario s_;
  int n_;
  Chebyshev rate_;
  Chebyshev phase_;
};

/// Psi_n(x, t); x >= 0.
cplx analytic_wavefunction(const Scenario& s, int n, double t, double x);

}  // namespace phq::invariant
