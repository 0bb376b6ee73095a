#pragma once

// Uniform half-line grid x_j = j h, j = 1..N, h = L / (N + 1), with Dirichlet
// points x_0 = 0 and x_{N+1} = L implied. Tridiagonal operators, eigenvalues
// of p^2 + x, Crank-Nicolson propagation and residual diagnostics.

#include <complex>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "phq/airy_wave.hpp"
#include "phq/invariant.hpp"
#include "phq/overlap.hpp"
#include "phq/weyl.hpp"

namespace phq::grid {

using cplx = std::complex<double>;

class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, int iterations = 0)
      : std::runtime_error(what), iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

struct GridSpec {
  static constexpr int kMaxPoints = 200000;
  double L = 30.0;
  int N = 4000;
  double dt = 1e-4;

  double h() const { return L / (N + 1); }
  double x(int j) const { return j * h(); }
  /// Throws std::invalid_argument for L <= 0, N < 16, dt <= 0; CapacityError above kMaxPoints.
  void validate() const;
};

struct GridState {
  GridSpec spec;
  std::vector<cplx> values;  // x_1 .. x_N
  double t = 0.0;
};

/// Row j couples to j-1 (lower[j]), j (diag[j]) and j+1 (upper[j]). lower[0]
/// and upper[N-1] multiply the boundary values x_0 and x_{N+1}.
struct Tridiagonal {
  std::vector<cplx> lower, diag, upper;

  std::size_t size() const { return diag.size(); }
  /// M v with zero boundary values.
  std::vector<cplx> apply(const std::vector<cplx>& v) const;
  /// Max row sum of |entries|.
  double norm_inf() const;
};

/// Solves M x = rhs by Gaussian elimination with partial pivoting.
/// Throws NumericalError on an exactly singular pivot.
std::vector<cplx> solve(const Tridiagonal& m, std::vector<cplx> rhs);

enum class Operator { x, p, p2, H, I_ph, I_h };

/// Second-order central differences. Terms x^j p^k with k <= 2 are supported;
/// higher powers of p are not tridiagonal and raise std::invalid_argument.
Tridiagonal operator_matrix(const weyl::WeylPolynomial& t, const GridSpec& spec);
Tridiagonal operator_matrix(Operator which, const GridSpec& spec, const invariant::Scenario& s,
                            double t);

struct SpectralResult {
  std::vector<double> eigenvalues;                // ascending
  std::vector<std::vector<double>> eigenvectors;  // sum_j v_j^2 h = 1, v_1 > 0
  std::vector<double> residuals;                  // ||M v - lambda v|| in the same norm
  double matrix_norm = 0.0;
};

/// Lowest `count` eigenpairs of p^2 + x + shift by Sturm bisection and inverse iteration.
SpectralResult eigensolve_triangular(const GridSpec& spec, double shift, int count = 5);

enum class Boundary { hard_wall, analytic_trace };

using TraceFunction = std::function<cplx(double t, double x)>;

struct PropagateOptions {
  Boundary boundary = Boundary::hard_wall;
  TraceFunction trace;   // required for analytic_trace
  int sample_every = 0;  // record every k-th step; 0 records only the ends
};

/// Crank-Nicolson with the midpoint Hamiltonian. Returns the initial state,
/// the sampled states and the final state, in time order.
std::vector<GridState> propagate(const invariant::Scenario& s, const GridState& initial,
                                 double t_final, const PropagateOptions& options);

/// Samples of Psi_n(., t) at the interior points.
GridState sample(const invariant::LrSolution& sol, const GridSpec& spec, double t);

/// Discrete L^2 norm squared sum |v_j|^2 h.
double norm_sq(const GridState& s);

/// || a - b || / || b || over x in [x_lo, x_hi].
double relative_l2_deviation(const GridState& a, const GridState& b, double x_lo, double x_hi);

/// Relative residual || i dPsi/dt - H Psi || / || H Psi || of the analytic
/// solution over [4h, L - 4h], with fourth-order spatial stencils and a time
/// step of 1e-5.
double tdse_residual(const invariant::LrSolution& sol, double t, const GridSpec& spec);
double tdse_residual(const invariant::Scenario& s, int n, double t, const GridSpec& spec);

/// int_0^x_max conj(psi_a) (eta psi_b) dx using weyl::apply_displacement.
cplx eta_inner_product(const invariant::Scenario& s, double t, const weyl::AnalyticFunction& psi_a,
                       const weyl::AnalyticFunction& psi_b, double x_max);
/// Same for Airy-form waves, with the cutoff chosen from their decay; the
/// domain selects the half-line or the co-moving ray.
cplx eta_inner_product(const invariant::Scenario& s, double t, const AiryWave& psi_a,
                       const AiryWave& psi_b, Domain domain = Domain::lab);

/// Columns t, x, re, im, abs2 with a header; t-major; 12 significant digits.
void write_trajectory_csv(std::ostream& out, const std::vector<GridState>& trajectory,
                          int stride = 1);

}  // namespace phq::grid
