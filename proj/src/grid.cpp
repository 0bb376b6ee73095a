#include "phq/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace phq::grid {

namespace {

constexpr cplx kI{0.0, 1.0};

double dot_h(const std::vector<double>& a, const std::vector<double>& b, double h) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s * h;
}

}  // namespace

void GridSpec::validate() const {
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("grid: L must be positive");
  if (N < 16) throw std::invalid_argument("grid: N must be at least 16");
  if (N > kMaxPoints) {
    throw CapacityError("grid: N = " + std::to_string(N) + " exceeds " +
                        std::to_string(kMaxPoints));
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("grid: dt must be positive");
}

std::vector<cplx> Tridiagonal::apply(const std::vector<cplx>& v) const {
  const std::size_t n = size();
  std::vector<cplx> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    cplx s = diag[j] * v[j];
    if (j > 0) s += lower[j] * v[j - 1];
    if (j + 1 < n) s += upper[j] * v[j + 1];
    out[j] = s;
  }
  return out;
}

double Tridiagonal::norm_inf() const {
  double m = 0.0;
  for (std::size_t j = 0; j < size(); ++j) {
    m = std::max(m, std::abs(lower[j]) + std::abs(diag[j]) + std::abs(upper[j]));
  }
  return m;
}

template <class C>
std::vector<C> solve_impl(const Tridiagonal& m, std::vector<C> rhs) {
  const std::size_t n = m.size();
  if (rhs.size() != n) throw std::invalid_argument("tridiagonal solve: size mismatch");
  std::vector<C> dl(n > 0 ? n - 1 : 0), d(m.diag.begin(), m.diag.end()), du(n > 0 ? n - 1 : 0),
      du2(n > 1 ? n - 2 : 0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    dl[i] = C(m.lower[i + 1]);
    du[i] = C(m.upper[i]);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::norm(d[i]) >= std::norm(dl[i])) {
      if (d[i] == C{}) throw NumericalError("tridiagonal solve: singular pivot");
      const C fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      rhs[i + 1] -= fact * rhs[i];
      if (i + 2 < n) du2[i] = C{};
    } else {
      // swap rows i and i+1
      const C fact = d[i] / dl[i];
      const C d_next = d[i + 1];
      d[i] = dl[i];
      d[i + 1] = du[i] - fact * d_next;
      du[i] = d_next;
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -fact * du[i + 1];
      }
      const C r = rhs[i];
      rhs[i] = rhs[i + 1];
      rhs[i + 1] = r - fact * rhs[i + 1];
    }
  }
  if (n == 0) return rhs;
  if (d[n - 1] == C{}) throw NumericalError("tridiagonal solve: singular pivot");
  rhs[n - 1] /= d[n - 1];
  if (n > 1) rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / d[n - 2];
  for (std::size_t k = n > 2 ? n - 2 : 0; k-- > 0;) {
    rhs[k] = (rhs[k] - du[k] * rhs[k + 1] - du2[k] * rhs[k + 2]) / d[k];
  }
  return rhs;
}

std::vector<cplx> solve(const Tridiagonal& m, std::vector<cplx> rhs) {
  return solve_impl(m, std::move(rhs));
}

Tridiagonal operator_matrix(const weyl::WeylPolynomial& t, const GridSpec& spec) {
  spec.validate();
  const int n = spec.N;
  const double h = spec.h();
  Tridiagonal m{std::vector<cplx>(n), std::vector<cplx>(n), std::vector<cplx>(n)};
  for (const auto& [key, c] : t.terms()) {
    const auto [jx, kp] = key;
    if (kp > 2) throw std::invalid_argument("operator_matrix: p^k with k > 2 is not tridiagonal");
    // stencil weights (left, centre, right) of p^kp
    cplx wl, wc, wr;
    if (kp == 0) {
      wl = 0.0, wc = 1.0, wr = 0.0;
    } else if (kp == 1) {
      wl = kI / (2.0 * h), wc = 0.0, wr = -kI / (2.0 * h);
    } else {
      wl = -1.0 / (h * h), wc = 2.0 / (h * h), wr = -1.0 / (h * h);
    }
    for (int j = 0; j < n; ++j) {
      cplx row = c;
      for (int e = 0; e < jx; ++e) row *= spec.x(j + 1);
      m.lower[j] += row * wl;
      m.diag[j] += row * wc;
      m.upper[j] += row * wr;
    }
  }
  return m;
}

Tridiagonal operator_matrix(Operator which, const GridSpec& spec, const invariant::Scenario& s,
                            double t) {
  using weyl::WeylPolynomial;
  switch (which) {
    case Operator::x: return operator_matrix(WeylPolynomial::x(), spec);
    case Operator::p: return operator_matrix(WeylPolynomial::p(), spec);
    case Operator::p2: return operator_matrix(WeylPolynomial::monomial(0, 2), spec);
    case Operator::H: return operator_matrix(invariant::build_hamiltonian(s, t), spec);
    case Operator::I_ph:
      return operator_matrix(invariant::build_invariant(invariant::coefficients(s, t)), spec);
    case Operator::I_h:
      return operator_matrix(invariant::hermitized_invariant(invariant::coefficients(s, t)), spec);
  }
  throw std::invalid_argument("operator_matrix: unknown operator");
}

SpectralResult eigensolve_triangular(const GridSpec& spec, double shift, int count) {
  spec.validate();
  if (count < 1 || count > spec.N) throw std::invalid_argument("eigensolve: bad eigenpair count");
  const int n = spec.N;
  const double h = spec.h();
  const double off = -1.0 / (h * h);
  std::vector<double> diag(n);
  for (int j = 0; j < n; ++j) diag[j] = 2.0 / (h * h) + spec.x(j + 1) + shift;

  auto count_below = [&](double lambda) {
    int neg = 0;
    double q = 1.0;
    for (int j = 0; j < n; ++j) {
      q = diag[j] - lambda - (j > 0 ? off * off / q : 0.0);
      if (q == 0.0) q = -std::numeric_limits<double>::min();
      if (q < 0.0) ++neg;
    }
    return neg;
  };

  double glo = diag[0], ghi = diag[0];
  for (int j = 0; j < n; ++j) {
    glo = std::min(glo, diag[j] - 2.0 * std::abs(off));
    ghi = std::max(ghi, diag[j] + 2.0 * std::abs(off));
  }

  SpectralResult out;
  out.matrix_norm = std::max(std::abs(glo), std::abs(ghi));
  Tridiagonal m{std::vector<cplx>(n, off), std::vector<cplx>(n), std::vector<cplx>(n, off)};

  for (int k = 0; k < count; ++k) {
    double lo = glo, hi = ghi;
    for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() *
                                              std::max(std::abs(lo), std::abs(hi));
         ++it) {
      const double mid = 0.5 * (lo + hi);
      if (count_below(mid) <= k) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double lambda = 0.5 * (lo + hi);
    out.eigenvalues.push_back(lambda);

    // inverse iteration on M - sigma, sigma nudged off the eigenvalue
    const double sigma = lambda + 1e-10 * std::max(1.0, std::abs(lambda));
    for (int j = 0; j < n; ++j) m.diag[j] = diag[j] - sigma;
    std::vector<double> v(n);
    for (int j = 0; j < n; ++j) v[j] = 1.0 + 0.5 * std::sin(0.37 * j + k);
    double resid = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < 20; ++it) {
      std::vector<cplx> rhs(v.begin(), v.end());
      const std::vector<cplx> w = solve(m, rhs);
      for (int j = 0; j < n; ++j) v[j] = w[j].real();
      for (const auto& u : out.eigenvectors) {
        const double proj = dot_h(u, v, h);
        for (int j = 0; j < n; ++j) v[j] -= proj * u[j];
      }
      const double nv = std::sqrt(dot_h(v, v, h));
      for (double& e : v) e /= nv;
      double r2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double mv = diag[j] * v[j];
        if (j > 0) mv += off * v[j - 1];
        if (j + 1 < n) mv += off * v[j + 1];
        r2 += (mv - lambda * v[j]) * (mv - lambda * v[j]);
      }
      resid = std::sqrt(r2 * h);
      if (it >= 2 && resid <= 1e-10 * out.matrix_norm) break;
    }
    if (!(resid <= 1e-10 * out.matrix_norm)) {
      throw NumericalError("inverse iteration did not converge for eigenpair " +
                               std::to_string(k + 1),
                           it);
    }
    if (v[0] < 0.0) {
      for (double& e : v) e = -e;
    }
    out.eigenvectors.push_back(std::move(v));
    out.residuals.push_back(resid);
  }
  return out;
}

std::vector<GridState> propagate(const invariant::Scenario& s, const GridState& initial,
                                 double t_final, const PropagateOptions& options) {
  const GridSpec& spec = initial.spec;
  spec.validate();
  const int n = spec.N;
  if (static_cast<int>(initial.values.size()) != n) {
    throw std::invalid_argument("propagate: state size does not match the grid");
  }
  if (t_final < initial.t) throw std::invalid_argument("propagate: t_final before initial time");
  const bool trace = options.boundary == Boundary::analytic_trace;
  if (trace && !options.trace) {
    throw std::invalid_argument("propagate: analytic_trace needs a trace function");
  }

  const double span = t_final - initial.t;
  const long steps = span == 0.0 ? 0 : static_cast<long>(std::ceil(span / spec.dt - 1e-9));
  const double dt = steps > 0 ? span / steps : 0.0;

  std::vector<GridState> out{initial};
  std::vector<cplx> psi = initial.values;
  double t = initial.t;
  cplx left = trace ? options.trace(t, 0.0) : cplx{};
  cplx right = trace ? options.trace(t, spec.L) : cplx{};

  for (long k = 0; k < steps; ++k) {
    const double t_next = initial.t + (k + 1) * dt;
    const Tridiagonal hm = operator_matrix(invariant::build_hamiltonian(s, t + 0.5 * dt), spec);
    const cplx w = 0.5 * dt * kI;
    Tridiagonal a = hm;
    for (int j = 0; j < n; ++j) {
      a.lower[j] *= w;
      a.upper[j] *= w;
      a.diag[j] = 1.0 + w * a.diag[j];
    }
    // psi' = A^{-1} (2 - A) psi = 2 A^{-1} psi - psi: one solve, fewer
    // roundings than forming (1 - wH) psi, which keeps the Hermitian case
    // unitary to near machine precision.
    std::vector<cplx> rhs = psi;
    if (trace) {
      const cplx left_next = options.trace(t_next, 0.0);
      const cplx right_next = options.trace(t_next, spec.L);
      rhs[0] -= 0.5 * w * hm.lower[0] * (left + left_next);
      rhs[n - 1] -= 0.5 * w * hm.upper[n - 1] * (right + right_next);
      left = left_next;
      right = right_next;
    }
    // One step of iterative refinement with an extended-precision residual;
    // without it elimination roundoff biases the norm by ~4e-16 per step.
    std::vector<cplx> chi = solve(a, rhs);
    std::vector<cplx> r(n);
    for (int j = 0; j < n; ++j) {
      using ext = std::complex<long double>;
      ext acc = ext(rhs[j]) - ext(a.diag[j]) * ext(chi[j]);
      if (j > 0) acc -= ext(a.lower[j]) * ext(chi[j - 1]);
      if (j + 1 < n) acc -= ext(a.upper[j]) * ext(chi[j + 1]);
      r[j] = cplx(acc);
    }
    const std::vector<cplx> delta = solve(a, std::move(r));
    for (int j = 0; j < n; ++j) psi[j] = 2.0 * (chi[j] + delta[j]) - psi[j];
    t = t_next;
    const bool last = k + 1 == steps;
    if (!last && options.sample_every > 0 && (k + 1) % options.sample_every == 0) {
      out.push_back(GridState{spec, psi, t});
    }
  }
  if (steps > 0) out.push_back(GridState{spec, psi, t});
  return out;
}

GridState sample(const invariant::LrSolution& sol, const GridSpec& spec, double t) {
  spec.validate();
  const AiryWave w = sol.wave(t);
  GridState g{spec, std::vector<cplx>(spec.N), t};
  for (int j = 0; j < spec.N; ++j) g.values[j] = w(spec.x(j + 1));
  return g;
}

double norm_sq(const GridState& s) {
  double sum = 0.0;
  for (const cplx& v : s.values) sum += std::norm(v);
  return sum * s.spec.h();
}

double relative_l2_deviation(const GridState& a, const GridState& b, double x_lo, double x_hi) {
  if (a.values.size() != b.values.size()) throw std::invalid_argument("deviation: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < a.values.size(); ++j) {
    const double x = b.spec.x(static_cast<int>(j) + 1);
    if (x < x_lo || x > x_hi) continue;
    num += std::norm(a.values[j] - b.values[j]);
    den += std::norm(b.values[j]);
  }
  return std::sqrt(num / den);
}

double tdse_residual(const invariant::LrSolution& sol, double t, const GridSpec& spec) {
  spec.validate();
  const auto& s = sol.scenario();
  constexpr double ht = 1e-5;
  const int n = spec.N;
  const double h = spec.h();

  std::vector<std::pair<AiryWave, double>> stencil;
  if (t - ht >= 0.0 && t + ht <= s.horizon) {
    stencil = {{sol.wave(t + ht), 0.5 / ht}, {sol.wave(t - ht), -0.5 / ht}};
  } else if (t - ht < 0.0) {
    stencil = {{sol.wave(t), -1.5 / ht}, {sol.wave(t + ht), 2.0 / ht},
               {sol.wave(t + 2 * ht), -0.5 / ht}};
  } else {
    stencil = {{sol.wave(t), 1.5 / ht}, {sol.wave(t - ht), -2.0 / ht},
               {sol.wave(t - 2 * ht), 0.5 / ht}};
  }
  const AiryWave now = sol.wave(t);

  std::vector<cplx> psi(n + 2);
  for (int j = 0; j <= n + 1; ++j) psi[j] = now(spec.x(j));

  const double inv_2m = 0.5 / s.m(t);
  const cplx ifx = kI * s.f(t);
  double num = 0.0, den = 0.0;
  for (int j = 4; j <= n - 3; ++j) {
    const double x = spec.x(j);
    cplx dt{};
    for (const auto& [w, c] : stencil) dt += c * w(x);
    const cplx d2 = (-psi[j - 2] + 16.0 * psi[j - 1] - 30.0 * psi[j] + 16.0 * psi[j + 1] -
                     psi[j + 2]) /
                    (12.0 * h * h);
    const cplx hpsi = -inv_2m * d2 + ifx * x * psi[j];
    num += std::norm(kI * dt - hpsi);
    den += std::norm(hpsi);
  }
  return std::sqrt(num / den);
}

double tdse_residual(const invariant::Scenario& s, int n, double t, const GridSpec& spec) {
  return tdse_residual(invariant::LrSolution(s, n), t, spec);
}

cplx eta_inner_product(const invariant::Scenario& s, double t, const weyl::AnalyticFunction& psi_a,
                       const weyl::AnalyticFunction& psi_b, double x_max) {
  const weyl::WeylDisplacement eta = invariant::build_metric(invariant::coefficients(s, t));
  auto f = [&](cplx z) { return std::conj(psi_a(z)) * weyl::apply_displacement(eta, psi_b, z); };
  return path_integral(f, Path{0.0, x_max});
}

cplx eta_inner_product(const invariant::Scenario& s, double t, const AiryWave& psi_a,
                       const AiryWave& psi_b, Domain domain) {
  const weyl::WeylDisplacement eta = invariant::build_metric(invariant::coefficients(s, t));
  return overlap(psi_a, psi_b.displaced(eta), domain);
}

void write_trajectory_csv(std::ostream& out, const std::vector<GridState>& trajectory,
                          int stride) {
  if (stride < 1) stride = 1;
  out << "t,x,re,im,abs2\n";
  char buf[160];
  for (const GridState& g : trajectory) {
    for (std::size_t j = 0; j < g.values.size(); j += stride) {
      const cplx v = g.values[j];
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g\n", g.t,
                    g.spec.x(static_cast<int>(j) + 1), v.real(), v.imag(), std::norm(v));
      out << buf;
    }
  }
}

}  // namespace phq::grid
