#include "phq/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "phq/airy.hpp"
#include "phq/grid.hpp"
#include "phq/uncertainty.hpp"
#include "phq/weyl.hpp"

namespace phq::verify {

namespace {

using invariant::CoefficientSet;
using invariant::Scenario;
using weyl::WeylDisplacement;
using weyl::WeylPolynomial;
using cplx = std::complex<double>;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double round12(double v) { return std::isfinite(v) ? std::strtod(fmt(v).c_str(), nullptr) : v; }

Check upper(std::string id, double measured, double tol, std::string note = {}) {
  return {std::move(id), measured, tol, "<=", measured <= tol, std::move(note)};
}

Check lower(std::string id, double measured, double tol, std::string note = {}) {
  return {std::move(id), measured, tol, ">", measured > tol, std::move(note)};
}

std::vector<Scenario> default_scenarios(const Options& o) {
  if (o.scenario) return {*o.scenario};
  return {Scenario::constant_preset(), Scenario::cosine_preset()};
}

std::mt19937_64 rng() { return std::mt19937_64(0x5eed1234u); }

CoefficientSet random_cs(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double a = u(g), b = u(g), c = u(g), d = u(g);
  return CoefficientSet::from_abcd(0.0, a, b, c, d);
}

WeylPolynomial random_poly(std::mt19937_64& g, int degree) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  WeylPolynomial p;
  for (int j = 0; j <= degree; ++j) {
    for (int k = 0; j + k <= degree; ++k) p += WeylPolynomial::monomial(j, k, cplx(u(g), u(g)));
  }
  return p;
}

// ---------------------------------------------------------------- symbolic

VerificationReport symbolic_suite(const Options&) {
  VerificationReport r;
  r.suite = "symbolic";
  auto g = rng();

  {
    const CoefficientSet cs = CoefficientSet::from_abcd(0, 1, 2, 3, 4);
    const WeylPolynomial expected = WeylPolynomial::monomial(0, 2) + WeylPolynomial::x() +
                                    WeylPolynomial::monomial(0, 1, cplx(-2, -1)) +
                                    WeylPolynomial::constant(cplx(-3, 4));
    r.checks.push_back(upper("dagger_of_invariant",
                             weyl::distance(weyl::dagger(invariant::build_invariant(cs)), expected),
                             1e-13));
  }

  double pseudo = 0.0, metric = 0.0, herm = 0.0, chain = 0.0, printed = 0.0;
  for (int i = 0; i < 100; ++i) {
    const CoefficientSet cs = random_cs(g);
    const WeylPolynomial inv = invariant::build_invariant(cs);
    pseudo = std::max(pseudo, weyl::distance(weyl::conjugate(invariant::build_metric(cs), inv),
                                             weyl::dagger(inv)));
    const weyl::MetricParameters mp = weyl::solve_metric_parameters(inv);
    metric = std::max({metric, std::abs(mp.alpha + cs.a), std::abs(mp.beta - cs.beta)});
    const WeylPolynomial ih = weyl::conjugate(invariant::build_rho(cs), inv);
    herm = std::max(herm, weyl::distance(ih, invariant::hermitized_closed_form(cs)));
    const WeylPolynomial target = WeylPolynomial::monomial(0, 2) + WeylPolynomial::x();
    chain = std::max(chain,
                     weyl::distance(weyl::conjugate(invariant::build_U(cs).inverse(), ih), target));
    printed = std::max(printed,
                       weyl::distance(weyl::conjugate(invariant::build_U(cs), inv), target));
  }
  r.checks.push_back(upper("pseudo_hermiticity_eta_I_eta_inv_eq_I_dagger", pseudo, 1e-13,
                           "100 random (a,b,c,d)"));
  r.checks.push_back(upper("metric_parameters_alpha_beta", metric, 1e-13,
                           "solve_metric_parameters vs (-a, ab - 2d)"));
  r.checks.push_back(upper("hermitized_invariant_closed_form", herm, 1e-13));
  r.checks.push_back(upper("U_inverse_I_h_U_eq_p2_plus_x", chain, 1e-13));
  r.errata.push_back("U I_ph U^-1 = p^2 + x does not hold: max coefficient residual " +
                     fmt(printed) + " over the same samples. Verified instead: U^-1 I_h U = p^2 + x.");

  double jacobi = 0.0, antisym = 0.0;
  for (int i = 0; i < 50; ++i) {
    const WeylPolynomial a = random_poly(g, 2), b = random_poly(g, 2), c = random_poly(g, 2);
    const WeylPolynomial j = weyl::commutator(a, weyl::commutator(b, c)) +
                             weyl::commutator(b, weyl::commutator(c, a)) +
                             weyl::commutator(c, weyl::commutator(a, b));
    jacobi = std::max(jacobi, j.max_abs());
    antisym = std::max(antisym, (weyl::commutator(a, b) + weyl::commutator(b, a)).max_abs());
  }
  r.checks.push_back(upper("commutator_jacobi_identity", jacobi, 1e-13));
  r.checks.push_back(upper("commutator_antisymmetry", antisym, 1e-13));

  // displacement algebra against function composition
  const weyl::AnalyticFunction test_fn = [](cplx z) { return std::exp(-(z - 1.0) * (z - 1.0)); };
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  double compose_err = 0.0, rho_sq = 0.0;
  for (int i = 0; i < 50; ++i) {
    const WeylDisplacement d1{cplx(u(g), u(g)), cplx(u(g), u(g)), 1.0};
    const WeylDisplacement d2{cplx(u(g), u(g)), cplx(u(g), u(g)), 1.0};
    const auto nested = weyl::displaced(d1, weyl::displaced(d2, test_fn));
    const auto joint = weyl::displaced(weyl::compose(d1, d2), test_fn);
    const CoefficientSet cs = random_cs(g);
    const WeylDisplacement rho = invariant::build_rho(cs);
    const auto rho_rho = weyl::displaced(rho, weyl::displaced(rho, test_fn));
    const auto eta = weyl::displaced(invariant::build_metric(cs), test_fn);
    for (double x : {0.3, 1.1, 2.7}) {
      compose_err = std::max(compose_err, std::abs(nested(x) - joint(x)) / std::abs(joint(x)));
      rho_sq = std::max(rho_sq, std::abs(rho_rho(x) - eta(x)) / std::abs(eta(x)));
    }
  }
  r.checks.push_back(upper("displacement_composition_law", compose_err, 1e-10,
                           "central factor exp(+i(mu1 nu2 - nu1 mu2)/2)"));
  r.checks.push_back(upper("rho_squared_eq_eta", rho_sq, 1e-12));
  return r;
}

// ---------------------------------------------------------------- ode

VerificationReport ode_suite(const Options& o) {
  VerificationReport r;
  r.suite = "ode";
  std::vector<Scenario> coeff_scenarios = default_scenarios(o);
  if (!o.scenario) {
    Scenario lin = Scenario::constant_preset();
    lin.mass = {invariant::MassLaw::Kind::linear, 1.0, 0.5};
    coeff_scenarios.push_back(lin);
    Scenario lin_cos = Scenario::cosine_preset();
    lin_cos.mass = lin.mass;
    coeff_scenarios.push_back(lin_cos);
  }

  double closed_vs_quad = 0.0, at_zero = 0.0;
  for (const Scenario& s : coeff_scenarios) {
    const CoefficientSet z = invariant::coefficients(s, 0.0);
    at_zero = std::max({at_zero, std::abs(z.a), std::abs(z.b), std::abs(z.c), std::abs(z.d),
                        std::abs(z.K), std::abs(z.beta), std::abs(z.zeta)});
    for (int k = 1; k <= 6; ++k) {
      const double t = s.horizon * k / 6.0;
      const CoefficientSet c = invariant::coefficients(s, t);
      const CoefficientSet q = invariant::coefficients_by_quadrature(s, t);
      for (auto [x, y] : {std::pair{c.a, q.a}, {c.b, q.b}, {c.c, q.c}, {c.d, q.d}}) {
        closed_vs_quad = std::max(closed_vs_quad, std::abs(x - y) / std::max(1e-3, std::abs(y)));
      }
    }
  }
  r.checks.push_back(upper("coefficients_closed_form_vs_quadrature", closed_vs_quad, 1e-10,
                           "relative, floor 1e-3"));
  r.checks.push_back(upper("coefficients_vanish_at_t0", at_zero, 0.0));

  double vn = 0.0;
  for (const Scenario& s : default_scenarios(o)) {
    for (int k = 1; k <= 20; ++k) {
      vn = std::max(vn, invariant::von_neumann_residual(s, s.horizon * k / 21.0).max_abs());
    }
  }
  r.checks.push_back(upper("von_neumann_residual", vn, 1e-12, "20 times per scenario"));

  double closed = 0.0, corrected = 0.0;
  for (const Scenario& s : default_scenarios(o)) {
    for (int n = 1; n <= 3; ++n) {
      for (double frac : {0.25, 0.5, 1.0}) {
        const double t = s.horizon * frac;
        const double ref = invariant::phase_from_functional(s, n, t).epsilon;
        closed = std::max(closed, std::abs(invariant::phase_closed_form(s, n, t).epsilon - ref));
        corrected =
            std::max(corrected, std::abs(invariant::phase_rate_corrected(s, n, t).epsilon - ref));
      }
    }
  }
  r.checks.push_back(upper("phase_closed_form_vs_functional", closed, 1e-6,
                           "closed form integrates theta - chi - lambda/2m"));
  r.checks.push_back(upper("phase_theta_plus_chi_vs_functional", corrected, 1e-6,
                           "same integral with +chi"));
  if (closed > 1e-6) {
    r.errata.push_back("Closed-form phase rate theta - chi - lambda/(2m) disagrees with the "
                       "defining functional <psi|eta(i d/dt - H)|psi> by up to " + fmt(closed) +
                       " rad; the functional matches theta + chi - lambda/(2m) to " +
                       fmt(corrected) + ". The functional is used as the phase.");
  }
  return r;
}

// ---------------------------------------------------------------- pde

VerificationReport pde_suite(const Options& o) {
  VerificationReport r;
  r.suite = "pde";
  const Scenario s = o.scenario ? *o.scenario : Scenario::constant_preset(0.05);
  const invariant::LrSolution sol(s, 1);

  double resid = 0.0;
  const grid::GridSpec fine{30.0, 8000, 1e-4};
  for (double frac : {0.0, 0.25, 0.5}) {
    resid = std::max(resid, grid::tdse_residual(sol, s.horizon * frac, fine));
  }
  r.checks.push_back(upper("tdse_residual_max", resid, 1e-6, "N=8000, L=30"));
  {
    const double r1 = grid::tdse_residual(sol, 0.5 * s.horizon, grid::GridSpec{30.0, 1000, 1e-4});
    const double r2 = grid::tdse_residual(sol, 0.5 * s.horizon, grid::GridSpec{30.0, 2001, 1e-4});
    r.checks.push_back(lower("tdse_residual_observed_order", std::log2(r1 / r2), 3.0,
                             "h halved from N=1000"));
  }
  for (double frac : {0.25, 0.5, 1.0}) {
    const double t = s.horizon * frac;
    r.diagnostics.push_back("|Psi(0, " + fmt(t) + ")| = " + fmt(std::abs(sol(t, 0.0))) +
                            " (wall value of the analytic solution)");
  }

  {
    const grid::GridSpec g{30.0, 4000, 1e-4};
    const grid::GridSpec g2{30.0, 8001, 1e-4};
    const grid::SpectralResult e1 = grid::eigensolve_triangular(g, 0.0, 5);
    const grid::SpectralResult e2 = grid::eigensolve_triangular(g2, 0.0, 5);
    double err = 0.0, rmin = 1e300, rmax = 0.0;
    for (int k = 0; k < 5; ++k) {
      const double exact = -airy::airy_zero(k + 1).value;
      const double d1 = e1.eigenvalues[k] - exact, d2 = e2.eigenvalues[k] - exact;
      err = std::max(err, std::abs(d1));
      rmin = std::min(rmin, d1 / d2);
      rmax = std::max(rmax, d1 / d2);
    }
    r.checks.push_back(upper("spectrum_vs_airy_zeros", err, 1e-4, "n <= 5, N=4000, L=30"));
    r.checks.push_back(lower("spectrum_convergence_ratio_min", rmin, 3.5));
    r.checks.push_back(upper("spectrum_convergence_ratio_max", rmax, 4.5));
  }

  {
    const grid::GridSpec g{30.0, 4000, 1e-4};
    const double t_final = std::min(0.5, s.horizon);
    grid::PropagateOptions po;
    po.boundary = grid::Boundary::analytic_trace;
    po.trace = [&sol](double t, double x) { return sol(t, x); };
    const auto traj = grid::propagate(s, grid::sample(sol, g, 0.0), t_final, po);
    const double dev = grid::relative_l2_deviation(traj.back(), grid::sample(sol, g, t_final),
                                                   4 * g.h(), g.L - 4 * g.h());
    r.checks.push_back(upper("crank_nicolson_vs_analytic", dev, 1e-3, "analytic_trace, N=4000"));

    const Scenario free = Scenario::free_well(t_final);
    const invariant::LrSolution free_sol(free, 1);
    const grid::GridState init = grid::sample(free_sol, g, 0.0);
    const auto ft = grid::propagate(free, init, t_final, grid::PropagateOptions{});
    r.checks.push_back(upper("crank_nicolson_hermitian_norm_drift",
                             std::abs(grid::norm_sq(ft.back()) / grid::norm_sq(init) - 1.0), 1e-12,
                             "f = 0, hard_wall"));
  }
  return r;
}

// ---------------------------------------------------------------- moments

VerificationReport moments_suite(const Options& o) {
  VerificationReport r;
  r.suite = "moments";
  double mom = 0.0;
  for (int n = 1; n <= 10; ++n) {
    const auto q = uncertainty::moments_airy(n);
    const auto c = uncertainty::moments_closed_form(n);
    mom = std::max({mom, std::abs(q.mean_x / c.mean_x - 1), std::abs(q.mean_x2 / c.mean_x2 - 1),
                    std::abs(q.mean_p2 / c.mean_p2 - 1), std::abs(q.mean_p)});
    const double vx = q.mean_x2 - q.mean_x * q.mean_x;
    const double a = airy::airy_zero(n).value;
    mom = std::max(mom, std::abs(vx / (4.0 * a * a / 45.0) - 1));
  }
  r.checks.push_back(upper("airy_moments_vs_closed_form", mom, 1e-8, "n <= 10, relative"));

  double prod_err = 0.0, prod_min = 1e300, mono = 1e300, square = 0.0;
  double prev = 0.0;
  for (int n = 1; n <= 50; ++n) {
    const auto rep = uncertainty::uncertainty_product(n);
    prod_err = std::max(prod_err, std::abs(rep.product_quadrature / rep.product - 1));
    prod_min = std::min(prod_min, rep.product);
    if (n > 1) mono = std::min(mono, rep.product - prev);
    prev = rep.product;
    const double a = rep.a_n;
    square = std::max(square, std::abs(rep.product * rep.product / (-4.0 / 135.0 * a * a * a) - 1));
  }
  r.checks.push_back(upper("uncertainty_product_quadrature_vs_closed", prod_err, 1e-8, "n <= 50"));
  r.checks.push_back(lower("uncertainty_product_min", prod_min, 0.5, "n <= 50"));
  r.checks.push_back(lower("uncertainty_product_increment_min", mono, 0.0));
  r.checks.push_back(upper("uncertainty_product_squared_identity", square, 1e-12, "relative"));

  double routes = 0.0, drift = 0.0;
  for (const Scenario& s : default_scenarios(o)) {
    for (int n = 1; n <= 3; ++n) {
      const double a = airy::airy_zero(n).value;
      for (double frac : {0.0, 0.5, 1.0}) {
        const double t = s.horizon * frac;
        for (auto obs : {uncertainty::Observable::X, uncertainty::Observable::P}) {
          const auto v = uncertainty::variance_routes(uncertainty::observable_polynomial(obs), s,
                                                      t, n);
          routes = std::max(routes, std::abs(v.eta_route - v.rho_route));
          const double closed =
              obs == uncertainty::Observable::X ? 4.0 * a * a / 45.0 : -a / 3.0;
          drift = std::max(drift, std::abs(v.eta_route - closed));
        }
      }
    }
  }
  r.checks.push_back(upper("variance_eta_route_vs_rho_route", routes, 1e-8,
                           "co-moving contour, n <= 3, t in {0, T/2, T}"));
  r.checks.push_back(upper("variance_time_independent", drift, 1e-8));

  double eta_lab = 0.0, eta_co = 0.0;
  for (const Scenario& s : default_scenarios(o)) {
    for (int n = 1; n <= 2; ++n) {
      for (int k = 0; k <= 10; ++k) {
        const double t = s.horizon * k / 10.0;
        const CoefficientSet cs = invariant::coefficients(s, t);
        const AiryWave psi = invariant::eigenstate(cs, n);
        eta_lab = std::max(eta_lab,
                           std::abs(grid::eta_inner_product(s, t, psi, psi, Domain::lab) - 1.0));
        eta_co = std::max(
            eta_co, std::abs(grid::eta_inner_product(s, t, psi, psi, Domain::comoving) - 1.0));
      }
    }
  }
  r.checks.push_back(upper("eta_norm_conservation", eta_lab, 1e-8,
                           "integral over x in [0, inf), 11 times, n = 1, 2"));
  r.diagnostics.push_back("eta norm on the co-moving contour: max |<psi|eta psi> - 1| = " +
                          fmt(eta_co));
  {
    const Scenario s = default_scenarios(o).front();
    const cplx ortho = grid::eta_inner_product(s, 0.0, AiryWave::bound_state(1),
                                               AiryWave::bound_state(2), Domain::lab);
    r.checks.push_back(upper("airy_states_orthogonal_t0", std::abs(ortho), 1e-8));
  }
  return r;
}

using SuiteFn = std::function<VerificationReport(const Options&)>;

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r = {
      {"symbolic", symbolic_suite},
      {"ode", ode_suite},
      {"pde", pde_suite},
      {"moments", moments_suite}};
  return r;
}

}  // namespace

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string VerificationReport::to_json() const {
  nlohmann::ordered_json j;
  j["suite"] = suite;
  j["status"] = passed() ? "pass" : "fail";
  j["checks"] = nlohmann::ordered_json::array();
  for (const Check& c : checks) {
    nlohmann::ordered_json e;
    e["id"] = c.id;
    e["status"] = c.pass ? "pass" : "fail";
    e["measured"] = round12(c.measured);
    e["relation"] = c.relation;
    e["tolerance"] = round12(c.tolerance);
    if (!c.note.empty()) e["note"] = c.note;
    j["checks"].push_back(e);
  }
  j["errata"] = errata;
  j["diagnostics"] = diagnostics;
  return j.dump(2) + "\n";
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : registry()) v.push_back(name);
    return v;
  }();
  return names;
}

int default_threads() {
  if (const char* env = std::getenv("PHQ_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 256L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

VerificationReport run_suite(const std::string& suite, const Options& options) {
  for (const auto& [name, fn] : registry()) {
    if (name == suite) return fn(options);
  }
  if (suite != "all") throw std::invalid_argument("unknown suite \"" + suite + "\"");

  const auto& reg = registry();
  std::vector<VerificationReport> parts(reg.size());
  const int threads = options.threads > 0 ? options.threads : default_threads();
  if (threads <= 1) {
    for (std::size_t i = 0; i < reg.size(); ++i) parts[i] = reg[i].second(options);
  } else {
    // Suites are independent; at most `threads` run at once, results kept in order.
    std::vector<std::exception_ptr> errors(reg.size());
    for (std::size_t begin = 0; begin < reg.size(); begin += threads) {
      std::vector<std::thread> pool;
      for (std::size_t i = begin; i < std::min(reg.size(), begin + threads); ++i) {
        pool.emplace_back([&, i] {
          try {
            parts[i] = reg[i].second(options);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  VerificationReport all;
  all.suite = "all";
  for (const VerificationReport& p : parts) {
    for (Check c : p.checks) {
      c.id = p.suite + "." + c.id;
      all.checks.push_back(std::move(c));
    }
    for (const auto& e : p.errata) all.errata.push_back(p.suite + ": " + e);
    for (const auto& d : p.diagnostics) all.diagnostics.push_back(p.suite + ": " + d);
  }
  return all;
}

}  // namespace phq::verify
