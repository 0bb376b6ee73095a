#include "phq/invariant.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "phq/airy.hpp"
#include "phq/overlap.hpp"
#include "phq/quadrature.hpp"

namespace phq::invariant {

namespace {

constexpr cplx kI{0.0, 1.0};
using weyl::WeylDisplacement;
using weyl::WeylPolynomial;

void check_time(const Scenario& s, double t) {
  const double slack = 1e-12 * std::max(1.0, s.horizon);
  if (!(t >= -slack && t <= s.horizon + slack)) {
    throw std::domain_error("time " + std::to_string(t) + " outside [0, " +
                            std::to_string(s.horizon) + "]");
  }
}

const quad::Tolerance kCoeffTol{1e-15, 1e-13, 4000};

// int_0^t log(1 + k tau) dtau = (U ln U - U + 1) / k with U = 1 + k t;
// series for small k t where the closed form cancels.
double int_log1p(double k, double t) {
  const double e = k * t;
  if (std::abs(e) < 0.1) {
    // (1/k) sum_{j>=2} (-1)^j e^j / (j (j - 1))
    double sum = 0.0, pw = e;
    for (int j = 2; j < 40; ++j) {
      pw *= e;
      const double term = ((j % 2 == 0) ? pw : -pw) / (j * (j - 1.0));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum / k;
  }
  const double u = 1.0 + e;
  return (u * std::log(u) - u + 1.0) / k;
}

double closed_b(const Scenario& s, double t) {
  const auto& m = s.mass;
  if (m.kind == MassLaw::Kind::linear && m.mu != 0.0) return std::log1p(m.mu * t / m.m0) / m.mu;
  return t / m.m0;
}

double closed_a(const Scenario& s, double t) {
  const auto& f = s.drive;
  if (f.kind == DriveLaw::Kind::cosine) return 2.0 * f.f0 * std::sin(f.omega * t) / f.omega;
  return 2.0 * f.f0 * t;
}

double closed_c(const Scenario& s, double t) {
  const auto& f = s.drive;
  if (f.kind == DriveLaw::Kind::cosine) {
    const double sn = std::sin(f.omega * t) / f.omega;
    return f.f0 * f.f0 * sn * sn;
  }
  return f.f0 * f.f0 * t * t;
}

double closed_d(const Scenario& s, double t) {
  const auto& m = s.mass;
  const auto& f = s.drive;
  const bool linear = m.kind == MassLaw::Kind::linear && m.mu != 0.0;
  if (f.kind == DriveLaw::Kind::constant) {
    if (!linear) return f.f0 * t * t / (2.0 * m.m0);
    return f.f0 / m.mu * int_log1p(m.mu / m.m0, t);
  }
  const double w = f.omega;
  if (!linear) {
    return f.f0 / m.m0 * (t * std::sin(w * t) / w + (std::cos(w * t) - 1.0) / (w * w));
  }
  // cosine drive with linear mass: no elementary antiderivative
  if (t == 0.0) return 0.0;
  auto rate = [&](double tau) { return s.f(tau) * closed_b(s, tau); };
  return quad::integrate(rate, 0.0, t, kCoeffTol).value;
}

double real_or_throw(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ScenarioError(where + ": missing key \"" + key + "\"");
  const auto& v = j.at(key);
  if (!v.is_number()) throw ScenarioError(where + "." + key + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ScenarioError(where + "." + key + ": not finite");
  return x;
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  if (!j.is_object()) throw ScenarioError(where + ": expected an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || item.key() == k;
    if (!ok) throw ScenarioError(where + ": unknown key \"" + item.key() + "\"");
  }
}

std::string kind_of(const nlohmann::json& j, const std::string& where) {
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    throw ScenarioError(where + ".kind: expected a string");
  }
  return j.at("kind").get<std::string>();
}

}  // namespace

// ---------------------------------------------------------------- Scenario

double Scenario::m(double t) const {
  return mass.kind == MassLaw::Kind::linear ? mass.m0 + mass.mu * t : mass.m0;
}

double Scenario::f(double t) const {
  return drive.kind == DriveLaw::Kind::cosine ? drive.f0 * std::cos(drive.omega * t) : drive.f0;
}

void Scenario::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(horizon) || horizon <= 0.0) throw ScenarioError("horizon must be positive");
  if (!finite(mass.m0) || !finite(mass.mu)) throw ScenarioError("mass parameters must be finite");
  if (!finite(drive.f0) || !finite(drive.omega)) {
    throw ScenarioError("drive parameters must be finite");
  }
  if (mass.m0 <= 0.0) throw ScenarioError("m0 must be positive");
  if (m(horizon) <= 0.0) throw ScenarioError("m(t) must stay positive on [0, T]");
  if (drive.kind == DriveLaw::Kind::cosine && drive.omega == 0.0) {
    throw ScenarioError("cosine drive needs a nonzero omega");
  }
}

Scenario Scenario::constant_preset(double f0) {
  Scenario s;
  s.mass = {MassLaw::Kind::constant, 1.0, 0.0};
  s.drive = {DriveLaw::Kind::constant, f0, 0.0};
  s.horizon = 1.0;
  return s;
}

Scenario Scenario::cosine_preset(double f0) {
  Scenario s;
  s.mass = {MassLaw::Kind::constant, 1.0, 0.0};
  s.drive = {DriveLaw::Kind::cosine, f0, 2.0 * std::numbers::pi};
  s.horizon = 1.0;
  return s;
}

Scenario Scenario::free_well(double horizon) {
  Scenario s = constant_preset(0.0);
  s.horizon = horizon;
  return s;
}

Scenario parse_scenario(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(std::string("malformed JSON: ") + e.what());
  }
  reject_unknown(j, {"mass", "drive", "horizon"}, "scenario");
  if (!j.contains("mass")) throw ScenarioError("scenario: missing key \"mass\"");
  if (!j.contains("drive")) throw ScenarioError("scenario: missing key \"drive\"");

  Scenario s;
  const auto& jm = j.at("mass");
  reject_unknown(jm, {"kind", "m0", "mu"}, "mass");
  const std::string mk = kind_of(jm, "mass");
  s.mass.m0 = real_or_throw(jm, "m0", "mass");
  if (mk == "constant") {
    if (jm.contains("mu")) throw ScenarioError("mass.mu: only valid for kind \"linear\"");
    s.mass.kind = MassLaw::Kind::constant;
  } else if (mk == "linear") {
    s.mass.kind = MassLaw::Kind::linear;
    s.mass.mu = real_or_throw(jm, "mu", "mass");
  } else {
    throw ScenarioError("mass.kind: expected \"constant\" or \"linear\", got \"" + mk + "\"");
  }

  const auto& jd = j.at("drive");
  reject_unknown(jd, {"kind", "f0", "omega"}, "drive");
  const std::string dk = kind_of(jd, "drive");
  s.drive.f0 = real_or_throw(jd, "f0", "drive");
  if (dk == "constant") {
    if (jd.contains("omega")) throw ScenarioError("drive.omega: only valid for kind \"cosine\"");
    s.drive.kind = DriveLaw::Kind::constant;
  } else if (dk == "cosine") {
    s.drive.kind = DriveLaw::Kind::cosine;
    s.drive.omega = real_or_throw(jd, "omega", "drive");
  } else {
    throw ScenarioError("drive.kind: expected \"constant\" or \"cosine\", got \"" + dk + "\"");
  }

  s.horizon = real_or_throw(j, "horizon", "scenario");
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot read scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string to_json(const Scenario& s) {
  nlohmann::ordered_json j;
  j["mass"]["kind"] = s.mass.kind == MassLaw::Kind::linear ? "linear" : "constant";
  j["mass"]["m0"] = s.mass.m0;
  if (s.mass.kind == MassLaw::Kind::linear) j["mass"]["mu"] = s.mass.mu;
  j["drive"]["kind"] = s.drive.kind == DriveLaw::Kind::cosine ? "cosine" : "constant";
  j["drive"]["f0"] = s.drive.f0;
  if (s.drive.kind == DriveLaw::Kind::cosine) j["drive"]["omega"] = s.drive.omega;
  j["horizon"] = s.horizon;
  return j.dump();
}

// ---------------------------------------------------------------- coefficients

CoefficientSet CoefficientSet::from_abcd(double t, double a, double b, double c, double d,
                                         double m, double f) {
  CoefficientSet cs;
  cs.t = t;
  cs.a = a;
  cs.b = b;
  cs.c = c;
  cs.d = d;
  cs.K = a * a - b * b - 4.0 * c;
  cs.beta = a * b - 2.0 * d;
  cs.zeta = a * cs.beta / 8.0;
  cs.theta = -0.5 * f * (0.5 * a * b - d);
  cs.chi = cs.K / (16.0 * m);
  return cs;
}

CoefficientSet coefficients(const Scenario& s, double t) {
  check_time(s, t);
  t = std::clamp(t, 0.0, s.horizon);
  return CoefficientSet::from_abcd(t, closed_a(s, t), closed_b(s, t), closed_c(s, t),
                                   closed_d(s, t), s.m(t), s.f(t));
}

CoefficientSet coefficients_by_quadrature(const Scenario& s, double t) {
  check_time(s, t);
  t = std::clamp(t, 0.0, s.horizon);
  if (t == 0.0) return CoefficientSet::from_abcd(0.0, 0, 0, 0, 0, s.m(0.0), s.f(0.0));
  auto a_of = [&](double tau) {
    if (tau == 0.0) return 0.0;
    return quad::integrate([&](double u) { return 2.0 * s.f(u); }, 0.0, tau, kCoeffTol).value;
  };
  auto b_of = [&](double tau) {
    if (tau == 0.0) return 0.0;
    return quad::integrate([&](double u) { return 1.0 / s.m(u); }, 0.0, tau, kCoeffTol).value;
  };
  const double a = a_of(t);
  const double b = b_of(t);
  const double c =
      quad::integrate([&](double u) { return s.f(u) * a_of(u); }, 0.0, t, kCoeffTol).value;
  const double d =
      quad::integrate([&](double u) { return s.f(u) * b_of(u); }, 0.0, t, kCoeffTol).value;
  return CoefficientSet::from_abcd(t, a, b, c, d, s.m(t), s.f(t));
}

CoefficientRates coefficient_rates(const Scenario& s, double t) {
  const CoefficientSet cs = coefficients(s, t);
  const double f = s.f(t);
  return {2.0 * f, 1.0 / s.m(t), f * cs.a, f * cs.b};
}

// ---------------------------------------------------------------- operators

WeylPolynomial build_invariant(const CoefficientSet& cs) {
  return WeylPolynomial::monomial(0, 2) + WeylPolynomial::x() +
         WeylPolynomial::monomial(0, 1, cplx(-cs.b, cs.a)) +
         WeylPolynomial::constant(cplx(-cs.c, -cs.d));
}

WeylPolynomial build_hamiltonian(const Scenario& s, double t) {
  return WeylPolynomial::monomial(0, 2, 0.5 / s.m(t)) +
         WeylPolynomial::monomial(1, 0, kI * s.f(t));
}

WeylDisplacement build_metric(const CoefficientSet& cs) { return {-cs.a, cs.beta, 1.0}; }

WeylDisplacement build_rho(const CoefficientSet& cs) { return {-0.5 * cs.a, 0.5 * cs.beta, 1.0}; }

WeylDisplacement build_U(const CoefficientSet& cs) {
  return {kI * (0.5 * cs.b), kI * (0.25 * cs.K), 1.0};
}

WeylPolynomial hermitized_closed_form(const CoefficientSet& cs) {
  return WeylPolynomial::monomial(0, 2) + WeylPolynomial::x() +
         WeylPolynomial::monomial(0, 1, -cs.b) +
         WeylPolynomial::constant(0.25 * cs.a * cs.a - cs.c);
}

WeylPolynomial hermitized_invariant(const CoefficientSet& cs) {
  const WeylPolynomial ih = weyl::conjugate(build_rho(cs), build_invariant(cs));
  const WeylPolynomial expected = hermitized_closed_form(cs);
  const double miss = weyl::distance(ih, expected);
  if (miss > 1e-13 * std::max(1.0, expected.max_abs())) {
    throw VerificationFailure("rho I_ph rho^-1 differs from the hermitized closed form by " +
                              std::to_string(miss));
  }
  return ih;
}

WeylPolynomial von_neumann_residual(const Scenario& s, double t) {
  const CoefficientSet cs = coefficients(s, t);
  const CoefficientRates r = coefficient_rates(s, t);
  const WeylPolynomial dI_dt = WeylPolynomial::monomial(0, 1, cplx(-r.b, r.a)) +
                               WeylPolynomial::constant(cplx(-r.c, -r.d));
  return dI_dt - kI * weyl::commutator(build_invariant(cs), build_hamiltonian(s, t));
}

// ---------------------------------------------------------------- phase

namespace {

double lambda_n(int n) { return -airy::airy_zero(n).value; }

PhaseRecord phase_with_chi_sign(const Scenario& s, int n, double t, double chi_sign) {
  check_time(s, t);
  PhaseRecord rec{n, t, 0.0, lambda_n(n)};
  if (t <= 0.0) return rec;
  auto rate = [&](double tau) {
    const CoefficientSet cs = coefficients(s, tau);
    return cs.theta + chi_sign * cs.chi - rec.lambda / (2.0 * s.m(tau));
  };
  rec.epsilon = quad::integrate(rate, 0.0, t, {1e-14, 1e-13, 4000}).value;
  return rec;
}

}  // namespace

PhaseRecord phase_closed_form(const Scenario& s, int n, double t) {
  return phase_with_chi_sign(s, n, t, -1.0);
}

PhaseRecord phase_rate_corrected(const Scenario& s, int n, double t) {
  return phase_with_chi_sign(s, n, t, +1.0);
}

AiryWave eigenstate(const CoefficientSet& cs, int n) {
  return AiryWave::bound_state(n).displaced(build_U(cs)).displaced(build_rho(cs).inverse());
}

double phase_rate_functional(const Scenario& s, int n, double t) {
  check_time(s, t);
  t = std::clamp(t, 0.0, s.horizon);
  constexpr double h = 1e-5;
  const CoefficientSet cs = coefficients(s, t);
  const WeylDisplacement eta = build_metric(cs);
  const AiryWave psi = eigenstate(cs, n);
  const AiryWave bra = psi.reflected();
  const AiryWave eta_psi = psi.displaced(eta);
  const AiryWave eta_h_psi = apply(build_hamiltonian(s, t), psi).displaced(eta);

  // d/dt stencil: central inside, second-order one-sided at the ends
  std::vector<std::pair<double, double>> stencil;
  if (t - h >= 0.0 && t + h <= s.horizon) {
    stencil = {{t + h, 0.5 / h}, {t - h, -0.5 / h}};
  } else if (t - h < 0.0) {
    stencil = {{t, -1.5 / h}, {t + h, 2.0 / h}, {t + 2 * h, -0.5 / h}};
  } else {
    stencil = {{t, 1.5 / h}, {t - h, -2.0 / h}, {t - 2 * h, 0.5 / h}};
  }
  std::vector<std::pair<AiryWave, double>> eta_psi_k;
  for (const auto& [tk, w] : stencil) {
    eta_psi_k.emplace_back(eigenstate(coefficients(s, tk), n).displaced(eta), w);
  }

  const cplx start{};
  double len = decay_length(start, {&bra, &eta_psi, &eta_h_psi});
  for (const auto& [wv, w] : eta_psi_k) len = std::max(len, decay_length(start, {&wv}));
  const Path path{start, len};

  // Integrating each stencil term separately keeps every quadrature smooth;
  // the 1/h amplification then only acts on converged integrals.
  cplx dt{};
  for (const auto& [wv, w] : eta_psi_k) {
    dt += w * path_integral([&](cplx z) { return bra(z) * wv(z); }, path);
  }
  const cplx h_term = path_integral([&](cplx z) { return bra(z) * eta_h_psi(z); }, path);
  const cplx num = kI * dt - h_term;
  const cplx den = path_integral([&](cplx z) { return bra(z) * eta_psi(z); }, path);
  return (num / den).real();
}

PhaseRecord phase_from_functional(const Scenario& s, int n, double t) {
  check_time(s, t);
  PhaseRecord rec{n, t, 0.0, lambda_n(n)};
  if (t <= 0.0) return rec;
  auto rate = [&](double tau) { return phase_rate_functional(s, n, tau); };
  rec.epsilon = quad::integrate(rate, 0.0, t, {1e-10, 1e-10, 400}).value;
  return rec;
}

LrSolution::LrSolution(const Scenario& s, int n) : s_(s), n_(n) {
  s_.validate();
  lambda_n(n);  // range check before the expensive part
  for (int nodes = 32;; nodes *= 2) {
    const auto ts = Chebyshev::nodes(0.0, s_.horizon, nodes);
    std::vector<double> v(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) v[k] = phase_rate_functional(s_, n_, ts[k]);
    rate_ = Chebyshev(0.0, s_.horizon, v);
    const auto& c = rate_.coefficients();
    double peak = 1.0;
    for (double x : c) peak = std::max(peak, std::abs(x));
    const double tail = std::max({std::abs(c[nodes - 1]), std::abs(c[nodes - 2]),
                                  std::abs(c[nodes - 3])});
    if (tail <= 1e-9 * peak || nodes >= 256) break;
  }
  phase_ = rate_.integral();
}

double LrSolution::phase(double t) const {
  check_time(s_, t);
  return t == 0.0 ? 0.0 : phase_(std::clamp(t, 0.0, s_.horizon));
}

double LrSolution::phase_rate(double t) const {
  check_time(s_, t);
  return rate_(std::clamp(t, 0.0, s_.horizon));
}

AiryWave LrSolution::wave(double t) const {
  const AiryWave psi = eigenstate(coefficients(s_, t), n_);
  const double eps = phase(t);
  return eps == 0.0 ? psi : psi.scaled(std::exp(kI * eps));
}

cplx analytic_wavefunction(const Scenario& s, int n, double t, double x) {
  if (x < 0.0) throw std::domain_error("analytic_wavefunction is defined for x >= 0");
  static std::mutex mu;
  static std::unordered_map<std::string, std::shared_ptr<const LrSolution>> cache;
  const std::string key = to_json(s) + "#" + std::to_string(n);
  std::shared_ptr<const LrSolution> sol;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) sol = it->second;
  }
  if (!sol) {
    auto fresh = std::make_shared<const LrSolution>(s, n);
    std::lock_guard<std::mutex> lock(mu);
    sol = cache.emplace(key, std::move(fresh)).first->second;
  }
  return (*sol)(t, x);
}

}  // namespace phq::invariant
