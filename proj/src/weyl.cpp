#include "phq/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace phq::weyl {

namespace {

constexpr cplx kI{0.0, 1.0};

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// (-i)^k
cplx minus_i_pow(int k) {
  switch (k % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

std::string format_coeff(cplx c) {
  char buf[96];
  if (c.imag() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.12g", c.real());
  } else if (c.real() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.12gi", c.imag());
  } else {
    std::snprintf(buf, sizeof buf, "(%.12g%+.12gi)", c.real(), c.imag());
  }
  return buf;
}

std::string format_power(const char* sym, int k) {
  if (k == 0) return "";
  if (k == 1) return sym;
  return std::string(sym) + "^" + std::to_string(k);
}

}  // namespace

WeylPolynomial WeylPolynomial::constant(cplx c) { return monomial(0, 0, c); }
WeylPolynomial WeylPolynomial::x() { return monomial(1, 0); }
WeylPolynomial WeylPolynomial::p() { return monomial(0, 1); }

WeylPolynomial WeylPolynomial::monomial(int x_power, int p_power, cplx c) {
  if (x_power < 0 || p_power < 0) throw std::invalid_argument("negative exponent");
  WeylPolynomial r;
  r.add_term(x_power, p_power, c);
  return r;
}

void WeylPolynomial::add_term(int j, int k, cplx c) {
  if (c == cplx{}) return;
  if (j + k > kMaxDegree) {
    throw CapacityError("Weyl polynomial degree " + std::to_string(j + k) + " exceeds cap " +
                        std::to_string(kMaxDegree));
  }
  auto [it, inserted] = terms_.try_emplace(Key{j, k}, c);
  if (!inserted) {
    it->second += c;
    if (it->second == cplx{}) terms_.erase(it);
  }
}

cplx WeylPolynomial::coeff(int x_power, int p_power) const {
  auto it = terms_.find(Key{x_power, p_power});
  return it == terms_.end() ? cplx{} : it->second;
}

int WeylPolynomial::degree() const {
  int d = -1;
  for (const auto& [key, c] : terms_) d = std::max(d, key.first + key.second);
  return d;
}

double WeylPolynomial::max_abs() const {
  double m = 0.0;
  for (const auto& [key, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

WeylPolynomial& WeylPolynomial::operator+=(const WeylPolynomial& o) {
  for (const auto& [key, c] : o.terms_) add_term(key.first, key.second, c);
  return *this;
}

WeylPolynomial& WeylPolynomial::operator-=(const WeylPolynomial& o) {
  for (const auto& [key, c] : o.terms_) add_term(key.first, key.second, -c);
  return *this;
}

WeylPolynomial& WeylPolynomial::operator*=(cplx s) {
  if (s == cplx{}) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= s;
    if (it->second == cplx{}) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  return *this;
}

// x^a p^b x^c p^d = sum_k (-i)^k k! C(b,k) C(c,k) x^{a+c-k} p^{b+d-k}
WeylPolynomial operator*(const WeylPolynomial& l, const WeylPolynomial& r) {
  WeylPolynomial out;
  for (const auto& [lk, lc] : l.terms_) {
    for (const auto& [rk, rc] : r.terms_) {
      const int a = lk.first, b = lk.second, c = rk.first, d = rk.second;
      double fact = 1.0;
      for (int k = 0; k <= std::min(b, c); ++k) {
        if (k > 0) fact *= k;
        const cplx w = minus_i_pow(k) * (fact * binomial(b, k) * binomial(c, k));
        out.add_term(a + c - k, b + d - k, lc * rc * w);
      }
    }
  }
  return out;
}

std::string WeylPolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [key, c] : terms_) {
    if (!s.empty()) s += " + ";
    s += format_coeff(c);
    if (key.first > 0) s += " " + format_power("x", key.first);
    if (key.second > 0) s += " " + format_power("p", key.second);
  }
  return s;
}

double distance(const WeylPolynomial& a, const WeylPolynomial& b) { return (a - b).max_abs(); }

WeylPolynomial dagger(const WeylPolynomial& t) {
  WeylPolynomial out;
  for (const auto& [key, c] : t.terms()) {
    out += WeylPolynomial::monomial(0, key.second, std::conj(c)) *
           WeylPolynomial::monomial(key.first, 0);
  }
  return out;
}

WeylPolynomial commutator(const WeylPolynomial& a, const WeylPolynomial& b) {
  return a * b - b * a;
}

WeylPolynomial WeylDisplacement::generator() const {
  return WeylPolynomial::monomial(1, 0, mu) + WeylPolynomial::monomial(0, 1, nu);
}

WeylDisplacement WeylDisplacement::inverse() const { return {-mu, -nu, 1.0 / prefactor}; }

WeylDisplacement WeylDisplacement::adjoint() const {
  return {std::conj(mu), std::conj(nu), std::conj(prefactor)};
}

WeylDisplacement compose(const WeylDisplacement& d1, const WeylDisplacement& d2) {
  // [mu1 x + nu1 p, mu2 x + nu2 p] = i (mu1 nu2 - nu1 mu2)
  const cplx central = kI * (d1.mu * d2.nu - d1.nu * d2.mu);
  return {d1.mu + d2.mu, d1.nu + d2.nu, d1.prefactor * d2.prefactor * std::exp(0.5 * central)};
}

WeylPolynomial conjugate_by_exponential(const WeylPolynomial& generator, const WeylPolynomial& t) {
  if (generator.degree() > 1) {
    throw UnsupportedGenerator("adjoint series terminates only for generators linear in x, p");
  }
  WeylPolynomial out = t;
  WeylPolynomial term = t;
  const int deg = t.degree();
  for (int k = 1; k <= deg; ++k) {
    term = commutator(generator, term) * cplx(1.0 / k);
    out += term;
  }
  // ad_G lowers the degree by one, so the series stops after deg(T) steps.
  const WeylPolynomial next = commutator(generator, term);
  if (next.max_abs() > 1e-13 * std::max(1.0, term.max_abs())) {
    throw std::logic_error("adjoint series failed to terminate");
  }
  return out;
}

WeylPolynomial conjugate(const WeylDisplacement& d, const WeylPolynomial& t) {
  // The scalar prefactor commutes with everything and cancels.
  return conjugate_by_exponential(d.generator(), t);
}

MetricParameters solve_metric_parameters(const WeylPolynomial& inv) {
  for (const auto& [key, c] : inv.terms()) {
    const bool allowed = key == WeylPolynomial::Key{0, 2} || key == WeylPolynomial::Key{1, 0} ||
                         key == WeylPolynomial::Key{0, 1} || key == WeylPolynomial::Key{0, 0};
    if (!allowed) throw NoMetricOfThisForm("invariant is not of the form g1 p^2 + g2 x + g3 p + g4");
  }
  const cplx g1 = inv.coeff(0, 2);
  const cplx g2 = inv.coeff(1, 0);
  auto is_real = [](cplx v) { return std::abs(v.imag()) <= 1e-13 * std::max(1.0, std::abs(v)); };
  if (g1 == cplx{} || g2 == cplx{} || !is_real(g1) || !is_real(g2)) {
    throw NoMetricOfThisForm("p^2 and x coefficients must be real and nonzero");
  }

  const WeylPolynomial target = dagger(inv);
  auto residual = [&](double alpha, double beta) {
    return conjugate(WeylDisplacement{alpha, beta}, inv) - target;
  };

  // The p coefficient of the residual is affine in alpha and independent of
  // beta; the constant is affine in beta. Two probes each fix the lines.
  const cplx rp0 = residual(0.0, 0.0).coeff(0, 1);
  const cplx rp1 = residual(1.0, 0.0).coeff(0, 1);
  if (rp1 == rp0) throw NoMetricOfThisForm("p-coefficient equation is degenerate");
  const cplx alpha_c = -rp0 / (rp1 - rp0);
  if (!is_real(alpha_c)) throw NoMetricOfThisForm("no real alpha solves the p-coefficient equation");
  const double alpha = alpha_c.real();

  const cplx rc0 = residual(alpha, 0.0).coeff(0, 0);
  const cplx rc1 = residual(alpha, 1.0).coeff(0, 0);
  if (rc1 == rc0) throw NoMetricOfThisForm("constant-term equation is degenerate");
  const cplx beta_c = -rc0 / (rc1 - rc0);
  if (!is_real(beta_c)) throw NoMetricOfThisForm("no real beta solves the constant-term equation");
  const double beta = beta_c.real();

  const double miss = residual(alpha, beta).max_abs();
  if (miss > 1e-12 * std::max(1.0, inv.max_abs())) {
    throw NoMetricOfThisForm("coefficient system is inconsistent (residual " +
                             std::to_string(miss) + ")");
  }
  return {alpha, beta};
}

cplx apply_displacement(const WeylDisplacement& d, const AnalyticFunction& psi, cplx x) {
  return d.prefactor * std::exp(-0.5 * kI * d.mu * d.nu + d.mu * x) * psi(x - kI * d.nu);
}

AnalyticFunction displaced(const WeylDisplacement& d, AnalyticFunction psi) {
  return [d, psi = std::move(psi)](cplx x) { return apply_displacement(d, psi, x); };
}

}  // namespace phq::weyl
