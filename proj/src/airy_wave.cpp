#include "phq/airy_wave.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "phq/airy.hpp"

namespace phq {

namespace {

using cplx = std::complex<double>;
using Poly = AiryWave::Poly;
constexpr cplx kI{0.0, 1.0};

void trim(Poly& p) {
  while (!p.empty() && p.back() == cplx{}) p.pop_back();
}

cplx horner(const Poly& p, cplx z) {
  cplx v{};
  for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * z + *it;
  return v;
}

Poly deriv(const Poly& p) {
  Poly d;
  for (std::size_t k = 1; k < p.size(); ++k) d.push_back(static_cast<double>(k) * p[k]);
  return d;
}

Poly mul_z(const Poly& p) {
  if (p.empty()) return {};
  Poly r(p.size() + 1);
  std::copy(p.begin(), p.end(), r.begin() + 1);
  return r;
}

Poly add(Poly a, const Poly& b, cplx wb = 1.0) {
  if (a.size() < b.size()) a.resize(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) a[k] += wb * b[k];
  trim(a);
  return a;
}

Poly scale(Poly p, cplx s) {
  for (auto& c : p) c *= s;
  trim(p);
  return p;
}

// q(z) = p(z + delta)
Poly shift_arg(const Poly& p, cplx delta) {
  const std::size_t n = p.size();
  Poly q(n);
  for (std::size_t k = 0; k < n; ++k) {
    // p[k] (z + delta)^k = p[k] sum_j C(k,j) z^j delta^{k-j}
    double binom = 1.0;
    for (std::size_t j = 0; j <= k; ++j) {
      if (j > 0) binom = binom * static_cast<double>(k - j + 1) / static_cast<double>(j);
      q[j] += p[k] * binom * std::pow(delta, static_cast<int>(k - j));
    }
  }
  trim(q);
  return q;
}

}  // namespace

AiryWave::AiryWave(cplx amplitude, cplx rate, cplx shift, Poly p, Poly q, double anchor)
    : amplitude_(amplitude), rate_(rate), shift_(shift), p_(std::move(p)), q_(std::move(q)),
      anchor_(anchor) {
  trim(p_);
  trim(q_);
}

AiryWave AiryWave::bound_state(int n) {
  const double an = airy::airy_zero(n).value;
  const double norm = airy::airy_eval(an).ai_prime.real();
  return AiryWave(1.0 / norm, 0.0, an, Poly{1.0}, Poly{}, an);
}

cplx AiryWave::operator()(cplx z) const {
  if (amplitude_ == cplx{} || (p_.empty() && q_.empty())) return 0.0;
  const airy::AiryValue v = airy::airy_eval(z + shift_);
  cplx bracket{};
  if (!p_.empty()) bracket += horner(p_, z) * v.ai;
  if (!q_.empty()) bracket += horner(q_, z) * v.ai_prime;
  return amplitude_ * std::exp(rate_ * z) * bracket;
}

AiryWave AiryWave::derivative() const {
  // d/dz [P Ai + Q Ai'] with Ai'' = (z + s) Ai
  Poly zs_q = add(mul_z(q_), q_, shift_);
  Poly np = add(add(scale(p_, rate_), deriv(p_)), zs_q);
  Poly nq = add(add(scale(q_, rate_), p_), deriv(q_));
  return AiryWave(amplitude_, rate_, shift_, std::move(np), std::move(nq), anchor_);
}

AiryWave AiryWave::times_z() const {
  return AiryWave(amplitude_, rate_, shift_, mul_z(p_), mul_z(q_), anchor_);
}

AiryWave AiryWave::scaled(cplx s) const {
  return AiryWave(amplitude_ * s, rate_, shift_, p_, q_, anchor_);
}

AiryWave AiryWave::displaced(const weyl::WeylDisplacement& d) const {
  // D psi(z) = pref e^{-i mu nu/2} e^{mu z} psi(z - i nu)
  const cplx delta = -kI * d.nu;
  const cplx amp = amplitude_ * d.prefactor * std::exp(-0.5 * kI * d.mu * d.nu + rate_ * delta);
  return AiryWave(amp, rate_ + d.mu, shift_ + delta, shift_arg(p_, delta), shift_arg(q_, delta),
                  anchor_);
}

AiryWave AiryWave::reflected() const {
  Poly p = p_, q = q_;
  for (auto& c : p) c = std::conj(c);
  for (auto& c : q) c = std::conj(c);
  return AiryWave(std::conj(amplitude_), std::conj(rate_), std::conj(shift_), std::move(p),
                  std::move(q), anchor_);
}

AiryWave operator+(const AiryWave& a, const AiryWave& b) {
  if (a.amplitude_ == cplx{}) return b;
  if (b.amplitude_ == cplx{}) return a;
  const double scale_r = 1e-13 * std::max(1.0, std::abs(a.rate_));
  const double scale_s = 1e-13 * std::max(1.0, std::abs(a.shift_));
  if (std::abs(a.rate_ - b.rate_) > scale_r || std::abs(a.shift_ - b.shift_) > scale_s) {
    throw std::invalid_argument("AiryWave sum requires a common exponential rate and shift");
  }
  const cplx w = b.amplitude_ / a.amplitude_;
  return AiryWave(a.amplitude_, a.rate_, a.shift_, add(a.p_, b.p_, w), add(a.q_, b.q_, w),
                  a.anchor_);
}

weyl::AnalyticFunction AiryWave::as_function() const {
  return [w = *this](cplx z) { return w(z); };
}

AiryWave apply(const weyl::WeylPolynomial& t, const AiryWave& psi) {
  AiryWave out = psi.scaled(0.0);
  for (const auto& [key, c] : t.terms()) {
    AiryWave term = psi;
    for (int k = 0; k < key.second; ++k) term = term.derivative().scaled(-kI);
    for (int j = 0; j < key.first; ++j) term = term.times_z();
    out = out + term.scaled(c);
  }
  return out;
}

}  // namespace phq
