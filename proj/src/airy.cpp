#include "phq/airy.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "phq/quadrature.hpp"

namespace phq::airy {
namespace {

// ---------------------------------------------------------------------------
// Double-double arithmetic (about 32 significant digits), used only inside the
// Maclaurin series where the two Bi-like halves cancel.
struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

inline DD quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DD operator+(DD a, DD b) {
  DD s = two_sum(a.hi, b.hi);
  const DD t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline DD operator-(DD a) { return {-a.hi, -a.lo}; }
inline DD operator-(DD a, DD b) { return a + (-b); }

inline DD operator*(DD a, DD b) {
  const double p = a.hi * b.hi;
  double e = std::fma(a.hi, b.hi, -p);
  e += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p, e);
}

inline DD operator/(DD a, double b) {
  const double q1 = a.hi / b;
  const double p = q1 * b;
  const double pe = std::fma(q1, b, -p);
  const DD r = a - DD{p, pe};
  return quick_two_sum(q1, r.hi / b);
}

struct CDD {
  DD re, im;
};

inline CDD operator+(const CDD& a, const CDD& b) { return {a.re + b.re, a.im + b.im}; }
inline CDD operator-(const CDD& a, const CDD& b) { return {a.re - b.re, a.im - b.im}; }
inline CDD operator*(const CDD& a, const CDD& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline CDD operator*(const CDD& a, DD s) { return {a.re * s, a.im * s}; }
inline CDD operator/(const CDD& a, double s) { return {a.re / s, a.im / s}; }
inline double approx_abs(const CDD& a) { return std::abs(a.re.hi) + std::abs(a.im.hi); }
inline cplx to_cplx(const CDD& a) { return {a.re.hi + a.re.lo, a.im.hi + a.im.lo}; }

// Ai(0) and -Ai'(0) to double-double precision.
constexpr DD kAi0{0.3550280538878172, 2.05233632436212e-17};
constexpr DD kMinusAiPrime0{0.2588194037928068, -2.522243111610832e-17};

constexpr double kPi = std::numbers::pi;
const double kSqrtPi = std::sqrt(kPi);

// ---------------------------------------------------------------------------
// Coefficients of the large-argument expansions:
// u_k = u_{k-1} (6k-5)(6k-3)(6k-1) / ((2k-1) 216 k),  v_k = -(6k+1)/(6k-1) u_k.
constexpr int kAsymptoticTerms = 64;

struct AsymptoticTable {
  std::array<double, kAsymptoticTerms> u{};
  std::array<double, kAsymptoticTerms> v{};
  AsymptoticTable() {
    u[0] = 1.0;
    v[0] = 1.0;
    for (int k = 1; k < kAsymptoticTerms; ++k) {
      const double kk = k;
      u[k] = u[k - 1] * (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) / ((2 * kk - 1) * 216 * kk);
      v[k] = -(6 * kk + 1) / (6 * kk - 1) * u[k];
    }
  }
};

const AsymptoticTable& asymptotic_table() {
  static const AsymptoticTable table;
  return table;
}

// Sums sum_k (-1)^k c[first + step*k] zeta^{-(first + step*k)}, truncated at the
// smallest term (optimal truncation) or at double-precision convergence.
cplx asymptotic_sum(const std::array<double, kAsymptoticTerms>& c, int first, int step,
                    cplx inv_zeta) {
  cplx power = std::pow(inv_zeta, first);
  const cplx ratio = std::pow(inv_zeta, step);
  cplx sum = 0.0;
  double last = INFINITY;
  double sign = 1.0;
  for (int k = first; k < kAsymptoticTerms; k += step) {
    const cplx term = sign * c[k] * power;
    const double mag = std::abs(term);
    if (mag > last) break;
    sum += term;
    if (mag <= 1e-17 * std::abs(sum)) break;
    last = mag;
    power *= ratio;
    sign = -sign;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Lattice of (Ai, Ai') values at nodes spaced kLatticeStep apart covering the
// disk |z| <= kSwitchRadius + kLatticeStep.
constexpr double kLatticeStep = 0.5;
constexpr int kLatticeHalf = static_cast<int>((kSwitchRadius + 1.0) / kLatticeStep) + 1;
constexpr int kLatticeWidth = 2 * kLatticeHalf + 1;

struct Lattice {
  std::vector<AiryValue> nodes;
  Lattice() : nodes(static_cast<std::size_t>(kLatticeWidth * kLatticeWidth)) {
    for (int i = -kLatticeHalf; i <= kLatticeHalf; ++i) {
      for (int j = -kLatticeHalf; j <= kLatticeHalf; ++j) {
        const cplx c{i * kLatticeStep, j * kLatticeStep};
        if (std::abs(c) > kSwitchRadius + 1.0) continue;
        nodes[index(i, j)] = detail::maclaurin(c);
      }
    }
  }
  static std::size_t index(int i, int j) {
    return static_cast<std::size_t>((i + kLatticeHalf) * kLatticeWidth + (j + kLatticeHalf));
  }
};

const Lattice& lattice() {
  static const Lattice table;
  return table;
}

// ---------------------------------------------------------------------------
// Zero table, filled once on first use.
struct ZeroTable {
  std::array<double, kMaxZeroIndex> values{};
};

double refine_zero(int n) {
  const double guess = detail::zero_initial_guess(n);
  double lo = guess - 0.15;
  double hi = guess + 0.15;
  double f_lo = airy_eval(lo).ai.real();
  double f_hi = airy_eval(hi).ai.real();
  if (f_lo * f_hi > 0.0) {
    throw std::logic_error("Airy zero bracket lost sign change at n=" + std::to_string(n));
  }
  double x = guess;
  for (int iter = 0; iter < 100; ++iter) {
    const AiryValue v = airy_eval(x);
    const double f = v.ai.real();
    if (f == 0.0) return x;
    if ((f < 0.0) == (f_lo < 0.0)) {
      lo = x;
      f_lo = f;
    } else {
      hi = x;
      f_hi = f;
    }
    double next = x - f / v.ai_prime.real();
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 4e-16 * std::abs(x)) return next;
    x = next;
  }
  return x;
}

const ZeroTable& zero_table() {
  static const ZeroTable table = [] {
    ZeroTable t;
    for (int n = 1; n <= kMaxZeroIndex; ++n) t.values[static_cast<std::size_t>(n - 1)] = refine_zero(n);
    return t;
  }();
  return table;
}

}  // namespace

namespace detail {

AiryValue maclaurin(cplx z) {
  // Ai = Ai(0) f(z) + Ai'(0) g(z) with
  // f = sum 3^k (1/3)_k z^{3k}/(3k)!,  g = sum 3^k (2/3)_k z^{3k+1}/(3k+1)!.
  const CDD zz{{z.real(), 0.0}, {z.imag(), 0.0}};
  const CDD z3 = zz * zz * zz;
  CDD f_term{{1.0, 0.0}, {0.0, 0.0}};
  CDD g_term = zz;
  CDD fp_term = zz * zz / 2.0;  // k = 1 term of f'
  CDD gp_term{{1.0, 0.0}, {0.0, 0.0}};
  CDD f = f_term, g = g_term, fp = fp_term, gp = gp_term;
  double peak = std::max({approx_abs(f), approx_abs(g), approx_abs(fp), 1.0});
  for (int k = 0; k < 200; ++k) {
    const double k3 = 3.0 * k;
    f_term = f_term * z3 / ((k3 + 2) * (k3 + 3));
    g_term = g_term * z3 / ((k3 + 3) * (k3 + 4));
    gp_term = gp_term * z3 / ((k3 + 1) * (k3 + 3));
    fp_term = fp_term * z3 / ((k3 + 3) * (k3 + 5));
    f = f + f_term;
    g = g + g_term;
    fp = fp + fp_term;
    gp = gp + gp_term;
    const double largest = std::max({approx_abs(f_term), approx_abs(g_term),
                                     approx_abs(fp_term), approx_abs(gp_term)});
    peak = std::max(peak, largest);
    if (largest < 1e-34 * peak) break;
  }
  const CDD ai = f * kAi0 - g * kMinusAiPrime0;
  const CDD aip = fp * kAi0 - gp * kMinusAiPrime0;
  return {to_cplx(ai), to_cplx(aip)};
}

AiryValue local_taylor(cplx z) {
  const int i = static_cast<int>(std::lround(z.real() / kLatticeStep));
  const int j = static_cast<int>(std::lround(z.imag() / kLatticeStep));
  if (std::abs(i) > kLatticeHalf || std::abs(j) > kLatticeHalf) {
    throw UnsupportedArgument("local Taylor lattice does not cover this argument");
  }
  const cplx c{i * kLatticeStep, j * kLatticeStep};
  const AiryValue& node = lattice().nodes[Lattice::index(i, j)];
  const cplx h = z - c;
  const double scale = std::abs(node.ai) + std::abs(node.ai_prime);
  // y(c+h) = sum a_m h^m with a_m = (c a_{m-2} + a_{m-3}) / (m (m-1)).
  cplx a3 = 0.0;  // a_{m-3}
  cplx a2 = node.ai;
  cplx a1 = node.ai_prime;
  cplx value = a2 + a1 * h;
  cplx deriv = a1;
  cplx h_prev = h;  // h^{m-1}
  int small_run = 0;  // consecutive negligible terms; every third one vanishes at c = 0
  for (int m = 2; m < 90; ++m) {
    const cplx am = (c * a2 + a3) / (m * (m - 1.0));
    const cplx dterm = static_cast<double>(m) * am * h_prev;
    h_prev *= h;
    const cplx vterm = am * h_prev;
    value += vterm;
    deriv += dterm;
    a3 = a2;
    a2 = a1;
    a1 = am;
    small_run = std::abs(vterm) + std::abs(dterm) < 1e-18 * scale ? small_run + 1 : 0;
    if (small_run == 3) break;
  }
  return {value, deriv};
}

AiryValue asymptotic(cplx z) {
  const auto& tab = asymptotic_table();
  if (std::abs(std::arg(z)) <= 2.0 * kPi / 3.0) {
    const cplx sz = std::sqrt(z);
    const cplx zeta = (2.0 / 3.0) * z * sz;
    const cplx quarter = std::sqrt(sz);
    const cplx inv_zeta = 1.0 / zeta;
    const cplx e = std::exp(-zeta);
    const cplx su = asymptotic_sum(tab.u, 0, 1, inv_zeta);
    const cplx sv = asymptotic_sum(tab.v, 0, 1, inv_zeta);
    return {e / (2.0 * kSqrtPi * quarter) * su, -quarter * e / (2.0 * kSqrtPi) * sv};
  }
  // Oscillatory sector around the negative real axis: w = -z, |arg w| < pi/3.
  const cplx w = -z;
  const cplx sw = std::sqrt(w);
  const cplx zeta = (2.0 / 3.0) * w * sw;
  const cplx quarter = std::sqrt(sw);
  const cplx inv_zeta = 1.0 / zeta;
  const cplx pu = asymptotic_sum(tab.u, 0, 2, inv_zeta);
  const cplx qu = asymptotic_sum(tab.u, 1, 2, inv_zeta);
  const cplx pv = asymptotic_sum(tab.v, 0, 2, inv_zeta);
  const cplx qv = asymptotic_sum(tab.v, 1, 2, inv_zeta);
  const cplx theta = zeta - kPi / 4.0;
  const cplx c = std::cos(theta);
  const cplx s = std::sin(theta);
  return {(c * pu + s * qu) / (kSqrtPi * quarter), quarter / kSqrtPi * (s * pv - c * qv)};
}

double zero_initial_guess(int n) {
  const double t = 3.0 * kPi * (4.0 * n - 1.0) / 8.0;
  const double t2 = 1.0 / (t * t);
  const double series =
      1.0 + t2 * (5.0 / 48.0 +
                  t2 * (-5.0 / 36.0 + t2 * (77125.0 / 82944.0 + t2 * (-108056875.0 / 6967296.0))));
  return -std::pow(t, 2.0 / 3.0) * series;
}

}  // namespace detail

AiryValue airy_eval(cplx z) {
  const double r = std::abs(z);
  if (!std::isfinite(r) || r > kMaxArgument) {
    throw UnsupportedArgument("Airy argument outside |z| <= " + std::to_string(kMaxArgument));
  }
  AiryValue v = r < kSwitchRadius ? detail::local_taylor(z) : detail::asymptotic(z);
  if (z.imag() == 0.0) {
    v.ai = v.ai.real();
    v.ai_prime = v.ai_prime.real();
  }
  return v;
}

AiryZero airy_zero(int n) {
  if (n < 1 || n > kMaxZeroIndex) {
    throw std::out_of_range("Airy zero index must lie in [1, " + std::to_string(kMaxZeroIndex) +
                            "], got " + std::to_string(n));
  }
  return {n, zero_table().values[static_cast<std::size_t>(n - 1)]};
}

double airy_norm_sq(int n) {
  const double an = airy_zero(n).value;
  // Ai(16)^2 ~ 1e-38: the tail beyond is negligible at any requested tolerance.
  const double upper = 16.0 - an;
  std::vector<double> breaks;
  for (double x = 1.0; x < upper; x += 1.0) breaks.push_back(x);
  const auto integrand = [an](double x) {
    const double ai = airy_eval(x + an).ai.real();
    return ai * ai;
  };
  const auto res = quad::integrate(integrand, 0.0, upper, {1e-15, 1e-13, 4000}, breaks);
  return res.value;
}

}  // namespace phq::airy
