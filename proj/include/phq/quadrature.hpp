#pragma once

// Globally adaptive Gauss-Kronrod (G10/K21) quadrature over finite intervals.
// Works for any value type closed under +, - and scaling by double whose
// size is measured by phq::quad::magnitude (real, complex, fixed arrays).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace phq::quad {

struct Tolerance {
  double abs = 1e-12;
  double rel = 1e-10;
  int max_intervals = 4000;
  // Also accept error <= rel_l1 * int |f|; for integrals that cancel to ~0.
  double rel_l1 = 0.0;
};

class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, double estimate, double error)
      : std::runtime_error(what + " (estimate " + std::to_string(estimate) +
                           ", error " + std::to_string(error) + ")"),
        estimate_(estimate),
        error_(error) {}
  double estimate() const noexcept { return estimate_; }
  double error() const noexcept { return error_; }

 private:
  double estimate_;
  double error_;
};

template <class V>
struct Result {
  V value;
  double error;
  int evaluations;
};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
template <class T, std::size_t N>
double magnitude(const std::array<T, N>& v) {
  double m = 0.0;
  for (const auto& e : v) m = std::max(m, magnitude(e));
  return m;
}

template <class T, std::size_t N>
std::array<T, N> operator+(std::array<T, N> a, const std::array<T, N>& b) {
  for (std::size_t i = 0; i < N; ++i) a[i] += b[i];
  return a;
}
template <class T, std::size_t N>
std::array<T, N> operator-(std::array<T, N> a, const std::array<T, N>& b) {
  for (std::size_t i = 0; i < N; ++i) a[i] -= b[i];
  return a;
}
template <class T, std::size_t N>
std::array<T, N> operator*(std::array<T, N> a, double s) {
  for (auto& e : a) e *= s;
  return a;
}

namespace detail {

// Kronrod 21-point abscissae (positive half, descending) and weights;
// Gauss 10-point weights at the odd-indexed Kronrod nodes.
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077715867051918, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class V>
struct Panel {
  double a, b;
  V value;
  double error;
  double l1;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
auto gk21(F& f, double a, double b) {
  using V = decltype(f(a));
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  V fc = f(c);
  V kron = fc * kWgk[10];
  V gauss{};
  double l1 = magnitude(fc) * kWgk[10];
  for (int j = 0; j < 10; ++j) {
    const double dx = h * kXgk[j];
    V f1 = f(c - dx);
    V f2 = f(c + dx);
    V s = f1 + f2;
    kron = kron + s * kWgk[j];
    l1 += (magnitude(f1) + magnitude(f2)) * kWgk[j];
    if (j % 2 == 1) gauss = gauss + s * kWg[j / 2];
  }
  V value = kron * h;
  double err = magnitude((kron - gauss) * h);
  return Panel<V>{a, b, value, err, l1 * h};
}

}  // namespace detail

/// Integrates f over [a, b]. Optional interior breakpoints seed the panel list.
/// Throws NumericalFailure when the tolerance cannot be met within
/// tol.max_intervals panels.
template <class F>
auto integrate(F&& f, double a, double b, const Tolerance& tol = {},
               std::span<const double> breakpoints = {}) {
  using V = decltype(f(a));
  using Panel = detail::Panel<V>;
  std::vector<double> cuts{a};
  for (double x : breakpoints)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  std::priority_queue<Panel> heap;
  int evals = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    heap.push(detail::gk21(f, cuts[i], cuts[i + 1]));
    evals += 21;
  }
  auto totals = [&heap]() {
    auto copy = heap;
    V sum{};
    double err = 0.0;
    double l1 = 0.0;
    while (!copy.empty()) {
      sum = sum + copy.top().value;
      err += copy.top().error;
      l1 += copy.top().l1;
      copy.pop();
    }
    return std::tuple<V, double, double>{sum, err, l1};
  };
  if (heap.empty()) return Result<V>{V{}, 0.0, 0};

  // Running sums avoid re-walking the heap every iteration.
  V sum{};
  double err = 0.0;
  double l1 = 0.0;
  std::tie(sum, err, l1) = totals();
  int panels = static_cast<int>(heap.size());
  while (err > std::max({tol.abs, tol.rel * magnitude(sum), tol.rel_l1 * l1})) {
    if (panels >= tol.max_intervals) {
      throw NumericalFailure("adaptive quadrature did not converge", magnitude(sum), err);
    }
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw NumericalFailure("adaptive quadrature reached interval resolution limit",
                             magnitude(sum), err);
    }
    Panel left = detail::gk21(f, worst.a, mid);
    Panel right = detail::gk21(f, mid, worst.b);
    evals += 42;
    sum = sum - worst.value + left.value + right.value;
    err = err - worst.error + left.error + right.error;
    l1 = l1 - worst.l1 + left.l1 + right.l1;
    heap.push(left);
    heap.push(right);
    ++panels;
    if (panels % 64 == 0) std::tie(sum, err, l1) = totals();
  }
  std::tie(sum, err, l1) = totals();
  return Result<V>{sum, err, evals};
}

}  // namespace phq::quad
