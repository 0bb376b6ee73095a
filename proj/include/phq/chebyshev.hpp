#pragma once

// Chebyshev interpolation on [a, b] from samples at first-kind nodes, with an
// exact antiderivative. Used to tabulate smooth rates once and integrate them.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace phq {

class Chebyshev {
 public:
  /// Nodes x_k = mid + half cos(pi (k + 1/2) / n), k = 0..n-1.
  static std::vector<double> nodes(double a, double b, int n) {
    std::vector<double> x(n);
    for (int k = 0; k < n; ++k) {
      x[k] = 0.5 * (a + b) + 0.5 * (b - a) * std::cos(std::numbers::pi * (k + 0.5) / n);
    }
    return x;
  }

  Chebyshev() = default;

  /// values[k] = f(nodes(a, b, n)[k]).
  Chebyshev(double a, double b, const std::vector<double>& values) : a_(a), b_(b) {
    const int n = static_cast<int>(values.size());
    if (n < 1 || !(b > a)) throw std::invalid_argument("Chebyshev: bad interval or sample set");
    c_.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += values[k] * std::cos(std::numbers::pi * j * (k + 0.5) / n);
      c_[j] = 2.0 * s / n;
    }
    c_[0] *= 0.5;
  }

  double operator()(double x) const {
    const double u = (2.0 * x - a_ - b_) / (b_ - a_);
    double b1 = 0.0, b2 = 0.0;
    for (int j = static_cast<int>(c_.size()) - 1; j >= 1; --j) {
      const double t = 2.0 * u * b1 - b2 + c_[j];
      b2 = b1;
      b1 = t;
    }
    return u * b1 - b2 + c_[0];
  }

  /// Antiderivative vanishing at a.
  Chebyshev integral() const {
    const int n = static_cast<int>(c_.size());
    std::vector<double> cc(c_);
    cc[0] *= 2.0;  // standard convention with halved leading term
    std::vector<double> ci(n + 1, 0.0);
    const double half = 0.25 * (b_ - a_);
    for (int j = 1; j <= n; ++j) {
      const double prev = cc[j - 1];
      const double next = j + 1 < n ? cc[j + 1] : 0.0;
      ci[j] = half * (prev - next) / j;
    }
    Chebyshev r;
    r.a_ = a_;
    r.b_ = b_;
    r.c_ = std::move(ci);
    r.c_[0] = 0.0;
    r.c_[0] = -r(a_);
    return r;
  }

  const std::vector<double>& coefficients() const { return c_; }
  double lower() const { return a_; }
  double upper() const { return b_; }

 private:
  double a_ = 0.0;
  double b_ = 1.0;
  std::vector<double> c_;
};

}  // namespace phq
