#pragma once

// Integrals of products of Airy-form waves along a ray z = start + u, u >= 0.
//
// On the lab domain the ray is the physical half-line [0, inf). On the
// co-moving domain the ray starts where the ket's Airy argument equals its
// anchor, i.e. the wall carried along by the complex shifts; there every Weyl
// displacement is an exact isometry between the two pairings.

#include <algorithm>
#include <complex>
#include <initializer_list>
#include <vector>

#include "phq/airy_wave.hpp"
#include "phq/quadrature.hpp"

namespace phq {

enum class Domain { lab, comoving };

struct Path {
  std::complex<double> start;
  double length;
};

inline quad::Tolerance overlap_tolerance() { return {1e-15, 1e-13, 20000, 1e-14}; }

/// Length of the ray beyond which every listed wave has Re(Airy argument) >= 16,
/// where Ai is below 1e-19 of its peak.
inline double decay_length(std::complex<double> start, std::initializer_list<const AiryWave*> waves) {
  double len = 4.0;
  for (const AiryWave* w : waves) len = std::max(len, 16.0 - (start + w->shift()).real());
  return len;
}

inline std::complex<double> path_start(Domain domain, const AiryWave& ket) {
  return domain == Domain::lab ? std::complex<double>{} : ket.comoving_wall();
}

/// int_0^length f(start + u) du with unit breakpoints.
template <class F>
std::complex<double> path_integral(F&& f, const Path& path,
                                   const quad::Tolerance& tol = overlap_tolerance()) {
  std::vector<double> cuts;
  for (double u = 1.0; u < path.length; u += 1.0) cuts.push_back(u);
  auto g = [&](double u) -> std::complex<double> { return f(path.start + u); };
  return quad::integrate(g, 0.0, path.length, tol, cuts).value;
}

/// <bra|ket> = int conj(bra) ket, continued analytically off the real axis.
inline std::complex<double> overlap(const AiryWave& bra, const AiryWave& ket,
                                    Domain domain = Domain::lab) {
  const AiryWave bra_bar = bra.reflected();
  const std::complex<double> start = path_start(domain, ket);
  const Path path{start, decay_length(start, {&bra_bar, &ket})};
  return path_integral([&](std::complex<double> z) { return bra_bar(z) * ket(z); }, path);
}

}  // namespace phq
