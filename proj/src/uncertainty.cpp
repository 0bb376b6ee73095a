#include "phq/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "phq/airy.hpp"
#include "phq/airy_wave.hpp"

namespace phq::uncertainty {

namespace {

using weyl::WeylPolynomial;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Curve vertices at 1/100 pixel: the plot of a 12-digit CSV round trip is
// then byte-identical to the plot of the in-memory table.
std::string pixel(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

Moments moments_airy(int n) {
  const AiryWave psi = AiryWave::bound_state(n);
  const WeylPolynomial x = WeylPolynomial::x();
  const WeylPolynomial p = WeylPolynomial::p();
  const double norm = overlap(psi, psi).real();
  Moments m;
  m.mean_x = overlap(psi, apply(x, psi)).real() / norm;
  m.mean_x2 = overlap(psi, apply(x * x, psi)).real() / norm;
  m.mean_p = overlap(psi, apply(p, psi)).real() / norm + 0.0;  // no negative zero
  m.mean_p2 = overlap(psi, apply(p * p, psi)).real() / norm;
  return m;
}

Moments moments_closed_form(int n) {
  const double a = airy::airy_zero(n).value;
  return {-2.0 * a / 3.0, 8.0 * a * a / 15.0, 0.0, -a / 3.0};
}

UncertaintyReport uncertainty_product(int n) {
  UncertaintyReport r;
  r.n = n;
  r.a_n = airy::airy_zero(n).value;
  const Moments q = moments_airy(n);
  r.mean_x = q.mean_x;
  r.mean_x2 = q.mean_x2;
  r.mean_p = q.mean_p;
  r.mean_p2 = q.mean_p2;
  const double a = r.a_n;
  r.var_x = 4.0 * a * a / 45.0;
  r.var_p = -a / 3.0;
  r.product = std::sqrt(r.var_x * r.var_p);
  r.product_quadrature =
      std::sqrt((q.mean_x2 - q.mean_x * q.mean_x) * (q.mean_p2 - q.mean_p * q.mean_p));
  const double direct = std::sqrt(-4.0 * a * a * a / 135.0);
  if (std::abs(r.product - direct) > 1e-12 * direct) {
    throw VerificationFailure("product differs from sqrt(-4 a^3 / 135) for n = " +
                              std::to_string(n));
  }
  if (!(r.product > 0.5)) {
    throw VerificationFailure("uncertainty product not above 1/2 for n = " + std::to_string(n));
  }
  r.bound = 0.25;
  return r;
}

WeylPolynomial observable_polynomial(Observable a) {
  return a == Observable::X ? WeylPolynomial::x() : WeylPolynomial::p();
}

VarianceRoutes variance_routes(const WeylPolynomial& a, const invariant::Scenario& s, double t,
                               int n, Domain domain) {
  const invariant::CoefficientSet cs = invariant::coefficients(s, t);
  const weyl::WeylDisplacement rho = invariant::build_rho(cs);
  const weyl::WeylDisplacement eta = invariant::build_metric(cs);
  const WeylPolynomial a_tilde = weyl::conjugate(rho.inverse(), a);
  const AiryWave psi = invariant::eigenstate(cs, n);

  VarianceRoutes out;
  {
    const AiryWave a_psi = apply(a_tilde, psi);
    const AiryWave eta_psi = psi.displaced(eta);
    const AiryWave eta_a_psi = a_psi.displaced(eta);
    const cplx norm = overlap(psi, eta_psi, domain);
    const cplx second = overlap(a_psi, eta_a_psi, domain) / norm;
    const cplx left = overlap(psi, eta_a_psi, domain) / norm;
    const cplx right = overlap(a_psi, eta_psi, domain) / norm;
    out.eta_route = second - left * right;
  }
  {
    const AiryWave phi = psi.displaced(rho);
    const cplx norm = overlap(phi, phi, domain);
    const cplx second = overlap(phi, apply(a * a, phi), domain) / norm;
    const cplx first = overlap(phi, apply(a, phi), domain) / norm;
    out.rho_route = second - first * first;
  }
  return out;
}

double pseudo_variance(const WeylPolynomial& a, const invariant::Scenario& s, double t, int n,
                       Domain domain) {
  const VarianceRoutes r = variance_routes(a, s, t, n, domain);
  const double scale = std::max(1.0, std::abs(r.eta_route));
  if (std::abs(r.eta_route - r.rho_route) > 1e-8 * scale) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "eta route %.12g%+.12gi and rho psi route %.12g%+.12gi disagree",
                  r.eta_route.real(), r.eta_route.imag(), r.rho_route.real(), r.rho_route.imag());
    throw VerificationFailure(buf);
  }
  return r.eta_route.real();
}

double pseudo_variance(Observable a, const invariant::Scenario& s, double t, int n, Domain domain) {
  return pseudo_variance(observable_polynomial(a), s, t, n, domain);
}

BoundSides generic_uncertainty_bound(const WeylPolynomial& a, const WeylPolynomial& b,
                                     const invariant::Scenario& s, double t, int n,
                                     Domain domain) {
  const invariant::CoefficientSet cs = invariant::coefficients(s, t);
  const weyl::WeylDisplacement rho = invariant::build_rho(cs);
  const weyl::WeylDisplacement eta = invariant::build_metric(cs);
  const AiryWave psi = invariant::eigenstate(cs, n);

  const double var_a = variance_routes(a, s, t, n, domain).eta_route.real();
  const double var_b = variance_routes(b, s, t, n, domain).eta_route.real();

  // [A~, B~] = rho^{-1} [A, B] rho, formed exactly
  const WeylPolynomial comm = weyl::conjugate(rho.inverse(), weyl::commutator(a, b));
  const cplx norm = overlap(psi, psi.displaced(eta), domain);
  const cplx mean_comm =
      comm.is_zero() ? cplx{} : overlap(psi, apply(comm, psi).displaced(eta), domain) / norm;

  BoundSides out{var_a * var_b, 0.25 * std::norm(mean_comm)};
  if (out.lhs < out.rhs - 1e-10) {
    throw VerificationFailure("uncertainty bound violated: lhs " + fmt(out.lhs) + " < rhs " +
                              fmt(out.rhs));
  }
  return out;
}

std::vector<UncertaintyReport> report_table(int n_max) {
  if (n_max < 1 || n_max > airy::kMaxZeroIndex) {
    throw std::out_of_range("report_table: n_max must be in [1, " +
                            std::to_string(airy::kMaxZeroIndex) + "]");
  }
  std::vector<UncertaintyReport> rows;
  for (int n = 1; n <= n_max; ++n) rows.push_back(uncertainty_product(n));
  return rows;
}

void write_report_csv(std::ostream& out, const std::vector<UncertaintyReport>& rows) {
  out << "n,a_n,var_x,var_p,product,bound\n";
  for (const auto& r : rows) {
    out << r.n << ',' << fmt(r.a_n) << ',' << fmt(r.var_x) << ',' << fmt(r.var_p) << ','
        << fmt(r.product) << ',' << fmt(r.bound) << '\n';
  }
}

std::string report_svg(const std::vector<UncertaintyReport>& rows) {
  constexpr double W = 640, H = 420, left = 70, right = 150, top = 30, bottom = 50;
  const double pw = W - left - right, ph = H - top - bottom;
  double ymax = 0.0;
  for (const auto& r : rows) ymax = std::max({ymax, r.var_x, r.var_p, r.product});
  // round the axis up to 1, 2 or 5 times a power of ten
  const double mag = std::pow(10.0, std::floor(std::log10(std::max(ymax, 1e-12))));
  double top_val = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= ymax) {
      top_val = m * mag;
      break;
    }
  }
  const int n_lo = rows.empty() ? 1 : rows.front().n;
  const int n_hi = rows.empty() ? 1 : rows.back().n;
  const double span = std::max(1, n_hi - n_lo);
  auto px = [&](double n) { return left + pw * (n - n_lo) / span; };
  auto py = [&](double v) { return top + ph * (1.0 - v / top_val); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << W << ' ' << H
    << "\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\""
    << top + ph << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
    << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double v = top_val * k / 5.0;
    o << "<line x1=\"" << left - 4 << "\" y1=\"" << fmt(py(v)) << "\" x2=\"" << left << "\" y2=\""
      << fmt(py(v)) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << left - 8 << "\" y=\"" << fmt(py(v) + 4) << "\" text-anchor=\"end\">"
      << fmt(v) << "</text>\n";
  }
  const int xticks = std::min(10, n_hi - n_lo);
  for (int k = 0; k <= xticks; ++k) {
    const double n = xticks == 0 ? n_lo : n_lo + (n_hi - n_lo) * static_cast<double>(k) / xticks;
    const double nr = std::round(n);
    o << "<line x1=\"" << fmt(px(nr)) << "\" y1=\"" << top + ph << "\" x2=\"" << fmt(px(nr))
      << "\" y2=\"" << top + ph + 4 << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fmt(px(nr)) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
      << fmt(nr) << "</text>\n";
  }
  o << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">n</text>\n";

  struct Curve {
    const char* label;
    const char* colour;
    double UncertaintyReport::*field;
  };
  const Curve curves[] = {{"(&#916;X)&#178;", "#1f77b4", &UncertaintyReport::var_x},
                          {"(&#916;P)&#178;", "#d62728", &UncertaintyReport::var_p},
                          {"&#916;X&#183;&#916;P", "#2ca02c", &UncertaintyReport::product}};
  int row = 0;
  for (const Curve& c : curves) {
    o << "<polyline fill=\"none\" stroke=\"" << c.colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i) o << ' ';
      o << pixel(px(rows[i].n)) << ',' << pixel(py(rows[i].*c.field));
    }
    o << "\"/>\n";
    const double ly = top + 20 + 20 * row++;
    o << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 40
      << "\" y2=\"" << ly << "\" stroke=\"" << c.colour << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << left + pw + 46 << "\" y=\"" << ly + 4 << "\">" << c.label << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace phq::uncertainty
