// Acceptance criteria, one PASS/FAIL line each. Exit status 1 if any fails.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "phq/uncertainty.hpp"
#include "phq/verify.hpp"

namespace {

using phq::verify::Check;
using phq::verify::VerificationReport;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Line {
  int id;
  std::string title;
  std::vector<Check> checks;
  std::string note;
};

bool report(const Line& l) {
  bool ok = !l.checks.empty();
  std::string detail;
  for (const Check& c : l.checks) {
    ok = ok && c.pass;
    if (!detail.empty()) detail += "; ";
    detail += c.id + " " + fmt(c.measured) + " " + c.relation + " " + fmt(c.tolerance);
  }
  std::printf("%s %2d %s: %s%s%s\n", ok ? "PASS" : "FAIL", l.id, l.title.c_str(), detail.c_str(),
              l.note.empty() ? "" : " | ", l.note.c_str());
  return ok;
}

Check upper(std::string id, double measured, double tol) {
  return {std::move(id), measured, tol, "<=", measured <= tol, {}};
}

}  // namespace

int main() {
  std::map<std::string, Check> by_id;
  std::string comoving_note;
  {
    std::vector<std::future<VerificationReport>> jobs;
    for (const std::string& suite : phq::verify::suite_names()) {
      jobs.push_back(std::async(std::launch::async, [suite] { return phq::verify::run_suite(suite); }));
    }
    for (auto& j : jobs) {
      const VerificationReport r = j.get();
      for (const Check& c : r.checks) by_id[r.suite + "." + c.id] = c;
      for (const std::string& d : r.diagnostics) {
        if (d.find("co-moving") != std::string::npos) comoving_note = d;
      }
    }
  }
  auto get = [&](std::initializer_list<const char*> ids) {
    std::vector<Check> out;
    for (const char* id : ids) out.push_back(by_id.at(id));
    return out;
  };

  std::vector<Line> lines;

  {
    // n = 1 value frozen from mpmath: sqrt(-4 a_1^3 / 135) at 30 digits.
    const double frozen = 0.615403269127;
    const double p1 = phq::uncertainty::uncertainty_product(1).product;
    auto checks = get({"moments.uncertainty_product_quadrature_vs_closed",
                       "moments.uncertainty_product_min"});
    checks.push_back(upper("product_n1_vs_reference", std::abs(p1 - frozen), 1e-6));
    lines.push_back({1, "uncertainty product", checks,
                     "n=1 product " + fmt(p1) + "; distance to the 0.615402 quoted with the criterion " +
                         fmt(std::abs(p1 - 0.615402))});
  }
  lines.push_back({2, "Airy moments", get({"moments.airy_moments_vs_closed_form"}), {}});
  lines.push_back({3, "symbolic identities",
                   get({"symbolic.pseudo_hermiticity_eta_I_eta_inv_eq_I_dagger",
                        "symbolic.metric_parameters_alpha_beta",
                        "symbolic.hermitized_invariant_closed_form",
                        "symbolic.U_inverse_I_h_U_eq_p2_plus_x"}),
                   {}});
  lines.push_back({4, "von Neumann equation", get({"ode.von_neumann_residual"}), {}});
  lines.push_back({5, "phase consistency", get({"ode.phase_closed_form_vs_functional"}),
                   "functional vs theta+chi-lambda/2m: " +
                       fmt(by_id.at("ode.phase_theta_plus_chi_vs_functional").measured)});
  lines.push_back({6, "PDE residual", get({"pde.tdse_residual_max"}), {}});
  lines.push_back({7, "eta-norm conservation", get({"moments.eta_norm_conservation"}),
                   comoving_note});
  lines.push_back({8, "spectral check",
                   get({"pde.spectrum_vs_airy_zeros", "pde.spectrum_convergence_ratio_min",
                        "pde.spectrum_convergence_ratio_max"}),
                   {}});
  lines.push_back({9, "propagation cross-validation",
                   get({"pde.crank_nicolson_vs_analytic", "pde.crank_nicolson_hermitian_norm_drift"}),
                   {}});

  {
    const auto rows = phq::uncertainty::report_table(50);
    std::ostringstream csv;
    phq::uncertainty::write_report_csv(csv, rows);
    const std::string svg = phq::uncertainty::report_svg(rows);
    std::ofstream("uncertainty_figure.csv", std::ios::binary) << csv.str();
    std::ofstream("uncertainty_figure.svg", std::ios::binary) << svg;

    double mismatch = 0.0, increments = 1e300;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto r = phq::uncertainty::uncertainty_product(rows[i].n);
      mismatch = std::max({mismatch, std::abs(rows[i].var_x - r.var_x),
                           std::abs(rows[i].var_p - r.var_p),
                           std::abs(rows[i].product - r.product)});
      if (i) increments = std::min(increments, rows[i].product - rows[i - 1].product);
    }
    std::size_t polylines = 0;
    for (std::size_t pos = 0; (pos = svg.find("<polyline", pos)) != std::string::npos; ++pos) ++polylines;
    std::size_t csv_rows = 0;
    for (char ch : csv.str()) csv_rows += ch == '\n';
    lines.push_back({10, "figure data",
                     {upper("curve_vs_table_mismatch", mismatch, 0.0),
                      {"product_increment_min", increments, 0.0, ">", increments > 0.0, {}},
                      upper("svg_curves_missing", std::abs(3.0 - polylines), 0.0),
                      upper("csv_rows_missing", std::abs(51.0 - csv_rows), 0.0)},
                     "wrote uncertainty_figure.csv and uncertainty_figure.svg"});
  }

  bool all = true;
  for (const Line& l : lines) all = report(l) && all;
  return all ? 0 : 1;
}
