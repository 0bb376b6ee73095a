// phq: command-line front end. Exit codes: 0 ok, 1 runtime or verification
// failure, 2 usage or configuration error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phq/airy.hpp"
#include "phq/grid.hpp"
#include "phq/invariant.hpp"
#include "phq/uncertainty.hpp"
#include "phq/verify.hpp"

namespace {

using namespace phq;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v + 0.0);
  return buf;
}

std::string fmt(std::complex<double> z, bool complex_out) {
  if (!complex_out) return fmt(z.real());
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.12g%+.12gi", z.real() + 0.0, z.imag() + 0.0);
  return buf;
}

double parse_double(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw UsageError(std::string("bad ") + what + ": '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}

void close_checked(std::ofstream& f, const std::string& path) {
  f.close();
  if (!f) throw std::runtime_error("write failed: " + path);
}

// ---------------------------------------------------------------- airy

int cmd_airy(std::optional<int> zero, const std::string& eval) {
  if (zero.has_value() == !eval.empty()) throw UsageError("airy: give exactly one of --zero, --eval");
  if (zero) {
    if (*zero < 1 || *zero > airy::kMaxZeroIndex) {
      throw UsageError("airy: --zero must be in [1, " + std::to_string(airy::kMaxZeroIndex) + "]");
    }
    std::cout << fmt(airy::airy_zero(*zero).value) << '\n';
    return 0;
  }
  const auto parts = split(eval, ',');
  if (parts.empty() || parts.size() > 2) throw UsageError("airy: --eval expects re[,im]");
  const double re = parse_double(parts[0], "real part");
  const double im = parts.size() == 2 ? parse_double(parts[1], "imaginary part") : 0.0;
  airy::AiryValue v;
  try {
    v = airy::airy_eval({re, im});
  } catch (const airy::UnsupportedArgument& e) {
    throw UsageError(e.what());
  }
  const bool cx = parts.size() == 2;
  std::cout << "Ai=" << fmt(v.ai, cx) << ", Ai'=" << fmt(v.ai_prime, cx) << '\n';
  return 0;
}

// ---------------------------------------------------------------- uncertainty

int cmd_uncertainty(int n_max, const std::string& svg, const std::string& csv) {
  if (n_max < 1 || n_max > airy::kMaxZeroIndex) {
    throw UsageError("uncertainty: --n-max must be in [1, " + std::to_string(airy::kMaxZeroIndex) +
                     "]");
  }
  const auto rows = uncertainty::report_table(n_max);
  std::ostringstream table;
  uncertainty::write_report_csv(table, rows);
  if (csv.empty()) {
    std::cout << table.str();
  } else {
    auto f = open_out(csv);
    f << table.str();
    close_checked(f, csv);
  }
  if (!svg.empty()) {
    auto f = open_out(svg);
    f << uncertainty::report_svg(rows);
    close_checked(f, svg);
  }
  return 0;
}

// ---------------------------------------------------------------- plot

std::vector<uncertainty::UncertaintyReport> read_report_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line != "n,a_n,var_x,var_p,product,bound") {
    throw UsageError(path + ": expected header n,a_n,var_x,var_p,product,bound");
  }
  std::vector<uncertainty::UncertaintyReport> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 6) throw UsageError(path + ":" + std::to_string(lineno) + ": expected 6 fields");
    uncertainty::UncertaintyReport r;
    const double n = parse_double(f[0], "n");
    if (n != std::floor(n) || n < 1) throw UsageError(path + ":" + std::to_string(lineno) + ": bad n");
    r.n = static_cast<int>(n);
    r.a_n = parse_double(f[1], "a_n");
    r.var_x = parse_double(f[2], "var_x");
    r.var_p = parse_double(f[3], "var_p");
    r.product = parse_double(f[4], "product");
    r.bound = parse_double(f[5], "bound");
    if (!rows.empty() && r.n <= rows.back().n) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": n must increase");
    }
    rows.push_back(r);
  }
  if (rows.empty()) throw UsageError(path + ": no rows");
  return rows;
}

int cmd_plot(const std::string& csv, const std::string& svg) {
  const auto rows = read_report_csv(csv);
  auto f = open_out(svg);
  f << uncertainty::report_svg(rows);
  close_checked(f, svg);
  return 0;
}

// ---------------------------------------------------------------- verify

invariant::Scenario load_or_usage(const std::string& path) {
  try {
    return invariant::load_scenario(path);
  } catch (const invariant::ScenarioError& e) {
    throw UsageError(std::string("scenario: ") + e.what());
  }
}

int cmd_verify(const std::string& suite, const std::string& scenario) {
  verify::Options opt;
  if (!scenario.empty()) opt.scenario = load_or_usage(scenario);
  const verify::VerificationReport r = verify::run_suite(suite, opt);
  std::cout << r.to_json();
  return r.passed() ? 0 : 1;
}

// ---------------------------------------------------------------- evolve

grid::GridSpec parse_grid(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 3) throw UsageError("--grid expects N,L,dt");
  grid::GridSpec g;
  const double n = parse_double(parts[0], "grid N");
  if (n != std::floor(n) || n < 1 || n > 1e9) throw UsageError("bad grid N: '" + parts[0] + "'");
  g.N = static_cast<int>(n);
  g.L = parse_double(parts[1], "grid L");
  g.dt = parse_double(parts[2], "grid dt");
  try {
    g.validate();
  } catch (const std::exception& e) {
    throw UsageError(std::string("grid: ") + e.what());
  }
  return g;
}

struct EvolveArgs {
  std::string scenario;
  int n = 1;
  double t_final = 0.0;
  std::string grid = "4000,30,1e-4";
  std::string boundary = "hard_wall";
  std::string out;
  int sample_every = 0;
  int stride = 1;
};

int cmd_evolve(const EvolveArgs& a) {
  const invariant::Scenario s = load_or_usage(a.scenario);
  const grid::GridSpec g = parse_grid(a.grid);
  if (a.n < 1 || a.n > airy::kMaxZeroIndex) throw UsageError("--n out of range");
  if (!(a.t_final > 0.0) || a.t_final > s.horizon) {
    throw UsageError("--t-final must lie in (0, horizon = " + fmt(s.horizon) + "]");
  }
  if (a.sample_every < 0 || a.stride < 1) throw UsageError("--sample-every >= 0, --stride >= 1");
  if (g.dt > g.h()) {
    std::cerr << "warning: dt = " << fmt(g.dt) << " exceeds h = " << fmt(g.h()) << '\n';
  }

  const invariant::LrSolution sol(s, a.n);
  grid::PropagateOptions po;
  po.sample_every = a.sample_every;
  if (a.boundary == "analytic_trace") {
    po.boundary = grid::Boundary::analytic_trace;
    po.trace = [&sol](double t, double x) { return sol(t, x); };
  } else if (a.boundary != "hard_wall") {
    throw UsageError("--boundary must be hard_wall or analytic_trace");
  }

  const grid::GridState init = grid::sample(sol, g, 0.0);
  const auto traj = grid::propagate(s, init, a.t_final, po);
  const grid::GridState& last = traj.back();

  auto f = open_out(a.out);
  grid::write_trajectory_csv(f, traj, a.stride);
  close_checked(f, a.out);

  const double deviation = grid::relative_l2_deviation(last, grid::sample(sol, g, last.t), 4 * g.h(),
                                                       g.L - 4 * g.h());
  const double norm_drift = grid::norm_sq(last) / grid::norm_sq(init) - 1.0;
  double eta_drift = 0.0;
  for (const grid::GridState& st : traj) {
    const AiryWave w = sol.wave(st.t);
    eta_drift = std::max(eta_drift,
                         std::abs(grid::eta_inner_product(s, st.t, w, w, Domain::lab) - 1.0));
  }
  const long steps = static_cast<long>(std::ceil(a.t_final / g.dt - 1e-9));
  std::cout << "t_final=" << fmt(last.t) << " steps=" << steps
            << " deviation=" << fmt(deviation) << " norm_drift=" << fmt(norm_drift)
            << " eta_norm_drift=" << fmt(eta_drift) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phq: pseudo-Hermitian Airy-well toolkit"};
  app.require_subcommand(1);

  std::optional<int> zero;
  std::string eval;
  auto* airy_cmd = app.add_subcommand("airy", "Airy zeros and values");
  airy_cmd->add_option("--zero", zero, "n-th negative zero of Ai");
  airy_cmd->add_option("--eval", eval, "Ai and Ai' at re[,im]");

  int n_max = 0;
  std::string svg, csv;
  auto* unc_cmd = app.add_subcommand("uncertainty", "variance table for n = 1..K");
  unc_cmd->add_option("--n-max", n_max, "K")->required();
  unc_cmd->add_option("--svg", svg, "write the plot here");
  unc_cmd->add_option("--csv", csv, "write the table here instead of stdout");

  std::string plot_csv, plot_svg;
  auto* plot_cmd = app.add_subcommand("plot", "SVG from an uncertainty CSV");
  plot_cmd->add_option("--csv", plot_csv)->required();
  plot_cmd->add_option("--svg", plot_svg)->required();

  std::string suite, scenario;
  std::vector<std::string> suites = phq::verify::suite_names();
  suites.push_back("all");
  auto* ver_cmd = app.add_subcommand("verify", "run a verification suite, JSON report");
  ver_cmd->add_option("--suite", suite)->required()->check(CLI::IsMember(suites));
  ver_cmd->add_option("--scenario", scenario, "scenario JSON");

  EvolveArgs ev;
  auto* evo_cmd = app.add_subcommand("evolve", "Crank-Nicolson run against the analytic state");
  evo_cmd->add_option("--scenario", ev.scenario)->required();
  evo_cmd->add_option("--n", ev.n)->capture_default_str();
  evo_cmd->add_option("--t-final", ev.t_final)->required();
  evo_cmd->add_option("--grid", ev.grid, "N,L,dt")->capture_default_str();
  evo_cmd->add_option("--boundary", ev.boundary, "hard_wall|analytic_trace")->capture_default_str();
  evo_cmd->add_option("--out", ev.out, "trajectory CSV")->required();
  evo_cmd->add_option("--sample-every", ev.sample_every, "steps between samples (0: ends only)");
  evo_cmd->add_option("--stride", ev.stride, "keep every k-th grid point in the CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*airy_cmd) return cmd_airy(zero, eval);
    if (*unc_cmd) return cmd_uncertainty(n_max, svg, csv);
    if (*plot_cmd) return cmd_plot(plot_csv, plot_svg);
    if (*ver_cmd) return cmd_verify(suite, scenario);
    if (*evo_cmd) return cmd_evolve(ev);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
