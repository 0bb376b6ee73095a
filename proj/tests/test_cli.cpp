#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kTmp = PHQ_TEST_TMP;

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run phq(const std::string& args, const std::string& env = {}) {
  fs::create_directories(kTmp);
  const fs::path out = kTmp / "stdout.txt", err = kTmp / "stderr.txt";
  const std::string cmd = (env.empty() ? std::string() : env + " ") + "\"" + PHQ_CLI_PATH +
                          "\" " + args + " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

fs::path write_file(const std::string& name, const std::string& text) {
  fs::create_directories(kTmp);
  const fs::path p = kTmp / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

const char* kConstant05 =
    R"({"mass": {"kind": "constant", "m0": 1}, "drive": {"kind": "constant", "f0": 0.05}, "horizon": 1})";
const char* kFree =
    R"({"mass": {"kind": "constant", "m0": 1}, "drive": {"kind": "constant", "f0": 0}, "horizon": 1})";

}  // namespace

TEST_CASE("cli airy") {
  auto r = phq("airy --zero 1");
  CHECK(r.code == 0);
  CHECK(r.out == "-2.33810741046\n");
  r = phq("airy --eval 0");
  CHECK(r.code == 0);
  CHECK(r.out == "Ai=0.355028053888, Ai'=-0.258819403793\n");
  r = phq("airy --eval 1,2");
  CHECK(r.out == "Ai=-0.219386254981-0.175385911408i, Ai'=0.170444978179+0.387622439413i\n");
  CHECK(phq("airy --zero 0").code == 2);
  CHECK(phq("airy --zero 101").code == 2);
  CHECK(phq("airy --eval abc").code == 2);
  CHECK(phq("airy --eval 70").code == 2);
  CHECK(phq("airy").code == 2);
  CHECK(phq("airy --zero 1 --eval 0").code == 2);
  CHECK(phq("").code == 2);
  CHECK(phq("bogus").code == 2);
  CHECK(phq("--help").code == 0);
}

TEST_CASE("cli uncertainty and plot") {
  auto r = phq("uncertainty --n-max 1");
  CHECK(r.code == 0);
  CHECK(r.out == "n,a_n,var_x,var_p,product,bound\n1,-2.33810741046,0.485933001142,0.77936913682,0.615403269127,0.25\n");
  CHECK(phq("uncertainty --n-max 0").code == 2);
  CHECK(phq("uncertainty --n-max 101").code == 2);
  CHECK(phq("uncertainty --n-max x").code == 2);
  CHECK(phq("uncertainty --n-max 2 --svg /nonexistent-dir/a.svg").code == 1);

  const fs::path csv = kTmp / "fig.csv", svg = kTmp / "fig.svg", svg2 = kTmp / "fig2.svg";
  r = phq("uncertainty --n-max 20 --csv \"" + csv.string() + "\" --svg \"" + svg.string() + "\"");
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  const std::string table = slurp(csv);
  CHECK(std::count(table.begin(), table.end(), '\n') == 21);
  CHECK(phq("uncertainty --n-max 20").out == table);
  r = phq("plot --csv \"" + csv.string() + "\" --svg \"" + svg2.string() + "\"");
  CHECK(r.code == 0);
  CHECK(slurp(svg2) == slurp(svg));

  const fs::path bad = write_file("bad.csv", "n,a_n\n1,2\n");
  CHECK(phq("plot --csv \"" + bad.string() + "\" --svg \"" + svg2.string() + "\"").code == 2);
  CHECK(phq("plot --csv /nonexistent.csv --svg x.svg").code == 1);
}

TEST_CASE("cli verify") {
  auto r = phq("verify --suite symbolic");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"status\": \"pass\"") != std::string::npos);
  CHECK(r.out.find("\"status\": \"fail\"") == std::string::npos);
  CHECK(phq("verify --suite symbolic").out == r.out);

  r = phq("verify --suite ode");
  CHECK(r.code == 1);  // closed-form phase rate theta - chi disagrees with the functional
  CHECK(r.out.find("phase_closed_form_vs_functional") != std::string::npos);

  const fs::path zero_mass = write_file(
      "m0.json",
      R"({"mass": {"kind": "constant", "m0": 0}, "drive": {"kind": "constant", "f0": 0.1}, "horizon": 1})");
  r = phq("verify --suite symbolic --scenario \"" + zero_mass.string() + "\"");
  CHECK(r.code == 2);
  CHECK(r.err.find("m0") != std::string::npos);
  const fs::path broken = write_file("broken.json", "{\"mass\": ");
  CHECK(phq("verify --suite ode --scenario \"" + broken.string() + "\"").code == 2);
  CHECK(phq("verify --suite nope").code == 2);

  const Run serial = phq("verify --suite all", "PHQ_THREADS=1");
  const Run parallel = phq("verify --suite all", "PHQ_THREADS=4");
  CHECK(serial.code == 1);
  CHECK(parallel.out == serial.out);
  CHECK(serial.out.find("\"id\": \"symbolic.commutator_jacobi_identity\"") != std::string::npos);
  CHECK(serial.out.find("\"id\": \"pde.tdse_residual_max\"") != std::string::npos);
  CHECK(serial.out.find("\"id\": \"moments.eta_norm_conservation\"") != std::string::npos);
  CHECK(phq("verify").code == 2);
}

TEST_CASE("cli evolve") {
  const fs::path sc = write_file("c05.json", kConstant05);
  const fs::path free = write_file("free.json", kFree);
  const fs::path out = kTmp / "traj.csv", out2 = kTmp / "traj2.csv";

  auto r = phq("evolve --scenario \"" + sc.string() + "\" --n 1 --t-final 0.2 --grid 800,30,1e-3 "
               "--boundary analytic_trace --out \"" + out.string() + "\" --sample-every 50 --stride 40");
  CHECK(r.code == 0);
  REQUIRE(r.out.find("deviation=") != std::string::npos);
  const double dev = std::stod(r.out.substr(r.out.find("deviation=") + 10));
  CHECK(dev < 1e-3);
  const std::string traj = slurp(out);
  CHECK(traj.rfind("t,x,re,im,abs2\n", 0) == 0);
  r = phq("evolve --scenario \"" + sc.string() + "\" --n 1 --t-final 0.2 --grid 800,30,1e-3 "
          "--boundary analytic_trace --out \"" + out2.string() + "\" --sample-every 50 --stride 40");
  CHECK(slurp(out2) == traj);

  r = phq("evolve --scenario \"" + free.string() + "\" --t-final 0.2 --grid 800,30,1e-3 --out \"" +
          out.string() + "\"");
  CHECK(r.code == 0);
  const double drift = std::stod(r.out.substr(r.out.find("norm_drift=") + 11));
  CHECK(std::abs(drift) <= 1e-12);

  r = phq("evolve --scenario \"" + free.string() + "\" --t-final 0.01 --grid 100,30,0.5 --out \"" +
          out.string() + "\"");
  CHECK(r.code == 0);
  CHECK(r.err.find("warning") != std::string::npos);

  CHECK(phq("evolve --t-final 0.2 --out x.csv").code == 2);
  CHECK(phq("evolve --scenario \"" + sc.string() + "\" --t-final 2 --out \"" + out.string() + "\"").code == 2);
  CHECK(phq("evolve --scenario \"" + sc.string() + "\" --t-final 0.1 --grid 100,30 --out \"" + out.string() + "\"").code == 2);
  CHECK(phq("evolve --scenario \"" + sc.string() + "\" --t-final 0.1 --boundary open --out \"" + out.string() + "\"").code == 2);
  CHECK(phq("evolve --scenario \"" + sc.string() + "\" --t-final 0.01 --grid 100,30,1e-3 --out /nonexistent-dir/t.csv").code == 1);
}
