#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dynamo/config.hpp"
#include "dynamo/runner.hpp"

using namespace dynamo;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dynamo_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t error_line(const std::string& text) {
  RunConfig c;
  try {
    parse_config(text, "t.ini", c);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return 0;
}

constexpr const char* kSmallEvolve = R"([evolve]
lambda = 1
n_p = 4
n_q = 4
n_z = 32
t_end = 1

)";

int run_config(const std::string& text, Command cmd, const fs::path& dir, std::string* out_text = nullptr,
               std::uint64_t seed = 0) {
  RunConfig c;
  parse_config(text, "t.ini", c);
  c.command = cmd;
  c.out_dir = dir;
  c.seed = seed;
  std::ostringstream out, err;
  const int code = run(c, out, err);
  if (out_text) *out_text = out.str();
  return code;
}

}  // namespace

TEST_CASE("config parsing") {
  RunConfig c;
  parse_config("# comment\n[evolve]\nlambda = catmap\nresistivity = 1e-3  # trailing\nn_z = 64\n"
               "initial = random\n[verify]\ncriteria = 1, 3\n",
               "t.ini", c);
  CHECK(c.evolve.lambda == -1.0);
  CHECK(c.evolve.resistivity == 1e-3);
  CHECK(c.evolve.grid.n_z == 64);
  CHECK(c.evolve.initial == InitialKind::random);
  CHECK(c.verify.criteria == std::vector<int>{1, 3});

  CHECK(error_line("[evolve]\nlambda = 1\nbogus = 2\n") == 3);
  CHECK(error_line("[nowhere]\n") == 1);
  CHECK(error_line("[evolve]\nlambda = 1\nlambda = 2\n") == 3);
  CHECK(error_line("[evolve]\n[curvature]\n[evolve]\n") == 3);
  CHECK(error_line("lambda = 1\n") == 1);
  CHECK(error_line("[evolve]\n\nn_z = -4\n") == 3);
  CHECK(error_line("[evolve]\nt_end = nan\n") == 2);
  CHECK(error_line("[evolve]\nomega = wobbly\n") == 2);
  CHECK(error_line("[verify]\ncriteria = 9\n") == 2);
  CHECK(error_line("[evolve\n") == 1);

  try {
    parse_config("[evolve]\nbogus = 2\n", "cfg.ini", c);
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).rfind("cfg.ini:2:", 0) == 0);
  }

  CHECK(parse_command("verify-all") == Command::verify_all);
  CHECK(std::string(command_name(Command::verify_all)) == "verify-all");
  CHECK_THROWS_AS(parse_command("explode"), ValidationError);
}

TEST_CASE("catmap command") {
  std::string out;
  CHECK(run_config("", Command::catmap, scratch("catmap"), &out) == 0);
  CHECK(out.find("chi_1 = 2.618033988749") != std::string::npos);
  CHECK(out.find("determinant = 1") != std::string::npos);
  CHECK(out.find("lambda = 0.96242365011") != std::string::npos);
}

TEST_CASE("evolve without flow keeps norms") {
  const fs::path dir = scratch("still");
  CHECK(run_config(std::string(kSmallEvolve) + "flow_speed = 0\ndt = 0.01\n", Command::evolve, dir) == 0);
  std::istringstream csv(slurp(dir / "series.csv"));
  std::string header, first, line;
  std::getline(csv, header);
  CHECK(header == "t,B_p,B_q,B_z,div_residual");
  std::getline(csv, first);
  std::size_t rows = 1;
  auto tail = [](const std::string& s) { return s.substr(s.find(',')); };
  while (std::getline(csv, line)) {
    CHECK(tail(line) == tail(first));
    ++rows;
  }
  CHECK(rows == 101);
  CHECK(slurp(dir / "growth.txt").find("status = completed") != std::string::npos);
}

TEST_CASE("runs are deterministic and carry full precision") {
  const std::string cfg = std::string(kSmallEvolve) + "initial = random\nresistivity = 1e-3\n";
  const fs::path a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  REQUIRE(run_config(cfg, Command::evolve, a, nullptr, 7) == 0);
  REQUIRE(run_config(cfg, Command::evolve, b, nullptr, 7) == 0);
  REQUIRE(run_config(cfg, Command::evolve, c, nullptr, 8) == 0);
  const std::string sa = slurp(a / "series.csv");
  CHECK(sa == slurp(b / "series.csv"));
  CHECK(sa != slurp(c / "series.csv"));

  // Second line, B_q column: at least 12 significant digits.
  std::istringstream in(sa);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::istringstream fields(line);
  std::string field;
  std::getline(fields, field, ',');
  std::getline(fields, field, ',');
  std::getline(fields, field, ',');
  std::size_t digits = 0;
  for (char ch : field.substr(0, field.find_first_of("eE"))) digits += (ch >= '0' && ch <= '9');
  CHECK(digits >= 12);
}

TEST_CASE("exit codes") {
  std::string out;
  CHECK(run_config(std::string(kSmallEvolve) + "resistivity = -1\n", Command::evolve, scratch("bad"), &out) == 1);
  // e^{30 t} passes the overflow guard well before t_end.
  const fs::path dir = scratch("blowup");
  CHECK(run_config("[evolve]\nlambda = 30\nn_p = 4\nn_q = 4\nn_z = 32\nt_end = 1.5\n", Command::evolve, dir) == 2);
  CHECK(slurp(dir / "growth.txt").find("status = overflow_halt") != std::string::npos);
}

TEST_CASE("curvature and fluxrope artifacts") {
  const fs::path dir = scratch("artifacts");
  std::string out;
  REQUIRE(run_config("[curvature]\nmetric = stretched_coframe\nsamples = 3\n", Command::curvature, dir, &out) == 0);
  const std::string table = slurp(dir / "curvature.txt");
  CHECK(table.rfind("z component cartan oracle reference abs_diff\n", 0) == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') == 28);
  CHECK(out.find("max_abs_diff = ") != std::string::npos);

  REQUIRE(run_config("[fluxrope]\nkappa = 1\ntau = 1\nr = 0.1\n", Command::fluxrope, dir, &out) == 0);
  CHECK(slurp(dir / "rope.csv").rfind("s,kappa,tau,K,theta,v_theta,B_theta\n", 0) == 0);
  CHECK(out.find("verdict = ") != std::string::npos);

  CHECK(run_config("[fluxrope]\nkappa = 1\nr = 2\n", Command::fluxrope, dir) == 1);
}

#ifdef DYNAMO_CLI_PATH
TEST_CASE("command line front end") {
  const fs::path dir = scratch("cli");
  const fs::path cfg = dir / "bad.ini";
  std::ofstream(cfg) << "[evolve]\nwat = 1\n";
  const std::string cli = DYNAMO_CLI_PATH;
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status(cli + " catmap --out " + dir.string()) == 0);
  CHECK(status(cli + " evolve --config " + cfg.string() + " --out " + dir.string()) == 1);
  CHECK(status(cli + " dance") == 1);
}
#endif
