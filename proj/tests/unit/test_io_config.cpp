#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "geonflow/errors.hpp"
#include "geonflow/io.hpp"
#include "geonflow/run_config.hpp"

using namespace geonflow;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

int error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("numbers round-trip through their text form") {
  for (double x : {0.1, 1.0 / 3.0, -2.0 * 3.141592653589793, 1e-300, 6.02214076e23}) {
    const std::string s = format_number(x);
    CHECK(std::stod(s) == x);
  }
}

TEST_CASE("surface CSV round trip") {
  const GeonParams p(4, {1.0, 2.0});
  const auto s = mode_surface(p, PeriodicGrid::for_params(p, 16, 32), 1.0, {{1, 2, 0.05, 0.3}});
  const std::string text = surface_to_csv(s);
  std::istringstream is(text);
  const auto back = surface_from_csv(is);
  CHECK(back.n() == 4);
  CHECK(back.grid() == s.grid());
  CHECK((back.v() == s.v()).all());
  CHECK(surface_to_csv(back) == text);

  std::istringstream broken(text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(surface_from_csv(broken), ConfigError);
}

TEST_CASE("Q report JSON") {
  const GeonParams p(3, {1.0});
  const auto r = q_report(coordinate_torus(p, PeriodicGrid::for_params(p, 16, 16), 1.0));
  const auto j = nlohmann::json::parse(q_report_json(r, p));
  CHECK(j["n"] == 3);
  CHECK(std::abs(j["q_surface"].get<double>() - r.q_surface) == 0.0);
  CHECK(j.contains("gap_to_bound"));
  CHECK(j.contains("gap_to_torus_value"));
}

TEST_CASE("config parsing") {
  const auto c = parse(
      "# comment\n"
      "n = 4\n"
      "periods = 1, 2   # a3, a4\n"
      "grid = 32x16\n"
      "init.phi0 = 1.8\n"
      "init.modes = 1:0:0.05:0; 0:1:0.02\n"
      "flow.t_end = 7\n"
      "flow.derivatives = fd4\n"
      "sweep.init.random.amplitude = 0.01 | 0.02\n");
  CHECK(c.n == 4);
  CHECK(c.periods == std::vector<double>{1.0, 2.0});
  CHECK(c.n1 == 32);
  CHECK(c.n2 == 16);
  CHECK(c.init.modes.size() == 2);
  CHECK(c.init.modes[1].phase == 0.0);
  CHECK(c.flow.t_end == 7.0);
  CHECK(c.flow.derivatives == DerivativeMode::FiniteDifference4);
  REQUIRE(c.sweep.size() == 1);
  CHECK(c.sweep[0].first == "init.random.amplitude");
  CHECK(c.sweep[0].second == std::vector<std::string>{"0.01", "0.02"});
  CHECK(std::abs(phi(c.start_height(), 4) - 1.8) < 1e-12);
}

TEST_CASE("config errors carry the line number") {
  CHECK(error_line("n = 3\nbogus = 1\n") == 2);
  CHECK(error_line("n = 3\n\nflow.t_end = abc\n") == 3);
  CHECK(error_line("n = 3\nn = 4\n") == 2);
  CHECK(error_line("grid = 64x64\njust text\n") == 2);
  CHECK(error_line("n = 4\nperiods = 1\n") == 2);
  CHECK(error_line("grid = 15x16\n") == 1);
  CHECK(error_line("init.phi0 = 2\ninit.s0 = 1\n") == 2);
  CHECK(error_line("sweep.flow.t_end = 1 | x\n") == 1);
  CHECK(error_line("init.modes = 1:0\n") == 1);
}

TEST_CASE("sweep override replaces an existing entry") {
  auto c = parse("sweep.flow.t_end = 1 | 2\n");
  set_option(c, "sweep.flow.t_end", "3|4|5");
  REQUIRE(c.sweep.size() == 1);
  CHECK(c.sweep[0].second.size() == 3);
}

TEST_CASE("random modes are deterministic and bounded") {
  const auto a = random_modes(42, 6, 2, 0.1), b = random_modes(42, 6, 2, 0.1);
  REQUIRE(a.size() == 6);
  double total = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].k1 == b[k].k1);
    CHECK(a[k].k2 == b[k].k2);
    CHECK(a[k].amplitude == b[k].amplitude);
    CHECK(a[k].phase == b[k].phase);
    CHECK(!(a[k].k1 == 0 && a[k].k2 == 0));
    CHECK(std::abs(a[k].k1) <= 2);
    total += a[k].amplitude;
  }
  CHECK(std::abs(total - 0.1) < 1e-15);
  const auto c = random_modes(43, 6, 2, 0.1);
  bool differs = false;
  for (std::size_t k = 0; k < 6; ++k) differs |= c[k].phase != a[k].phase;
  CHECK(differs);
}

TEST_CASE("initial surfaces") {
  auto c = parse("n = 3\ngrid = 32x32\ninit.random.count = 6\ninit.random.kmax = 4\n"
                 "init.random.amplitude = 1.0\n");
  double scale = 0.0;
  const auto s = initial_surface(c, &scale);
  CHECK(scale < 1.0);
  CHECK(check_initial(s, 0.0).ok);

  c.init.require_convex = false;
  const auto raw = initial_surface(c, &scale);
  CHECK(scale == 1.0);
  CHECK_FALSE(check_initial(raw, 0.0).ok);

  auto low = parse("init.phi0 = 1.02\n");
  const auto chk = check_initial(initial_surface(low), 0.0);
  CHECK_FALSE(chk.ok);
  CHECK(chk.reason.find("floor") != std::string::npos);
}

TEST_CASE("atomic writes") {
  const auto dir = std::filesystem::temp_directory_path() / "geonflow_io_test";
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "a.txt", "hello\n");
  std::ifstream is(dir / "a.txt");
  std::string line;
  std::getline(is, line);
  CHECK(line == "hello");
  std::filesystem::remove_all(dir);
}
