#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <doctest.h>
#include <unistd.h>

#include "mcf/scenario.hpp"

using namespace mcf::scenario;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("mcf_scenario_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Config parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

Config small_circle(const fs::path& out) {
  Config c = parse("name = c\ninitial.kind = circle\ninitial.t0 = -2\nt_end = -1\nresolution = 64\n"
                   "diagnostics = gaussian_density, typeI\n");
  c.output_dir = out;
  return c;
}

std::string support_values(double amplitude) {
  std::string s;
  for (int i = 0; i < 64; ++i) {
    s += std::to_string(1.0 + amplitude * std::cos(4.0 * 2.0 * std::numbers::pi * i / 64.0)) + (i < 63 ? "," : "");
  }
  return s;
}

}  // namespace

TEST_CASE("config parsing") {
  const Config c = parse("# comment\nname = e\ninitial.kind = ellipse\ninitial.a = 3 # inline\ninitial.b=1\n"
                         "initial.t0 = -4\nt_end = -1\nblowdown.lambdas = 0.5, 0.4\nslab_normal = 1 0\n");
  CHECK(c.name == "e");
  CHECK(c.kind == Kind::Ellipse);
  CHECK(c.a == 3.0);
  CHECK(c.b == 1.0);
  REQUIRE(c.t_end.has_value());
  CHECK(*c.t_end == -1.0);
  CHECK(c.blowdown_lambdas == std::vector<double>{0.5, 0.4});
  REQUIRE(c.slab_normal.has_value());
  CHECK(c.slab_normal->x == 1.0);
  CHECK_NOTHROW(validate(c));

  CHECK_THROWS_AS((void)parse("name = a\nname = b\n"), ConfigError);
  CHECK_THROWS_AS((void)parse("colour = red\n"), ConfigError);
  CHECK_THROWS_AS((void)parse("initial.kind = torus\n"), ConfigError);
  CHECK_THROWS_AS((void)parse("t_end = soon\n"), ConfigError);
  CHECK_THROWS_AS((void)parse("just text\n"), ConfigError);
  CHECK_THROWS_AS((void)load_config("/nonexistent/x.cfg"), ConfigError);

  CHECK_THROWS_AS(validate(parse("name = c\ninitial.kind = circle\ninitial.t0 = -2\nt_end = 0.5\n")), ConfigError);
  CHECK_THROWS_AS(validate(parse("name = c\ninitial.kind = circle\ninitial.t0 = -2\nt_end = -1\nresolution = 32\n")),
                  ConfigError);
  CHECK_THROWS_AS(validate(parse("name = ../c\ninitial.kind = circle\ninitial.t0 = -2\nt_end = -1\n")), ConfigError);
  CHECK_THROWS_AS(validate(parse("name = c\ninitial.kind = circle\ninitial.t0 = -2\n")), ConfigError);
  CHECK_THROWS_AS(validate(parse("name = c\ninitial.kind = circle\ninitial.t0 = -2\nt_end = -1\ndiagnostics = x\n")),
                  ConfigError);
  CHECK_NOTHROW(validate(parse("name = g\ninitial.kind = grim\n")));
  CHECK_THROWS_AS(validate(parse("name = b\ninitial.kind = bowl\ninitial.n = 1\n")), ConfigError);
}

TEST_CASE("exit codes") {
  const fs::path out = scratch("exit");
  Config late        = small_circle(out);
  late.t_end         = 0.5;
  CHECK(run(late).exit_code == 2);
  CHECK_FALSE(fs::exists(out / "c"));

  Config coarse     = small_circle(out);
  coarse.resolution = 32;
  CHECK(run(coarse).exit_code == 2);

  Config mismatch = parse("name = m\ninitial.kind = custom_support\ninitial.t0 = -1\nt_end = -0.5\nresolution = 128\n"
                          "initial.values = " + support_values(0.05) + "\n");
  mismatch.output_dir = out;
  CHECK(run(mismatch).exit_code == 2);

  Config concave = parse("name = k\ninitial.kind = custom_support\ninitial.t0 = -1\nt_end = -0.5\n"
                         "initial.values = " + support_values(0.2) + "\n");
  concave.output_dir = out;
  const Outcome o    = run(concave);
  CHECK(o.exit_code == 3);
  CHECK_FALSE(fs::exists(out / "k"));

  Config history           = small_circle(out);
  history.blowdown_lambdas = {0.1};
  CHECK(run(history).exit_code == 2);
  fs::remove_all(out);
}

TEST_CASE("circle run writes deterministic artifacts") {
  const fs::path out = scratch("det");
  const Config c     = small_circle(out);
  const Outcome a    = run(c);
  REQUIRE(a.exit_code == 0);
  const std::string flow  = slurp(out / "c" / "flow.csv");
  const std::string diag  = slurp(out / "c" / "diagnostics.csv");
  const std::string summ  = slurp(out / "c" / "summary.json");
  CHECK(flow.rfind("t,theta_index,h\n", 0) == 0);
  CHECK(diag.rfind("t,channel,value\n", 0) == 0);
  CHECK(flow.find('\r') == std::string::npos);
  CHECK(summ.find("\"constants\"") != std::string::npos);
  CHECK(summ.find("\"assertions\"") != std::string::npos);
  CHECK(diag.find(",typeI,") != std::string::npos);
  CHECK_FALSE(fs::exists(out / "c" / "profile.csv"));

  // First data row: t = -2 printed with 17 significant digits.
  const std::string row = flow.substr(flow.find('\n') + 1, flow.find('\n', flow.find('\n') + 1) - flow.find('\n') - 1);
  CHECK(row == "-2,0,2");

  const Outcome b = run(c);
  REQUIRE(b.exit_code == 0);
  CHECK(slurp(out / "c" / "flow.csv") == flow);
  CHECK(slurp(out / "c" / "diagnostics.csv") == diag);
  CHECK(slurp(out / "c" / "summary.json") == summ);
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(out)) { ++entries; }
  CHECK(entries == 1);
  fs::remove_all(out);
}

TEST_CASE("failed assertions give exit code 1 and still write results") {
  const fs::path out = scratch("fail");
  // The oval at t = -3 is still far from its Grim Reaper tips.
  Config c     = parse("name = c\ninitial.kind = oval\ninitial.t0 = -3\nt_end = -1\n");
  c.output_dir = out;
  const Outcome o    = run(c);
  CHECK(o.exit_code == 1);
  CHECK(fs::exists(out / "c" / "summary.json"));
  fs::remove_all(out);
}

TEST_CASE("translator runs write a profile") {
  const fs::path out = scratch("grim");
  Config g           = parse("name = grim\ninitial.kind = grim\n");
  g.output_dir       = out;
  const Outcome o    = run(g);
  CHECK(o.exit_code == 0);
  CHECK(slurp(out / "grim" / "profile.csv").rfind("x,y,curvature\n", 0) == 0);
  CHECK(slurp(out / "grim" / "flow.csv") == "t,theta_index,h\n");
  CHECK(slurp(out / "grim" / "summary.json").find("\"Slab\"") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("compare") {
  const fs::path out = scratch("cmp");
  auto write         = [&](const std::string& name, const std::string& text) {
    fs::create_directories(out / name);
    std::ofstream(out / name / "summary.json") << text;
  };
  write("a", R"({"labels": {"blowdown": "Circle"}, "constants": {"x": 1.0, "y": 1e-9}})");
  write("b", R"({"labels": {"blowdown": "Circle"}, "constants": {"x": 1.00001, "y": 5e-9}})");
  write("c", R"({"labels": {"blowdown": "PlaneMult2"}, "constants": {"x": 1.0, "y": 1e-9}})");
  write("d", R"({"labels": {"blowdown": "Circle"}, "constants": {"x": 1.0}})");

  CHECK(compare(out / "a", out / "a", 0.0).exit_code == 0);
  const Comparison ab = compare(out / "a", out / "b" / "summary.json", 1e-4);
  CHECK(ab.exit_code == 0);
  CHECK(compare(out / "a", out / "b", 1e-6).exit_code == 1);
  const Comparison ac = compare(out / "a", out / "c", 1e-4);
  CHECK(ac.exit_code == 1);
  REQUIRE_FALSE(ac.rows.empty());
  CHECK(ac.rows.front().key == "labels.blowdown");
  CHECK(ac.rows.front().exceeded);
  CHECK(compare(out / "a", out / "d", 1e-4).exit_code == 1);
  CHECK(compare(out / "a", out / "missing", 1e-4).exit_code == 2);
  fs::remove_all(out);
}

TEST_CASE("catalog listing") {
  const auto all = list_catalog(MCF_SCENARIO_DIR);
  CHECK(all.size() >= 8);
  for (std::size_t i = 1; i < all.size(); ++i) { CHECK(all[i - 1].name < all[i].name); }
  for (const auto& e : all) { CHECK_FALSE(e.anchor.empty()); }
  CHECK(list_catalog(MCF_SCENARIO_DIR, "no-such-scenario").empty());
  const auto bowls = list_catalog(MCF_SCENARIO_DIR, "bowl");
  CHECK(bowls.size() == 2);
  CHECK_THROWS_AS((void)list_catalog("/nonexistent"), ConfigError);
}
