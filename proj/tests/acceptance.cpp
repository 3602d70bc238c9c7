// One PASS/FAIL line per acceptance criterion. Scenario runs come from the
// shipped catalog; fixtures without a scenario are built directly.
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <unistd.h>

#include "mcf/csf_engine.hpp"
#include "mcf/diagnostics.hpp"
#include "mcf/scenario.hpp"
#include "mcf/soliton_catalog.hpp"

using namespace mcf;
namespace sc = mcf::scenario;
namespace fs = std::filesystem;

namespace {

struct Run {
  sc::Outcome outcome;
  std::map<std::string, sc::Assertion> by_name;
};

Run run_scenario(const std::string& name, const fs::path& out) {
  sc::Config c = sc::load_config(fs::path(MCF_SCENARIO_DIR) / (name + ".cfg"));
  c.output_dir = out;
  Run r{sc::run(c), {}};
  for (const auto& a : r.outcome.assertions) { r.by_name[a.name] = a; }
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Criterion {
 public:
  explicit Criterion(std::string title) : title_(std::move(title)) {}

  void check(bool ok, const std::string& what) {
    ok_ = ok_ && ok;
    notes_.push_back(fmt::format("{}{}", ok ? "" : "!", what));
  }
  // Looks up a scenario assertion by name.
  void expect(const Run& r, const std::string& scenario, const std::string& name) {
    const auto it = r.by_name.find(name);
    if (it == r.by_name.end()) {
      check(false, fmt::format("{}.{} missing (exit {}: {})", scenario, name, r.outcome.exit_code, r.outcome.message));
      return;
    }
    const auto& a = it->second;
    if (a.relation == "==") {
      check(a.passed, fmt::format("{}.{}={}", scenario, name, a.label));
    } else {
      check(a.passed, fmt::format("{}.{}={:.4g}", scenario, name, a.value));
    }
  }

  bool report() const {
    std::string joined;
    for (const auto& n : notes_) { joined += (joined.empty() ? "" : "; ") + n; }
    fmt::print("{} {}: {}\n", ok_ ? "PASS" : "FAIL", title_, joined);
    return ok_;
  }

 private:
  std::string title_;
  bool ok_{true};
  std::vector<std::string> notes_;
};

}  // namespace

int main() {
  const fs::path out = fs::temp_directory_path() / fmt::format("mcf_acceptance_{}", ::getpid());
  const fs::path rerun = out / "rerun";
  fs::remove_all(out);

  const std::vector<std::string> names{"oval", "circle", "circle_n512", "ellipse", "ellipse_n512",
                                       "grim", "bowl_n2", "bowl_n3"};
  std::map<std::string, std::future<Run>> pending;
  for (const auto& n : names) { pending[n] = std::async(std::launch::async, run_scenario, n, out); }
  std::map<std::string, Run> runs;
  for (auto& [n, f] : pending) { runs[n] = f.get(); }
  const Run& circle  = runs["circle"];
  const Run& ellipse = runs["ellipse"];
  const Run& oval    = runs["oval"];

  std::vector<bool> results;

  {
    Criterion c("radius law");
    c.expect(circle, "circle", "radius_law_error");
    results.push_back(c.report());
  }
  {
    Criterion c("monotonicity");
    c.expect(circle, "circle", "theta_max_step");
    c.expect(ellipse, "ellipse", "theta_max_increase");
    c.expect(ellipse, "ellipse", "identity_mismatch");
    results.push_back(c.report());
  }
  {
    Criterion c("density values");
    const Timeslice line = straight_line({0.0, 0.0}, {0.0, 1.0}, 60.0, 1e-2, -1.0);
    const double plane   = gaussian_density(line, {{0.0, 0.0}, 0.0});
    c.check(std::abs(plane - 1.0) <= 1e-10, fmt::format("plane={:.12f}", plane));
    c.expect(circle, "circle", "theta_const_error");
    const std::vector<double> times{-2500.0, -400.0};
    const std::vector<double> lambdas{0.05, 0.02};
    const BlowDown b     = blow_down(angenent_oval_flow(times, 256), lambdas, {{0.0, 0.0}, 0.0});
    const double theta02 = b.densities.back().second;
    c.check(theta02 >= 1.9 && theta02 <= 2.0, fmt::format("oval Theta(0.02)={:.5f}", theta02));
    c.check(b.label == DensityClass::PlaneMult2, fmt::format("oval label {}", to_string(b.label)));
    c.expect(oval, "oval", "blowdown");
    results.push_back(c.report());
  }
  {
    Criterion c("Gaussian area bound");
    std::vector<double> taus;
    for (int k = 0; k <= 40; ++k) { taus.push_back(std::pow(10.0, -2.0 + 0.1 * k)); }
    const GaussianBound g = gaussian_bound_check(straight_line({0.0, 0.0}, {0.0, 1.0}, 60.0, 1e-2, 0.0), taus);
    c.check(g.measured <= 11.2546 && g.bound <= 11.2546, fmt::format("line={:.4f} bound={:.4f}", g.measured, g.bound));
    c.expect(circle, "circle", "gaussian_bound");
    c.expect(ellipse, "ellipse", "gaussian_bound");
    results.push_back(c.report());
  }
  {
    Criterion c("Harnack");
    c.expect(circle, "circle", "harnack_min");
    c.expect(oval, "oval", "harnack_min");
    results.push_back(c.report());
  }
  {
    Criterion c("arrival time");
    for (const auto* r : {&circle, &oval}) {
      const std::string n = r == &circle ? "circle" : "oval";
      c.expect(*r, n, "arrival_max_eigenvalue");
      c.expect(*r, n, "arrival_evaluated");
      c.expect(*r, n, "arrival_level_set");
    }
    c.expect(circle, "circle", "arrival_closed_form_error");
    results.push_back(c.report());
  }
  {
    Criterion c("asymptotic translator");
    c.expect(oval, "oval", "grim_distance");
    c.expect(oval, "oval", "tip_speed");
    results.push_back(c.report());
  }
  {
    Criterion c("translator residuals");
    c.expect(runs["grim"], "grim", "translator_residual");
    c.expect(runs["grim"], "grim", "slab_width");
    for (const std::string n : {"bowl_n2", "bowl_n3"}) {
      c.expect(runs[n], n, "translator_residual");
      c.expect(runs[n], n, "far_field_ratio");
      c.expect(runs[n], n, "blowdown_ratio_0.05");
      c.expect(runs[n], n, "slab");
    }
    results.push_back(c.report());
  }
  {
    Criterion c("Wang dichotomy");
    for (const std::string n : {"width_min_sup", "wang_alpha", "wang_alpha_early_min", "wang_alpha_early_max",
                                "gradient_slack"}) {
      c.expect(oval, "oval", n);
    }
    results.push_back(c.report());
  }
  {
    Criterion c("rigidity");
    c.expect(circle, "circle", "rescaled_diam");
    c.expect(circle, "circle", "typeI");
    c.expect(circle, "circle", "eccentricity");
    c.expect(oval, "oval", "rescaled_diam_first");
    results.push_back(c.report());
  }
  {
    Criterion c("determinism");
    for (const std::string n : {"circle", "grim"}) {
      const Run again = run_scenario(n, rerun);
      for (const std::string f : {"flow.csv", "diagnostics.csv", "summary.json"}) {
        c.check(slurp(out / n / f) == slurp(rerun / n / f), fmt::format("{}/{} identical", n, f));
      }
    }
    for (const std::string n : {"circle", "ellipse"}) {
      const sc::Comparison cmp = sc::compare(out / n, out / (n + "_n512"), 1e-3);
      std::string worst        = "none";
      double gap               = 0.0;
      double theta_gap         = 0.0;
      for (const auto& row : cmp.rows) {
        if (row.abs_diff >= gap) {
          gap   = row.abs_diff;
          worst = row.key;
        }
        if (row.key.rfind("constants.theta_", 0) == 0) { theta_gap = std::max(theta_gap, row.abs_diff); }
      }
      c.check(cmp.exit_code == 0, fmt::format("{} N=256 vs 512 within 1e-3 (largest gap {} {:.2e})", n, worst, gap));
      c.check(theta_gap < 1e-4, fmt::format("{} theta gap {:.2e}", n, theta_gap));
    }
    results.push_back(c.report());
  }

  fs::remove_all(out);
  const auto passed = std::count(results.begin(), results.end(), true);
  fmt::print("{}/{} criteria passed\n", passed, results.size());
  return passed == static_cast<long>(results.size()) ? 0 : 1;
}
