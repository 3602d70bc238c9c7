#include <algorithm>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mcf/scenario.hpp"

namespace sc = mcf::scenario;

namespace {

int run_all(const std::vector<std::string>& files, const std::string& out_dir, std::size_t resolution,
            std::size_t jobs) {
  std::vector<sc::Config> configs;
  int worst = 0;
  for (const auto& f : files) {
    try {
      sc::Config c = sc::load_config(f);
      if (!out_dir.empty()) { c.output_dir = out_dir; }
      if (resolution > 0) { c.resolution = resolution; }
      configs.push_back(std::move(c));
    } catch (const sc::ConfigError& e) {
      fmt::print(stderr, "config error: {}\n", e.what());
      worst = std::max(worst, 2);
    }
  }
  for (std::size_t i = 0; i < configs.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (configs[i].name == configs[j].name && configs[i].output_dir == configs[j].output_dir) {
        fmt::print(stderr, "config error: scenario '{}' is given twice\n", configs[i].name);
        return 2;
      }
    }
  }

  std::vector<sc::Outcome> outcomes(configs.size());
  for (std::size_t start = 0; start < configs.size(); start += jobs) {
    std::vector<std::future<sc::Outcome>> batch;
    const std::size_t stop = std::min(configs.size(), start + jobs);
    for (std::size_t i = start; i < stop; ++i) {
      batch.push_back(std::async(std::launch::async, [&c = configs[i]] { return sc::run(c); }));
    }
    for (std::size_t i = start; i < stop; ++i) { outcomes[i] = batch[i - start].get(); }
  }

  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& o = outcomes[i];
    fmt::print("{}: {} (exit {})\n", configs[i].name, o.message, o.exit_code);
    for (const auto& a : o.assertions) {
      if (a.passed) { continue; }
      if (a.relation == "==") {
        fmt::print("  FAIL {}: {} != {}\n", a.name, a.label, a.expected_label);
      } else if (a.relation == "in") {
        fmt::print("  FAIL {}: {:.10g} not in [{:.10g}, {:.10g}]\n", a.name, a.value, a.lo, a.hi);
      } else {
        fmt::print("  FAIL {}: {:.10g} {} {:.10g} does not hold\n", a.name, a.value, a.relation, a.lo);
      }
    }
    if (o.exit_code <= 1) { fmt::print("  -> {}\n", o.directory.string()); }
    worst = std::max(worst, o.exit_code);
  }
  return worst;
}

int list(const std::string& dir, const std::string& filter) {
  std::vector<sc::CatalogEntry> entries;
  try {
    entries = sc::list_catalog(dir, filter);
  } catch (const sc::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 2;
  }
  fmt::print("{:<16} {:<15} {}\n", "name", "kind", "anchor");
  for (const auto& e : entries) { fmt::print("{:<16} {:<15} {}\n", e.name, e.kind, e.anchor); }
  return 0;
}

int compare(const std::string& a, const std::string& b, double tol) {
  const sc::Comparison c = sc::compare(a, b, tol);
  if (c.exit_code == 2) {
    fmt::print(stderr, "cannot read summary.json from {} or {}\n", a, b);
    return 2;
  }
  fmt::print("{:<36} {:>18} {:>18} {:>11} {:>11}  {}\n", "key", "a", "b", "abs", "rel", "status");
  for (const auto& r : c.rows) {
    fmt::print("{:<36} {:>18} {:>18} {:>11.3e} {:>11.3e}  {}\n", r.key, r.a, r.b, r.abs_diff, r.rel_diff,
               r.exceeded ? "DIFF" : "ok");
  }
  fmt::print("{}\n", c.exit_code == 0 ? "summaries agree" : "summaries differ");
  return c.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for convex ancient curve-shortening flows and translators"};
  app.require_subcommand(1);

  std::vector<std::string> configs;
  std::string out_dir;
  std::size_t resolution = 0;
  std::size_t jobs       = 1;
  auto* run = app.add_subcommand("run", "Run scenarios and write flow.csv, diagnostics.csv and summary.json");
  run->add_option("--config", configs, "Scenario file (repeatable)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  run->add_option("--resolution", resolution, "Gauss-grid size N (overrides resolution)");
  run->add_option("--jobs", jobs, "Scenarios run concurrently")->check(CLI::PositiveNumber);

  std::string dir = MCF_SCENARIO_DIR;
  std::string filter;
  auto* ls = app.add_subcommand("list", "List catalog scenarios");
  ls->add_option("filter", filter, "Substring of name, kind or anchor");
  ls->add_option("--dir", dir, "Scenario directory");

  std::string a;
  std::string b;
  double tol = 1e-3;
  auto* cmp  = app.add_subcommand("compare", "Compare two run summaries");
  cmp->add_option("a", a, "Run directory or summary.json")->required();
  cmp->add_option("b", b, "Run directory or summary.json")->required();
  cmp->add_option("--tol", tol, "Relative tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*run) { return run_all(configs, out_dir, resolution, jobs); }
  if (*ls) { return list(dir, filter); }
  return compare(a, b, tol);
}
