#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mcf/errors.hpp"
#include "mcf/vec2.hpp"

namespace mcf::scenario {

/// Malformed or invalid scenario file; maps to exit status 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Kind { Circle, Oval, Ellipse, CustomSupport, Grim, Bowl };

struct Config {
  std::string name;
  /// Free text shown by `list`.
  std::string anchor;
  std::string description;

  Kind kind{Kind::Circle};
  double t0{-1.0};
  std::optional<double> t_end;
  double a{2.0};
  double b{1.0};
  std::vector<double> values;
  int dimension{2};
  double r_max{100.0};

  std::size_t resolution{256};
  /// Frames per decade of -t.
  double cadence{50.0};
  std::vector<std::string> diagnostics;
  std::filesystem::path output_dir{"runs"};

  /// Frames before this time are a warm-up and are dropped.
  std::optional<double> record_from;
  std::vector<double> checkpoints;
  /// Every k-th frame goes to flow.csv.
  std::size_t flow_stride{1};
  std::vector<double> blowdown_lambdas;
  std::optional<Vec2> slab_normal;
  std::size_t arrival_samples{0};
  double arrival_lo{0.0};
  double arrival_hi{0.0};
};

[[nodiscard]] std::string_view to_string(Kind k);

/// Parses `key = value` lines; `#` starts a comment. Unknown or repeated keys
/// are errors. Throws ConfigError.
[[nodiscard]] Config parse_config(std::istream& in);
[[nodiscard]] Config load_config(const std::filesystem::path& file);

/// Throws ConfigError unless the config is runnable.
void validate(const Config& c);

struct Assertion {
  std::string name;
  double value{0.0};
  /// "<=", ">=", "==" (label) or "in" (closed interval [lo, hi]).
  std::string relation;
  double lo{0.0};
  double hi{0.0};
  std::string label;
  std::string expected_label;
  bool passed{false};
};

struct Outcome {
  int exit_code{0};
  std::filesystem::path directory;
  std::string message;
  std::vector<Assertion> assertions;
};

/// Runs the scenario into output_dir/name, replacing any previous run once
/// all files are written. Exit codes: 0 success, 1 failed assertion,
/// 2 config error, 3 numerical failure.
[[nodiscard]] Outcome run(const Config& c);

struct CatalogEntry {
  std::string name;
  std::string kind;
  std::string anchor;
  std::string description;
  std::filesystem::path file;
};

/// Every `*.cfg` under `dir` whose name, kind or anchor contains `filter`,
/// sorted by name.
[[nodiscard]] std::vector<CatalogEntry> list_catalog(const std::filesystem::path& dir, std::string_view filter = {});

struct KeyDiff {
  std::string key;
  std::string a;
  std::string b;
  double abs_diff{0.0};
  double rel_diff{0.0};
  bool exceeded{false};
};

struct Comparison {
  int exit_code{0};
  std::vector<KeyDiff> rows;
};

/// Compares labels and constants of two summary.json files (or run
/// directories). A constant fails when |a - b| > tol·max(1, |a|, |b|); a label
/// fails when it differs; a key present on one side only fails. Missing or
/// unreadable files give exit code 2.
[[nodiscard]] Comparison compare(const std::filesystem::path& a, const std::filesystem::path& b, double tol);

}  // namespace mcf::scenario
