#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "mcf/diagnostics.hpp"
#include "mcf/scenario.hpp"

namespace mcf::scenario {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) { return {}; }
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) { out.push_back(cur); }
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) { out.push_back(cur); }
  return out;
}

double to_number(const std::string& key, std::string_view text) {
  double v          = 0.0;
  const auto* begin = text.data();
  const auto* end   = text.data() + text.size();
  const auto res    = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v)) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", key, text));
  }
  return v;
}

std::vector<double> to_numbers(const std::string& key, std::string_view text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) { out.push_back(to_number(key, item)); }
  return out;
}

std::size_t to_count(const std::string& key, std::string_view text) {
  const double v = to_number(key, text);
  if (v < 0.0 || v != std::floor(v) || v > 1e9) {
    throw ConfigError(fmt::format("{}: '{}' is not a non-negative integer", key, text));
  }
  return static_cast<std::size_t>(v);
}

Kind to_kind(std::string_view s) {
  static const std::map<std::string, Kind, std::less<>> kinds{
      {"circle", Kind::Circle}, {"oval", Kind::Oval}, {"ellipse", Kind::Ellipse},
      {"custom_support", Kind::CustomSupport}, {"grim", Kind::Grim}, {"bowl", Kind::Bowl}};
  const auto it = kinds.find(s);
  if (it == kinds.end()) { throw ConfigError(fmt::format("initial.kind: unknown kind '{}'", s)); }
  return it->second;
}

bool is_flow(Kind k) { return k != Kind::Grim && k != Kind::Bowl; }

}  // namespace

std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::Circle: return "circle";
    case Kind::Oval: return "oval";
    case Kind::Ellipse: return "ellipse";
    case Kind::CustomSupport: return "custom_support";
    case Kind::Grim: return "grim";
    case Kind::Bowl: return "bowl";
  }
  return "?";
}

Config parse_config(std::istream& in) {
  Config c;
  std::set<std::string> seen;
  bool has_resolution = false;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) { line.erase(hash); }
    const std::string text = trim(line);
    if (text.empty()) { continue; }
    const auto eq = text.find('=');
    if (eq == std::string::npos) { throw ConfigError(fmt::format("line {}: expected key = value", number)); }
    const std::string key   = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    if (key.empty()) { throw ConfigError(fmt::format("line {}: empty key", number)); }
    if (!seen.insert(key).second) { throw ConfigError(fmt::format("line {}: duplicate key '{}'", number, key)); }

    if (key == "name") {
      c.name = value;
    } else if (key == "anchor") {
      c.anchor = value;
    } else if (key == "description") {
      c.description = value;
    } else if (key == "initial.kind") {
      c.kind = to_kind(value);
    } else if (key == "initial.t0") {
      c.t0 = to_number(key, value);
    } else if (key == "initial.a") {
      c.a = to_number(key, value);
    } else if (key == "initial.b") {
      c.b = to_number(key, value);
    } else if (key == "initial.values") {
      c.values = to_numbers(key, value);
    } else if (key == "initial.n") {
      c.dimension = static_cast<int>(to_count(key, value));
    } else if (key == "initial.r_max") {
      c.r_max = to_number(key, value);
    } else if (key == "t_end") {
      c.t_end = to_number(key, value);
    } else if (key == "resolution") {
      c.resolution   = to_count(key, value);
      has_resolution = true;
    } else if (key == "cadence") {
      c.cadence = to_number(key, value);
    } else if (key == "diagnostics") {
      c.diagnostics = split_list(value);
    } else if (key == "output_dir") {
      c.output_dir = value;
    } else if (key == "record_from") {
      c.record_from = to_number(key, value);
    } else if (key == "checkpoints") {
      c.checkpoints = to_numbers(key, value);
    } else if (key == "flow_stride") {
      c.flow_stride = to_count(key, value);
    } else if (key == "blowdown.lambdas") {
      c.blowdown_lambdas = to_numbers(key, value);
    } else if (key == "slab_normal") {
      const auto v = to_numbers(key, value);
      if (v.size() != 2) { throw ConfigError("slab_normal: expected two numbers"); }
      c.slab_normal = Vec2{v[0], v[1]};
    } else if (key == "arrival.samples") {
      c.arrival_samples = to_count(key, value);
    } else if (key == "arrival.window") {
      const auto v = to_numbers(key, value);
      if (v.size() != 2) { throw ConfigError("arrival.window: expected two times"); }
      c.arrival_lo = v[0];
      c.arrival_hi = v[1];
    } else {
      throw ConfigError(fmt::format("line {}: unknown key '{}'", number, key));
    }
  }
  if (c.kind == Kind::CustomSupport && !has_resolution) { c.resolution = c.values.size(); }
  return c;
}

Config load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) { throw ConfigError(fmt::format("cannot open {}", file.string())); }
  try {
    return parse_config(in);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", file.string(), e.what()));
  }
}

void validate(const Config& c) {
  if (c.name.empty()) { throw ConfigError("name is required"); }
  const bool safe = std::all_of(c.name.begin(), c.name.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.';
  });
  if (!safe || c.name.front() == '.') { throw ConfigError(fmt::format("name '{}' is not a plain file name", c.name)); }
  if (c.t_end && !(*c.t_end < 0.0)) {
    throw ConfigError(fmt::format("t_end must be negative for an ancient flow, got {}", *c.t_end));
  }
  if (c.resolution < 64) { throw ConfigError(fmt::format("resolution must be at least 64, got {}", c.resolution)); }
  if (!(c.cadence > 0.0)) { throw ConfigError("cadence must be positive"); }
  if (c.flow_stride == 0) { throw ConfigError("flow_stride must be positive"); }
  for (const auto& d : c.diagnostics) {
    const auto known = known_channels();
    if (std::find(known.begin(), known.end(), d) == known.end()) {
      throw ConfigError(fmt::format("diagnostics: unknown channel '{}'", d));
    }
  }
  for (double l : c.blowdown_lambdas) {
    if (!(l > 0.0 && l <= 1.0)) { throw ConfigError(fmt::format("blowdown.lambdas: {} is not in (0, 1]", l)); }
  }
  if (c.slab_normal && norm(*c.slab_normal) == 0.0) { throw ConfigError("slab_normal must be non-zero"); }

  if (!is_flow(c.kind)) {
    if (c.kind == Kind::Bowl) {
      if (c.dimension < 2) { throw ConfigError("bowl needs initial.n >= 2"); }
      if (!(c.r_max > 1.0)) { throw ConfigError("bowl needs initial.r_max > 1"); }
    }
    return;
  }
  if (!c.t_end) { throw ConfigError("t_end is required"); }
  if (!(c.t0 < *c.t_end)) { throw ConfigError(fmt::format("initial.t0 = {} must precede t_end = {}", c.t0, *c.t_end)); }
  if (c.record_from && !(*c.record_from >= c.t0 && *c.record_from < *c.t_end)) {
    throw ConfigError("record_from must lie in [initial.t0, t_end)");
  }
  for (double t : c.checkpoints) {
    if (!(t > c.t0 && t < *c.t_end)) { throw ConfigError(fmt::format("checkpoint {} is outside (t0, t_end)", t)); }
  }
  if (c.kind == Kind::Ellipse && !(c.a > 0.0 && c.b > 0.0)) { throw ConfigError("ellipse axes must be positive"); }
  if (c.kind == Kind::CustomSupport) {
    if (c.values.size() != c.resolution) {
      throw ConfigError(fmt::format("initial.values has {} entries but resolution is {}", c.values.size(), c.resolution));
    }
  }
  if (c.arrival_samples > 0 && !(c.arrival_lo < c.arrival_hi)) {
    throw ConfigError("arrival.window must be an increasing pair of times");
  }
}

std::vector<CatalogEntry> list_catalog(const std::filesystem::path& dir, std::string_view filter) {
  std::vector<CatalogEntry> out;
  if (!std::filesystem::is_directory(dir)) { throw ConfigError(fmt::format("no scenario directory {}", dir.string())); }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".cfg") { continue; }
    const Config c = load_config(entry.path());
    CatalogEntry e{c.name, std::string(to_string(c.kind)), c.anchor, c.description, entry.path()};
    const bool hit = filter.empty() || e.name.find(filter) != std::string::npos ||
                     e.kind.find(filter) != std::string::npos || e.anchor.find(filter) != std::string::npos;
    if (hit) { out.push_back(std::move(e)); }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

}  // namespace mcf::scenario
