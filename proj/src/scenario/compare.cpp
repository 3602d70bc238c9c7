#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "mcf/scenario.hpp"

namespace mcf::scenario {

namespace {

using nlohmann::json;

std::optional<json> read_summary(std::filesystem::path p) {
  if (std::filesystem::is_directory(p)) { p /= "summary.json"; }
  std::ifstream in(p);
  if (!in) { return std::nullopt; }
  try {
    return json::parse(in);
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

std::string show(const json& v) { return v.is_number() ? fmt::format("{:.10g}", v.get<double>()) : v.dump(); }

void compare_section(const json& a, const json& b, std::string_view section, double tol, Comparison& out) {
  const json empty = json::object();
  const json& sa   = a.contains(section) ? a.at(std::string(section)) : empty;
  const json& sb   = b.contains(section) ? b.at(std::string(section)) : empty;
  std::set<std::string> keys;
  for (const auto& [k, v] : sa.items()) { keys.insert(k); }
  for (const auto& [k, v] : sb.items()) { keys.insert(k); }
  for (const auto& k : keys) {
    KeyDiff d;
    d.key = fmt::format("{}.{}", section, k);
    if (!sa.contains(k) || !sb.contains(k)) {
      d.a        = sa.contains(k) ? show(sa.at(k)) : "-";
      d.b        = sb.contains(k) ? show(sb.at(k)) : "-";
      d.exceeded = true;
    } else {
      const json& x = sa.at(k);
      const json& y = sb.at(k);
      d.a           = show(x);
      d.b           = show(y);
      if (x.is_number() && y.is_number()) {
        const double u = x.get<double>();
        const double v = y.get<double>();
        d.abs_diff     = std::abs(u - v);
        d.rel_diff     = d.abs_diff / std::max({std::abs(u), std::abs(v), 1e-300});
        d.exceeded     = d.abs_diff > tol * std::max({1.0, std::abs(u), std::abs(v)});
      } else {
        d.exceeded = x != y;
      }
    }
    out.rows.push_back(std::move(d));
  }
}

}  // namespace

Comparison compare(const std::filesystem::path& a, const std::filesystem::path& b, double tol) {
  Comparison out;
  const auto ja = read_summary(a);
  const auto jb = read_summary(b);
  if (!ja || !jb) {
    out.exit_code = 2;
    return out;
  }
  compare_section(*ja, *jb, "labels", tol, out);
  compare_section(*ja, *jb, "constants", tol, out);
  const bool bad = std::any_of(out.rows.begin(), out.rows.end(), [](const auto& r) { return r.exceeded; });
  out.exit_code  = bad ? 1 : 0;
  return out;
}

}  // namespace mcf::scenario
