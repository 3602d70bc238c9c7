#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include <fmt/format.h>
#include <json.hpp>

#include "mcf/csf_engine.hpp"
#include "mcf/diagnostics.hpp"
#include "mcf/scenario.hpp"
#include "mcf/soliton_catalog.hpp"
#include "mcf/translator_engine.hpp"

namespace mcf::scenario {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kPi = std::numbers::pi;

std::string num(double v) { return fmt::format("{:.17g}", v); }

struct Artifacts {
  std::string flow_csv{"t,theta_index,h\n"};
  std::string diagnostics_csv{"t,channel,value\n"};
  std::string profile_csv;
  json labels     = json::object();
  json constants  = json::object();
  std::vector<Assertion> assertions;

  void at_most(std::string name, double value, double bound) {
    assertions.push_back({std::move(name), value, "<=", bound, bound, {}, {}, value <= bound});
  }
  void at_least(std::string name, double value, double bound) {
    assertions.push_back({std::move(name), value, ">=", bound, bound, {}, {}, value >= bound});
  }
  void above(std::string name, double value, double bound) {
    assertions.push_back({std::move(name), value, ">", bound, bound, {}, {}, value > bound});
  }
  void within(std::string name, double value, double lo, double hi) {
    assertions.push_back({std::move(name), value, "in", lo, hi, {}, {}, value >= lo && value <= hi});
  }
  void label_is(std::string name, std::string label, std::string expected) {
    const bool ok = label == expected;
    assertions.push_back({std::move(name), 0.0, "==", 0.0, 0.0, std::move(label), std::move(expected), ok});
  }
  void diagnostic(double t, std::string_view channel, double value) {
    diagnostics_csv += fmt::format("{},{},{}\n", num(t), channel, num(value));
  }
};

SupportFunction initial_support(const Config& c) {
  switch (c.kind) {
    case Kind::Circle: return shrinking_circle(c.t0, c.resolution);
    case Kind::Oval: return angenent_oval_support(c.t0, c.resolution);
    case Kind::Ellipse: return ellipse_support(c.a, c.b, c.resolution);
    case Kind::CustomSupport: return SupportFunction(c.values);
    default: break;
  }
  throw ConfigError("not a curve-flow scenario");
}

std::vector<double> tau_grid() {
  std::vector<double> taus;
  for (int k = 0; k <= 40; ++k) { taus.push_back(std::pow(10.0, -2.0 + 0.1 * k)); }
  return taus;
}

Vec2 frame_point(const SupportFunction& h, std::size_t i) {
  const Vec2 nu = unit_at(h.theta(i));
  return h[i] * nu + support_derivative(h)[i] * perp(nu);
}

void arrival_checks(const Config& c, const SupportFlow& flow, SpacetimePoint base, Artifacts& a) {
  const auto samples = frame_samples(flow, c.arrival_samples, c.arrival_lo, c.arrival_hi);
  const ArrivalTime u(flow, base.x);
  const ArrivalHessianCheck formula = arrival_hessian_check(flow, samples);

  std::vector<Vec2> points;
  std::vector<double> expected;
  for (const auto& s : samples) {
    if (c.kind == Kind::Circle) {
      // Halfway in time between two frames, where u is interpolated.
      const double t = 0.5 * (flow.times[s.frame] + flow.times[s.frame + 1]);
      points.push_back(std::sqrt(-2.0 * (t - base.t)) * unit_at(flow.frames[s.frame].theta(s.index)) + base.x);
      expected.push_back(t);
    } else {
      points.push_back(frame_point(flow.frames[s.frame], s.index));
      expected.push_back(flow.times[s.frame]);
    }
  }
  double residual  = 0.0;
  double value_err = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    try {
      const Vec2 one[] = {points[k]};
      residual         = std::max(residual, level_set_residual(u, one, 0.0));
      value_err        = std::max(value_err, std::abs(u.value(points[k]) - expected[k]));
      ++used;
    } catch (const DegenerateGradient&) {
    } catch (const StencilFailure&) {
    } catch (const OutOfSweep&) {
    }
  }
  a.constants["arrival_samples"]        = samples.size();
  a.constants["arrival_evaluated"]      = used;
  a.constants["arrival_max_eigenvalue"] = formula.max_eigenvalue;
  a.constants["arrival_level_set"]      = residual;
  a.constants["arrival_value_error"]    = value_err;
  a.at_most("arrival_max_eigenvalue", formula.max_eigenvalue, 1e-6);
  a.at_least("arrival_evaluated", static_cast<double>(used), 100.0);
  a.at_most("arrival_level_set", residual, 5e-3);

  if (c.kind == Kind::Circle) {
    double closed = 0.0;
    for (const auto& p : points) {
      const Vec2 d = p - base.x;
      closed       = std::max(closed, std::abs(u.value(p) - base.t + 0.5 * dot(d, d)));
    }
    a.constants["arrival_closed_form_error"] = closed;
    a.at_most("arrival_closed_form_error", closed, 1e-4);
    const ArrivalHessianCheck cross = arrival_hessian_check(flow, samples, &u, 0.0);
    if (cross.max_mismatch) { a.constants["arrival_hessian_mismatch"] = *cross.max_mismatch; }
  }
}

void circle_checks(const SupportFlow& flow, SpacetimePoint base, Artifacts& a) {
  double radius_err = 0.0;
  double theta_err  = 0.0;
  double theta_step = 0.0;
  double prev       = 0.0;
  const double theta_circle = std::sqrt(2.0 * kPi / std::numbers::e);
  for (std::size_t i = 0; i < flow.size(); ++i) {
    const double r = std::sqrt(-2.0 * flow.times[i]);
    for (double h : flow.frames[i].values()) { radius_err = std::max(radius_err, std::abs(h - r) / r); }
    const double theta = gaussian_density(embed(flow.frames[i], flow.times[i]), base);
    theta_err          = std::max(theta_err, std::abs(theta - theta_circle));
    if (i > 0) { theta_step = std::max(theta_step, std::abs(theta - prev)); }
    prev = theta;
  }
  a.constants["radius_law_error"] = radius_err;
  a.constants["theta_const_error"] = theta_err;
  a.constants["theta_max_step"]   = theta_step;
  a.at_most("radius_law_error", radius_err, 1e-4);
  a.at_most("theta_const_error", theta_err, 1e-3);
  a.at_most("theta_max_step", theta_step, 1e-8);

  const DiagnosticSeries r = rigidity_series(flow, base.t);
  auto worst = [&](const std::string& channel, double target) {
    double w = target;
    for (double v : r.channels.at(channel)) {
      if (std::abs(v - target) > std::abs(w - target)) { w = v; }
    }
    return w;
  };
  const double diam = worst("rescaled_diam", 2.0 * std::numbers::sqrt2);
  const double type = worst("typeI", 1.0 / std::numbers::sqrt2);
  const double ecc  = worst("eccentricity", 1.0);
  a.constants["rescaled_diam_worst"] = diam;
  a.constants["typeI_worst"]         = type;
  a.constants["eccentricity_worst"]  = ecc;
  a.within("rescaled_diam", diam, 2.0 * std::numbers::sqrt2 - 1e-4, 2.0 * std::numbers::sqrt2 + 1e-4);
  a.within("typeI", type, 1.0 / std::numbers::sqrt2 - 1e-4, 1.0 / std::numbers::sqrt2 + 1e-4);
  a.within("eccentricity", ecc, 1.0 - 1e-6, 1.0 + 1e-6);
}

void oval_checks(const Config& c, const SupportFlow& flow, SpacetimePoint base, DensityClass label, Artifacts& a) {
  double widest = 0.0;
  for (const auto& h : flow.frames) {
    const auto w = widths(h);
    widest       = std::max(widest, *std::min_element(w.begin(), w.end()));
  }
  a.constants["width_min_sup"] = widest;
  a.at_most("width_min_sup", widest, kPi);

  const std::vector<double> first{flow.times.front()};
  const AsymptoticTranslator tip = asymptotic_translator(flow, {0.0, 1.0}, first);
  std::vector<double> xs;
  for (int k = 0; k <= 200; ++k) { xs.push_back(-1.0 + 0.01 * k); }
  const double grim = graph_distance(tip.slices[0], {0.0, -1.0}, grim_reaper(0.0, xs), 1.0);
  a.constants["grim_distance"] = grim;
  a.constants["tip_speed"]     = tip.speeds[0];
  a.at_most("grim_distance", grim, 1e-2);
  a.within("tip_speed", tip.speeds[0], 0.95, 1.0);

  const double diam = diameter(embed(flow.frames.front()).points) / std::sqrt(base.t - flow.times.front());
  a.constants["rescaled_diam_first"] = diam;
  a.above("rescaled_diam_first", diam, 10.0);

  if (c.slab_normal) {
    const WangClaim w = wang_claim1_check(flow, *c.slab_normal, label);
    a.constants["wang_alpha"]           = w.alpha;
    a.constants["wang_alpha_early_min"] = w.alpha_early_min;
    a.constants["wang_alpha_early_max"] = w.alpha_early_max;
    a.above("wang_alpha", w.alpha, 0.0);
    a.at_least("wang_alpha_early_min", w.alpha_early_min, 0.9 * kPi);
    a.at_most("wang_alpha_early_max", w.alpha_early_max, 1.1 * kPi);
    const GradientEstimate g = gradient_estimate_check(flow.frames.front(), *c.slab_normal, 50);
    a.constants["gradient_slack"] = g.min_slack;
    a.at_least("gradient_slack", g.min_slack, 0.0);
  }
}

void run_flow(const Config& c, Artifacts& a) {
  StepPolicy policy;
  policy.frames_per_decade = c.cadence;
  policy.checkpoints       = c.checkpoints;
  if (c.record_from) { policy.checkpoints.push_back(*c.record_from); }

  SupportFlow flow;
  bool extinct = false;
  try {
    flow = evolve(initial_support(c), c.t0, *c.t_end, policy);
  } catch (const ExtinctionReached& e) {
    flow    = e.partial();
    extinct = true;
  }
  if (c.record_from) { flow = trim_before(flow, *c.record_from); }
  if (flow.size() < 3) { throw InsufficientHistory("fewer than three frames were recorded"); }

  for (std::size_t i = 0; i < flow.size(); ++i) {
    if (i % c.flow_stride != 0 && i + 1 != flow.size()) { continue; }
    const auto h = flow.frames[i].values();
    for (std::size_t j = 0; j < h.size(); ++j) { a.flow_csv += fmt::format("{},{},{}\n", num(flow.times[i]), j, num(h[j])); }
  }

  const SpacetimePoint base = extinction_estimate(flow);
  const DiagnosticSeries series = diagnostic_series(flow, base, c.diagnostics, c.slab_normal);
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    for (const auto& ch : c.diagnostics) {
      const auto it = series.channels.find(ch);
      if (it != series.channels.end()) { a.diagnostic(series.times[i], ch, it->second[i]); }
    }
  }

  a.labels["extinct_early"]     = extinct;
  a.constants["frames"]         = flow.size();
  a.constants["t_first"]        = flow.times.front();
  a.constants["t_last"]         = flow.times.back();
  a.constants["extinction_time"] = base.t;
  a.constants["extinction_x"]   = base.x.x;
  a.constants["extinction_y"]   = base.x.y;
  const double theta_first = gaussian_density(embed(flow.frames.front(), flow.times.front()), base);
  a.constants["theta_first"]       = theta_first;
  a.constants["theta_last"]        = gaussian_density(embed(flow.frames.back(), flow.times.back()), base);
  const double rise                = monotonicity_check(flow, base);
  a.constants["theta_max_increase"] = rise;
  const double harnack              = harnack_min(flow);
  a.constants["harnack_min"]        = harnack;

  DensityClass label = DensityClass::Inconclusive;
  if (!c.blowdown_lambdas.empty()) {
    const BlowDown b = blow_down(flow, c.blowdown_lambdas, base);
    for (const auto& [lambda, theta] : b.densities) { a.constants[fmt::format("blowdown_theta_{:g}", lambda)] = theta; }
    label                = b.label;
    a.labels["blowdown"] = std::string(to_string(b.label));
  }

  if (c.kind == Kind::Circle || c.kind == Kind::Ellipse) {
    const GaussianBound g = gaussian_bound_check(embed(flow.frames.front(), flow.times.front()), tau_grid());
    a.constants["gaussian_bound_measured"] = g.measured;
    a.at_most("gaussian_bound", g.measured, g.bound);
  }

  switch (c.kind) {
    case Kind::Circle:
      circle_checks(flow, base, a);
      a.at_least("harnack_min", harnack, -1e-8);
      if (!c.blowdown_lambdas.empty()) { a.label_is("blowdown", a.labels["blowdown"].get<std::string>(), "Circle"); }
      break;
    case Kind::Ellipse: {
      const MonotonicityIdentity id = monotonicity_identity(flow, base);
      a.constants["identity_mismatch"] = id.max_relative_mismatch;
      a.at_most("theta_max_increase", rise, 1e-8);
      a.at_most("identity_mismatch", id.max_relative_mismatch, 2e-3);
      break;
    }
    case Kind::Oval:
      oval_checks(c, flow, base, label, a);
      a.at_least("harnack_min", harnack, -1e-8);
      if (!c.blowdown_lambdas.empty()) { a.label_is("blowdown", a.labels["blowdown"].get<std::string>(), "PlaneMult2"); }
      break;
    default: break;
  }
  if (c.arrival_samples > 0) { arrival_checks(c, flow, base, a); }
}

void run_grim(Artifacts& a) {
  const TranslatorSample s{grim_reaper_by_height(0.0, 40.0, 2000), {0.0, 1.0}};
  a.profile_csv = "x,y,curvature\n";
  for (std::size_t i = 0; i < s.slice.size(); ++i) {
    a.profile_csv += fmt::format("{},{},{}\n", num(s.slice.points[i].x), num(s.slice.points[i].y), num(s.slice.curvature[i]));
  }
  const double residual = translator_residual(s.slice, s.direction);
  const SlabClass slab  = slab_classify(s);
  a.diagnostic(0.0, "translator_residual", residual);
  a.diagnostic(0.0, "slab_width", slab.width);
  a.labels["slab"]                = slab.entire ? "Entire" : "Slab";
  a.constants["translator_residual"] = residual;
  a.constants["slab_width"]       = slab.width;
  a.at_most("translator_residual", residual, 1e-12);
  a.label_is("slab", a.labels["slab"].get<std::string>(), "Slab");
  a.within("slab_width", slab.width, kPi - 1e-6, kPi + 1e-6);
}

void run_bowl(const Config& c, Artifacts& a) {
  constexpr double step    = 1e-3;
  const RadialProfile prof = bowl_profile(c.dimension, c.r_max, step);
  a.profile_csv            = "r,u,du\n";
  for (std::size_t i = 0; i < prof.size(); i += 10) {
    a.profile_csv += fmt::format("{},{},{}\n", num(prof.radii[i]), num(prof.heights[i]), num(prof.slopes[i]));
  }
  const TranslatorSample meridian = bowl_meridian(prof);
  const double residual           = translator_residual(meridian.slice, meridian.direction);
  a.diagnostic(0.0, "translator_residual", residual);
  a.constants["translator_residual"] = residual;
  a.at_most("translator_residual", residual, 1e-8);

  const SlabClass slab = slab_classify(meridian);
  a.labels["slab"]     = slab.entire ? "Entire" : "Slab";
  a.label_is("slab", a.labels["slab"].get<std::string>(), "Entire");

  if (c.r_max >= 100.0) {
    const auto j        = static_cast<std::size_t>(std::lround(100.0 / step));
    const double ratio  = prof.heights[j] / 1e4;
    const double target = 1.0 / (2.0 * (c.dimension - 1));
    a.constants["far_field_ratio"] = ratio;
    a.within("far_field_ratio", ratio, 0.99 * target, 1.01 * target);
  }
  bool cylinder = !c.blowdown_lambdas.empty();
  for (double lambda : c.blowdown_lambdas) {
    const CylinderBlowDown b = translator_blowdown(prof, lambda);
    a.constants[fmt::format("blowdown_ratio_{:g}", lambda)] = b.ratio;
    a.within(fmt::format("blowdown_ratio_{:g}", lambda), b.ratio, 0.95, 1.05);
    cylinder = cylinder && b.cylinder;
  }
  if (!c.blowdown_lambdas.empty()) { a.labels["blowdown"] = cylinder ? "Cylinder" : "Inconclusive"; }
}

json scenario_json(const Config& c) {
  json s{{"name", c.name}, {"kind", std::string(to_string(c.kind))}, {"resolution", c.resolution},
         {"cadence", c.cadence}};
  switch (c.kind) {
    case Kind::Grim: break;
    case Kind::Bowl:
      s["n"]     = c.dimension;
      s["r_max"] = c.r_max;
      break;
    default:
      s["t0"]    = c.t0;
      s["t_end"] = *c.t_end;
      if (c.kind == Kind::Ellipse) {
        s["a"] = c.a;
        s["b"] = c.b;
      }
      if (c.record_from) { s["record_from"] = *c.record_from; }
  }
  return s;
}

json assertion_json(const Assertion& x) {
  json j{{"name", x.name}, {"relation", x.relation}, {"passed", x.passed}};
  if (x.relation == "==") {
    j["label"]    = x.label;
    j["expected"] = x.expected_label;
  } else if (x.relation == "in") {
    j["value"] = x.value;
    j["lo"]    = x.lo;
    j["hi"]    = x.hi;
  } else {
    j["value"] = x.value;
    j["bound"] = x.lo;
  }
  return j;
}

void write_file(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) { throw Error(fmt::format("cannot write {}", file.string())); }
}

void publish(const fs::path& stage, const fs::path& target) {
  const fs::path old = target.parent_path() / ("." + target.filename().string() + ".old");
  fs::remove_all(old);
  if (fs::exists(target)) { fs::rename(target, old); }
  fs::rename(stage, target);
  fs::remove_all(old);
}

}  // namespace

Outcome run(const Config& c) {
  Outcome out;
  Artifacts a;
  try {
    validate(c);
    out.directory = c.output_dir / c.name;
    switch (c.kind) {
      case Kind::Grim: run_grim(a); break;
      case Kind::Bowl: run_bowl(c, a); break;
      default: run_flow(c, a); break;
    }
  } catch (const ConfigError& e) {
    out.exit_code = 2;
    out.message   = e.what();
    return out;
  } catch (const InsufficientHistory& e) {
    out.exit_code = 2;
    out.message   = fmt::format("configuration asks for more history than the run provides: {}", e.what());
    return out;
  } catch (const InsufficientProfile& e) {
    out.exit_code = 2;
    out.message   = fmt::format("configuration asks for a longer profile: {}", e.what());
    return out;
  } catch (const Error& e) {
    out.exit_code = 3;
    out.message   = fmt::format("numerical failure: {}", e.what());
    return out;
  }

  json summary{{"scenario", scenario_json(c)}, {"labels", a.labels}, {"constants", a.constants},
               {"assertions", json::array()}};
  for (const auto& x : a.assertions) { summary["assertions"].push_back(assertion_json(x)); }

  try {
    fs::create_directories(c.output_dir);
    const fs::path stage = c.output_dir / ("." + c.name + ".partial");
    fs::remove_all(stage);
    fs::create_directories(stage);
    write_file(stage / "flow.csv", a.flow_csv);
    write_file(stage / "diagnostics.csv", a.diagnostics_csv);
    if (!a.profile_csv.empty()) { write_file(stage / "profile.csv", a.profile_csv); }
    write_file(stage / "summary.json", summary.dump(2) + "\n");
    publish(stage, out.directory);
  } catch (const std::exception& e) {
    out.exit_code = 2;
    out.message   = fmt::format("cannot write results: {}", e.what());
    return out;
  }

  out.assertions = std::move(a.assertions);
  const auto failed = std::count_if(out.assertions.begin(), out.assertions.end(), [](const auto& x) { return !x.passed; });
  out.exit_code     = failed > 0 ? 1 : 0;
  out.message       = fmt::format("{} assertions, {} failed", out.assertions.size(), failed);
  return out;
}

}  // namespace mcf::scenario
