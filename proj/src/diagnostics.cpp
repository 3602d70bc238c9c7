#include "mcf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "mcf/errors.hpp"

namespace mcf {

namespace {

constexpr double kPi = std::numbers::pi;

double elapsed(const Timeslice& s, SpacetimePoint basepoint) {
  const double tau = basepoint.t - s.time;
  if (!(tau > 0.0)) {
    throw DomainError(fmt::format("slice time {} is not before the basepoint time {}", s.time, basepoint.t));
  }
  return tau;
}

// ∫_{lo}^{hi} e^{-s²} ds · 2/√π, accurate also when both ends lie far in the
// same tail.
double erf_diff(double lo, double hi) {
  if (lo > 0.0) { return std::erfc(lo) - std::erfc(hi); }
  if (hi < 0.0) { return std::erfc(-hi) - std::erfc(-lo); }
  return std::erf(hi) - std::erf(lo);
}

// ∫ e^{-|q|²/(σ)} over the straight piece of sample i, q = p - x₀.
double segment_gaussian(const Timeslice& s, std::size_t i, Vec2 x0, double sigma) {
  const Vec2 q      = s.points[i] - x0;
  const double d    = dot(q, s.normals[i]);
  const double a    = dot(q, perp(s.normals[i]));
  const double half = 0.5 * s.weights[i];
  const double root = std::sqrt(sigma);
  return std::exp(-d * d / sigma) * 0.5 * std::sqrt(kPi) * root * erf_diff((a - half) / root, (a + half) / root);
}

// Φ-weight of sample i: ∫ Φ over its piece.
double heat_weight(const Timeslice& s, std::size_t i, Vec2 x0, double tau) {
  const double n = static_cast<double>(s.dimension);
  if (s.dimension == 1 && !s.smooth) { return segment_gaussian(s, i, x0, 4.0 * tau) / std::sqrt(4.0 * kPi * tau); }
  const Vec2 q = s.points[i] - x0;
  return std::pow(4.0 * kPi * tau, -0.5 * n) * std::exp(-dot(q, q) / (4.0 * tau)) * s.weights[i];
}

std::vector<double> curvature(const SupportFunction& h) {
  auto rho = radius_of_curvature(h);
  for (double& r : rho) { r = 1.0 / r; }
  return rho;
}

// Three-point derivative at the middle of nonuniform nodes.
double middle_derivative(double t0, double t1, double t2, double f0, double f1, double f2) {
  const double h1 = t1 - t0;
  const double h2 = t2 - t1;
  return -h2 / (h1 * (h1 + h2)) * f0 + (h2 - h1) / (h1 * h2) * f1 + h1 / (h2 * (h1 + h2)) * f2;
}

double theta_derivative(const SupportFunction& h, const std::vector<double>& f, std::size_t i) {
  const auto k = static_cast<std::ptrdiff_t>(i);
  return (f[h.wrap(k + 1)] - f[h.wrap(k - 1)]) / (2.0 * h.theta_step());
}

}  // namespace

double gaussian_density(const Timeslice& s, SpacetimePoint basepoint) {
  const double tau = elapsed(s, basepoint);
  double theta     = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) { theta += heat_weight(s, i, basepoint.x, tau); }
  return theta;
}

double density_deficit(const Timeslice& s, SpacetimePoint basepoint) {
  const double tau = elapsed(s, basepoint);
  double total     = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double normal_part = dot(s.points[i] - basepoint.x, s.normals[i]) / (2.0 * tau);
    const double v           = normal_part - s.curvature[i];
    total += v * v * heat_weight(s, i, basepoint.x, tau);
  }
  return total;
}

double monotonicity_check(const SupportFlow& flow, SpacetimePoint basepoint) {
  double worst = -std::numeric_limits<double>::infinity();
  double prev  = 0.0;
  for (std::size_t m = 0; m < flow.size(); ++m) {
    const double theta = gaussian_density(embed(flow.frames[m], flow.times[m]), basepoint);
    if (m > 0) { worst = std::max(worst, theta - prev); }
    prev = theta;
  }
  return worst;
}

MonotonicityIdentity monotonicity_identity(const SupportFlow& flow, SpacetimePoint basepoint) {
  if (flow.size() < 3) { throw InsufficientHistory("monotonicity identity needs three frames"); }
  std::vector<double> theta(flow.size());
  for (std::size_t m = 0; m < flow.size(); ++m) {
    theta[m] = gaussian_density(embed(flow.frames[m], flow.times[m]), basepoint);
  }
  MonotonicityIdentity out;
  for (std::size_t m = 1; m + 1 < flow.size(); ++m) {
    const double d = middle_derivative(flow.times[m - 1], flow.times[m], flow.times[m + 1], theta[m - 1], theta[m],
                                       theta[m + 1]);
    const double deficit = density_deficit(embed(flow.frames[m], flow.times[m]), basepoint);
    out.times.push_back(flow.times[m]);
    out.derivative.push_back(d);
    out.deficit.push_back(deficit);
    out.max_relative_mismatch = std::max(out.max_relative_mismatch, std::abs(d + deficit) / deficit);
  }
  return out;
}

double gaussian_area_bound(int n) {
  const double sphere = 2.0 * std::pow(kPi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
  double sum          = 0.0;
  for (int i = 0; i < 64; ++i) { sum += std::pow(i + 1.0, n) * std::exp(-static_cast<double>(i) * i); }
  return sphere * sum;
}

GaussianBound gaussian_bound_check(const Timeslice& s, std::span<const double> taus) {
  GaussianBound out{0.0, gaussian_area_bound(s.dimension)};
  const double n = static_cast<double>(s.dimension);
  for (double tau : taus) {
    if (!(tau > 0.0)) { throw DomainError(fmt::format("scale τ must be positive, got {}", tau)); }
    double integral = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.dimension == 1 && !s.smooth) {
        integral += segment_gaussian(s, i, {}, tau);
      } else {
        integral += std::exp(-dot(s.points[i], s.points[i]) / tau) * s.weights[i];
      }
    }
    out.measured = std::max(out.measured, std::pow(tau, -0.5 * n) * integral);
  }
  return out;
}

double harnack_min(const SupportFlow& flow) {
  if (flow.size() < 2) { throw InsufficientHistory("Harnack quotient needs two frames"); }
  double best = std::numeric_limits<double>::infinity();
  auto prev   = curvature(flow.frames[0]);
  for (std::size_t m = 1; m < flow.size(); ++m) {
    auto next       = curvature(flow.frames[m]);
    const double dt = flow.times[m] - flow.times[m - 1];
    for (std::size_t i = 0; i < next.size(); ++i) { best = std::min(best, (next[i] - prev[i]) / dt); }
    prev = std::move(next);
  }
  return best;
}

std::vector<FrameSample> frame_samples(const SupportFlow& flow, std::size_t count, double t_lo, double t_hi,
                                       std::uint64_t seed) {
  std::vector<std::size_t> frames;
  for (std::size_t m = 1; m + 1 < flow.size(); ++m) {
    if (flow.times[m] >= t_lo && flow.times[m] <= t_hi) { frames.push_back(m); }
  }
  if (frames.empty()) {
    throw InsufficientHistory(fmt::format("no interior frames with time in [{}, {}]", t_lo, t_hi));
  }
  std::mt19937_64 rng(seed);
  std::vector<FrameSample> out;
  out.reserve(count);
  const std::size_t n = flow.resolution();
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t f = frames[static_cast<std::size_t>(rng() % frames.size())];
    out.push_back({f, static_cast<std::size_t>(rng() % n)});
  }
  return out;
}

Mat2 arrival_hessian_formula(const SupportFlow& flow, const FrameSample& sample) {
  const std::size_t m = sample.frame;
  if (m == 0 || m + 1 >= flow.size()) { throw StencilFailure("formula Hessian needs neighbouring frames"); }
  const auto k0         = curvature(flow.frames[m - 1]);
  const auto k1         = curvature(flow.frames[m]);
  const auto k2         = curvature(flow.frames[m + 1]);
  const std::size_t i   = sample.index;
  const double kappa    = k1[i];
  const double k_theta  = theta_derivative(flow.frames[m], k1, i);
  const double k_t      = middle_derivative(flow.times[m - 1], flow.times[m], flow.times[m + 1], k0[i], k1[i], k2[i]);
  const double k_normal = k_t + kappa * k_theta * k_theta;
  return {-1.0, k_theta / kappa, -k_normal / (kappa * kappa * kappa)};
}

Mat2 arrival_hessian_formula_xy(const SupportFlow& flow, const FrameSample& sample) {
  const Mat2 f  = arrival_hessian_formula(flow, sample);
  const Vec2 n  = unit_at(flow.frames[sample.frame].theta(sample.index));
  const Vec2 t  = perp(n);
  Mat2 m;
  m.xx = f.xx * t.x * t.x + 2.0 * f.xy * t.x * n.x + f.yy * n.x * n.x;
  m.xy = f.xx * t.x * t.y + f.xy * (t.x * n.y + n.x * t.y) + f.yy * n.x * n.y;
  m.yy = f.xx * t.y * t.y + 2.0 * f.xy * t.y * n.y + f.yy * n.y * n.y;
  return m;
}

double stencil_spacing(const ArrivalTime& u, Vec2 p, double min_spacing) {
  return std::max(min_spacing, 2.5 * u.sweep_per_frame(p));
}

ArrivalHessianCheck arrival_hessian_check(const SupportFlow& flow, std::span<const FrameSample> samples,
                                          const ArrivalTime* field, double min_spacing) {
  ArrivalHessianCheck out;
  out.max_eigenvalue = -std::numeric_limits<double>::infinity();
  if (field != nullptr) { out.max_mismatch = 0.0; }
  for (const auto& s : samples) {
    const Mat2 f       = arrival_hessian_formula_xy(flow, s);
    out.max_eigenvalue = std::max(out.max_eigenvalue, max_eigenvalue(f));
    ++out.samples;
    if (field == nullptr) { continue; }
    const auto& h  = flow.frames[s.frame];
    const Vec2 nu  = unit_at(h.theta(s.index));
    const Vec2 x   = h[s.index] * nu + support_derivative(h)[s.index] * perp(nu);
    const Mat2 d   = field->hessian(x, stencil_spacing(*field, x, min_spacing));
    const double scale = std::max({1.0, std::abs(f.xx), std::abs(f.xy), std::abs(f.yy)});
    const double diff  = std::max({std::abs(f.xx - d.xx), std::abs(f.xy - d.xy), std::abs(f.yy - d.yy)});
    out.max_mismatch   = std::max(*out.max_mismatch, diff / scale);
  }
  return out;
}

double level_set_residual(const ArrivalTime& u, std::span<const Vec2> points, double min_spacing) {
  double worst = 0.0;
  for (const Vec2& p : points) {
    const double e  = stencil_spacing(u, p, min_spacing);
    const Vec2 g    = u.gradient(p, e);
    const double gn = norm(g);
    if (gn < 0.1) {
      throw DegenerateGradient(fmt::format("|Du| = {:.3e} at ({}, {})", gn, p.x, p.y));
    }
    const Mat2 h          = u.hessian(p, e);
    const double laplace  = h.xx + h.yy;
    const double directed = g.x * g.x * h.xx + 2.0 * g.x * g.y * h.xy + g.y * g.y * h.yy;
    const double div      = (gn * gn * laplace - directed) / (gn * gn * gn);
    worst                 = std::max(worst, std::abs(div + 1.0 / gn));
  }
  return worst;
}

double concavity_defect(const ArrivalTime& u, std::span<const std::pair<Vec2, Vec2>> segments) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : segments) {
    worst = std::max(worst, 0.5 * (u.value(a) + u.value(b)) - u.value(0.5 * (a + b)));
  }
  return worst;
}

DiagnosticSeries rigidity_series(const SupportFlow& flow, double extinction_time) {
  DiagnosticSeries out;
  auto& type_one  = out.channels["typeI"];
  auto& diam      = out.channels["rescaled_diam"];
  auto& ecc       = out.channels["eccentricity"];
  auto& pinching  = out.channels["pinching"];
  for (std::size_t m = 0; m < flow.size(); ++m) {
    const double tau = extinction_time - flow.times[m];
    if (!(tau > 0.0)) { throw DomainError("rigidity series needs frames before the extinction time"); }
    const auto rho          = radius_of_curvature(flow.frames[m]);
    const Measurements meas = measure(flow.frames[m]);
    out.times.push_back(flow.times[m]);
    type_one.push_back(std::sqrt(tau) / *std::min_element(rho.begin(), rho.end()));
    diam.push_back(meas.diameter / std::sqrt(tau));
    ecc.push_back(meas.circumradius / meas.inradius);
    pinching.push_back(1.0);
  }
  return out;
}

namespace {

double wang_value(const SupportFunction& h, double t, Vec2 slab_normal) {
  const Vec2 c     = area_centroid(h);
  const double v   = chord(h, c, slab_normal).length();
  const Chord axis = chord(h, c, perp(slab_normal));
  return std::min(axis.forward, axis.backward) * v / -t;
}

}  // namespace

WangClaim wang_claim1_check(const SupportFlow& flow, Vec2 slab_normal, DensityClass blow_down_label) {
  if (blow_down_label != DensityClass::PlaneMult2) {
    throw NotSlabLike(fmt::format("blow-down is {}, not a multiplicity-two plane", to_string(blow_down_label)));
  }
  if (flow.size() == 0) { throw InsufficientHistory("empty flow"); }
  slab_normal *= 1.0 / norm(slab_normal);
  WangClaim out;
  out.alpha                 = std::numeric_limits<double>::infinity();
  out.alpha_early_min       = std::numeric_limits<double>::infinity();
  out.alpha_early_max       = -std::numeric_limits<double>::infinity();
  const std::size_t early   = (flow.size() + 1) / 2;
  for (std::size_t m = 0; m < flow.size(); ++m) {
    const double a = wang_value(flow.frames[m], flow.times[m], slab_normal);
    out.times.push_back(flow.times[m]);
    out.values.push_back(a);
    out.alpha = std::min(out.alpha, a);
    if (m < early) {
      out.alpha_early_min = std::min(out.alpha_early_min, a);
      out.alpha_early_max = std::max(out.alpha_early_max, a);
    }
  }
  return out;
}

GradientEstimate gradient_estimate_check(const SupportFunction& frame, Vec2 slab_normal, std::size_t count,
                                         double margin) {
  slab_normal *= 1.0 / norm(slab_normal);
  const Vec2 c     = area_centroid(frame);
  const Vec2 axis  = perp(slab_normal);
  const Chord ext  = chord(frame, c, axis);
  const double d   = std::min(ext.forward, ext.backward);
  const double len = d - margin;
  if (!(len > 0.0)) { throw DomainError("gradient estimate margin exceeds the half-length"); }
  const double eta = 1e-3;
  auto width       = [&](double y) { return chord(frame, c + y * axis, slab_normal).length(); };
  GradientEstimate out;
  out.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < count; ++k) {
    const double y     = -len + 2.0 * len * (static_cast<double>(k) + 0.5) / static_cast<double>(count);
    const double v     = width(y);
    const double dv    = (width(y + eta) - width(y - eta)) / (2.0 * eta);
    out.min_slack      = std::min(out.min_slack, v / (d - std::abs(y)) - std::abs(dv));
    ++out.samples;
  }
  return out;
}

std::span<const std::string> known_channels() {
  static const std::vector<std::string> names{
      "gaussian_density", "density_deficit", "harnack_min", "width_min",    "width_max",  "diameter", "inradius",
      "circumradius",     "typeI",           "rescaled_diam", "eccentricity", "wang_alpha", "pinching"};
  return names;
}

DiagnosticSeries diagnostic_series(const SupportFlow& flow, SpacetimePoint basepoint,
                                   std::span<const std::string> channels, std::optional<Vec2> slab_normal) {
  const auto known = known_channels();
  for (const auto& c : channels) {
    if (std::find(known.begin(), known.end(), c) == known.end()) {
      throw DomainError(fmt::format("unknown diagnostic channel '{}'", c));
    }
  }
  auto wants = [&](std::string_view name) { return std::find(channels.begin(), channels.end(), name) != channels.end(); };

  DiagnosticSeries out;
  out.times = flow.times;
  for (const auto& c : channels) {
    if (c == "wang_alpha" && !slab_normal) { continue; }
    out.channels[c];
  }
  const bool need_measure = wants("width_min") || wants("width_max") || wants("diameter") || wants("inradius") ||
                            wants("circumradius") || wants("rescaled_diam") || wants("eccentricity");
  std::vector<double> prev_kappa;
  for (std::size_t m = 0; m < flow.size(); ++m) {
    const auto& h    = flow.frames[m];
    const double t   = flow.times[m];
    const double tau = basepoint.t - t;
    auto put         = [&](const char* name, double v) {
      if (auto it = out.channels.find(name); it != out.channels.end()) { it->second.push_back(v); }
    };
    const auto kappa = curvature(h);
    if (wants("gaussian_density") || wants("density_deficit")) {
      const Timeslice s = embed(h, t);
      put("gaussian_density", wants("gaussian_density") ? gaussian_density(s, basepoint) : 0.0);
      put("density_deficit", wants("density_deficit") ? density_deficit(s, basepoint) : 0.0);
    }
    if (wants("harnack_min")) {
      const std::size_t a = m == 0 ? 0 : m - 1;
      const std::size_t b = m == 0 ? std::min<std::size_t>(1, flow.size() - 1) : m;
      double best         = std::numeric_limits<double>::quiet_NaN();
      if (a != b) {
        const auto ka = a == m ? kappa : prev_kappa;
        const auto kb = b == m ? kappa : curvature(flow.frames[b]);
        best          = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < ka.size(); ++i) {
          best = std::min(best, (kb[i] - ka[i]) / (flow.times[b] - flow.times[a]));
        }
      }
      put("harnack_min", best);
    }
    if (need_measure) {
      const Measurements meas = measure(h);
      put("width_min", meas.width_min);
      put("width_max", meas.width_max);
      put("diameter", meas.diameter);
      put("inradius", meas.inradius);
      put("circumradius", meas.circumradius);
      put("rescaled_diam", meas.diameter / std::sqrt(tau));
      put("eccentricity", meas.circumradius / meas.inradius);
    }
    put("typeI", std::sqrt(tau) * *std::max_element(kappa.begin(), kappa.end()));
    put("pinching", 1.0);
    if (slab_normal) { put("wang_alpha", wang_value(h, t, *slab_normal * (1.0 / norm(*slab_normal)))); }
    prev_kappa = kappa;
  }
  return out;
}

}  // namespace mcf
