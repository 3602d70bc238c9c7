#include "mcf/convex_geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "mcf/errors.hpp"
#include "simplex.hpp"
#include "spectral.hpp"

namespace mcf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Arclength represented by one sample: (h + h'')·dθ for smooth data, the
// polygon edge length 2 tan(dθ/2)·(h + h'') for the centered scheme.
double weight_factor(const SupportFunction& h) {
  const double dt = h.theta_step();
  return h.scheme() == DerivativeScheme::Spectral ? dt : 2.0 * std::tan(0.5 * dt);
}

}  // namespace

DerivativeScheme default_scheme(std::size_t n) {
  return std::has_single_bit(n) ? DerivativeScheme::Spectral : DerivativeScheme::Centered;
}

SupportFunction::SupportFunction(std::vector<double> values)
    : values_(std::move(values)), scheme_(default_scheme(values_.size())) {
  if (values_.size() < 16 || values_.size() % 2 != 0) {
    throw DomainError(
        fmt::format("support function needs an even grid of at least 16 samples, got {}", values_.size()));
  }
}

SupportFunction::SupportFunction(std::vector<double> values, DerivativeScheme scheme)
    : values_(std::move(values)), scheme_(scheme) {
  if (values_.size() < 16 || values_.size() % 2 != 0) {
    throw DomainError(
        fmt::format("support function needs an even grid of at least 16 samples, got {}", values_.size()));
  }
}

double SupportFunction::theta_step() const { return kTwoPi / static_cast<double>(values_.size()); }

double SupportFunction::theta(std::size_t i) const { return static_cast<double>(i) * theta_step(); }

std::size_t SupportFunction::wrap(std::ptrdiff_t i) const {
  const auto n = static_cast<std::ptrdiff_t>(values_.size());
  return static_cast<std::size_t>(((i % n) + n) % n);
}

std::vector<double> support_derivative(const SupportFunction& h) {
  if (h.scheme() == DerivativeScheme::Spectral) { return detail::spectral_first_derivative(h.values()); }
  const std::size_t n = h.grid_size();
  const double denom  = 2.0 * std::sin(h.theta_step());
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    out[i]       = (h[h.wrap(k + 1)] - h[h.wrap(k - 1)]) / denom;
  }
  return out;
}

std::vector<double> radius_of_curvature_unchecked(const SupportFunction& h) {
  if (h.scheme() == DerivativeScheme::Spectral) {
    return detail::spectral_identity_plus_second(h.values());
  }
  const std::size_t n = h.grid_size();
  const double denom  = 2.0 - 2.0 * std::cos(h.theta_step());
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    out[i]       = h[i] + (h[h.wrap(k + 1)] - 2.0 * h[i] + h[h.wrap(k - 1)]) / denom;
  }
  return out;
}

std::vector<double> radius_of_curvature(const SupportFunction& h) {
  auto r = radius_of_curvature_unchecked(h);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] > kConvexityFloor)) {
      throw ConvexityLost(fmt::format("h + h'' = {:.3e} at theta index {}", r[i], i));
    }
  }
  return r;
}

Timeslice merge(const Timeslice& a, const Timeslice& b) {
  Timeslice out = a;
  out.smooth    = a.smooth && b.smooth;
  out.points.insert(out.points.end(), b.points.begin(), b.points.end());
  out.normals.insert(out.normals.end(), b.normals.begin(), b.normals.end());
  out.curvature.insert(out.curvature.end(), b.curvature.begin(), b.curvature.end());
  out.weights.insert(out.weights.end(), b.weights.begin(), b.weights.end());
  return out;
}

Timeslice embed(const SupportFunction& h, double time) {
  const auto rho   = radius_of_curvature(h);
  const auto dh    = support_derivative(h);
  const double wf  = weight_factor(h);
  const std::size_t n = h.grid_size();
  Timeslice s;
  s.time   = time;
  s.smooth = h.scheme() == DerivativeScheme::Spectral;
  s.points.resize(n);
  s.normals.resize(n);
  s.curvature.resize(n);
  s.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 nu  = unit_at(h.theta(i));
    s.normals[i]   = nu;
    s.points[i]    = h[i] * nu + dh[i] * perp(nu);
    s.curvature[i] = 1.0 / rho[i];
    s.weights[i]   = wf * rho[i];
  }
  return s;
}

std::vector<double> widths(const SupportFunction& h) {
  const std::size_t n = h.grid_size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) { w[i] = h[i] + h[(i + n / 2) % n]; }
  return w;
}

double enclosed_area(const SupportFunction& h) {
  const auto rho  = radius_of_curvature_unchecked(h);
  const double wf = weight_factor(h);
  double area     = 0.0;
  for (std::size_t i = 0; i < h.grid_size(); ++i) { area += 0.5 * h[i] * rho[i] * wf; }
  return area;
}

Vec2 area_centroid(const SupportFunction& h) {
  const Timeslice s = embed(h);
  double area       = 0.0;
  Vec2 moment;
  // Fan of triangles (origin, sample piece); each has centroid (2/3)·X_i.
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double a = 0.5 * h[i] * s.weights[i];
    area += a;
    moment += (a * 2.0 / 3.0) * s.points[i];
  }
  return (1.0 / area) * moment;
}

Chord chord(const SupportFunction& h, Vec2 origin, Vec2 direction) {
  const double len = norm(direction);
  direction *= 1.0 / len;
  Chord c{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < h.grid_size(); ++i) {
    const Vec2 nu      = unit_at(h.theta(i));
    const double slack = h[i] - dot(origin, nu);
    const double along = dot(direction, nu);
    if (along > 1e-14) { c.forward = std::min(c.forward, slack / along); }
    if (along < -1e-14) { c.backward = std::min(c.backward, slack / -along); }
  }
  return c;
}

SupportFunction translate(const SupportFunction& h, Vec2 shift) {
  std::vector<double> v(h.values().begin(), h.values().end());
  for (std::size_t i = 0; i < v.size(); ++i) { v[i] += dot(shift, unit_at(h.theta(i))); }
  return SupportFunction(std::move(v), h.scheme());
}

SupportFlow parabolic_rescale(const SupportFlow& flow, double lambda) {
  if (!(lambda > 0.0)) { throw DomainError(fmt::format("rescaling factor must be positive, got {}", lambda)); }
  SupportFlow out;
  out.cfl               = flow.cfl;
  out.frames_per_decade = flow.frames_per_decade;
  out.times.reserve(flow.size());
  out.frames.reserve(flow.size());
  for (std::size_t m = 0; m < flow.size(); ++m) {
    if (!(flow.times[m] < 0.0)) {
      throw DomainError(fmt::format("parabolic rescaling needs negative times, got t = {}", flow.times[m]));
    }
    const auto& f = flow.frames[m];
    std::vector<double> v(f.values().begin(), f.values().end());
    for (double& x : v) { x *= lambda; }
    out.times.push_back(lambda * lambda * flow.times[m]);
    out.frames.emplace_back(std::move(v), f.scheme());
  }
  return out;
}

double inradius(std::span<const Vec2> normals, std::span<const double> support) {
  // Dual of  max ρ  s.t. ⟨c, ν_i⟩ + ρ ≤ h_i:
  //   min Σ h_i y_i  s.t. Σ y_i ν_i = 0, Σ y_i = 1, y ≥ 0.
  const std::size_t n = normals.size();
  std::vector<std::vector<double>> a(3, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    a[0][i] = normals[i].x;
    a[1][i] = normals[i].y;
    a[2][i] = 1.0;
  }
  const auto value = detail::simplex_minimize(a, {0.0, 0.0, 1.0}, {support.begin(), support.end()});
  if (!value) { throw DomainError("half-plane system for the inradius is unbounded"); }
  return *value;
}

namespace {

struct Circle {
  Vec2 center;
  double radius{0.0};
  [[nodiscard]] bool contains(const Vec2& p) const {
    return norm(p - center) <= radius * (1.0 + 1e-12) + 1e-300;
  }
};

Circle circle_from(const Vec2& a, const Vec2& b) { return {0.5 * (a + b), 0.5 * norm(a - b)}; }

Circle circle_from(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 ab  = b - a;
  const Vec2 ac  = c - a;
  const double d = 2.0 * cross(ab, ac);
  if (std::abs(d) < 1e-300) {
    Circle best = circle_from(a, b);
    for (const Circle& cand : {circle_from(a, c), circle_from(b, c)}) {
      if (cand.radius > best.radius) { best = cand; }
    }
    return best;
  }
  const double ab2 = dot(ab, ab);
  const double ac2 = dot(ac, ac);
  const Vec2 off{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
  return {a + off, norm(off)};
}

}  // namespace

double circumradius(std::span<const Vec2> points) {
  if (points.empty()) { return 0.0; }
  std::vector<Vec2> p(points.begin(), points.end());
  std::mt19937_64 rng(0x5eedULL);
  std::shuffle(p.begin(), p.end(), rng);
  Circle c{p[0], 0.0};
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (c.contains(p[i])) { continue; }
    c = {p[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (c.contains(p[j])) { continue; }
      c = circle_from(p[i], p[j]);
      for (std::size_t k = 0; k < j; ++k) {
        if (!c.contains(p[k])) { c = circle_from(p[i], p[j], p[k]); }
      }
    }
  }
  return c.radius;
}

double diameter(std::span<const Vec2> points) {
  double best = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) { best = std::max(best, norm(points[i] - points[j])); }
  }
  return best;
}

Measurements measure(const SupportFunction& h) {
  const Timeslice s = embed(h);
  const auto w      = widths(h);
  Measurements m;
  m.width_min    = *std::min_element(w.begin(), w.end());
  m.width_max    = *std::max_element(w.begin(), w.end());
  m.diameter     = diameter(s.points);
  m.inradius     = inradius(s.normals, h.values());
  m.circumradius = circumradius(s.points);
  return m;
}

double hausdorff_distance(const SupportFunction& a, const SupportFunction& b) {
  if (a.grid_size() != b.grid_size()) { throw DomainError("hausdorff_distance needs a common grid"); }
  double d = 0.0;
  for (std::size_t i = 0; i < a.grid_size(); ++i) { d = std::max(d, std::abs(a[i] - b[i])); }
  return d;
}

}  // namespace mcf
