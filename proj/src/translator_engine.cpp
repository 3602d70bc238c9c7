#include "mcf/translator_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "mcf/errors.hpp"

namespace mcf {

double translator_residual(const Timeslice& s, Vec2 direction) {
  double worst = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    worst = std::max(worst, std::abs(s.curvature[i] + dot(direction, s.normals[i])));
  }
  return worst;
}

TranslatorSample bowl_meridian(const RadialProfile& profile) {
  const std::size_t m = profile.size();
  if (m < 6) { throw InsufficientProfile("bowl profile has fewer than six samples"); }
  const int n        = profile.dimension;
  const double step  = profile.radii[1] - profile.radii[0];
  const double shell = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);

  std::vector<Vec2> pts;
  std::vector<Vec2> nrm;
  std::vector<double> curv;
  std::vector<double> wts;
  for (std::size_t j = 2; j + 2 < m; ++j) {
    const double r = profile.radii[j];
    if (!(r > 0.0)) { continue; }
    const double p  = profile.slopes[j];
    const double pp = (-profile.slopes[j + 2] + 8.0 * profile.slopes[j + 1] - 8.0 * profile.slopes[j - 1] +
                       profile.slopes[j - 2]) /
                      (12.0 * step);
    const double g = std::sqrt(1.0 + p * p);
    pts.push_back({r, profile.heights[j]});
    nrm.push_back({p / g, -1.0 / g});
    curv.push_back(pp / (g * g * g) + (n - 1) * p / (r * g));
    wts.push_back(0.5 * g * step * shell * std::pow(r, n - 1));
  }

  TranslatorSample out;
  out.direction       = {0.0, 1.0};
  Timeslice& s        = out.slice;
  s.dimension         = n;
  const std::size_t k = pts.size();
  for (std::size_t j = k; j-- > 0;) {
    s.points.push_back({-pts[j].x, pts[j].y});
    s.normals.push_back({-nrm[j].x, nrm[j].y});
    s.curvature.push_back(curv[j]);
    s.weights.push_back(wts[j]);
  }
  s.points.insert(s.points.end(), pts.begin(), pts.end());
  s.normals.insert(s.normals.end(), nrm.begin(), nrm.end());
  s.curvature.insert(s.curvature.end(), curv.begin(), curv.end());
  s.weights.insert(s.weights.end(), wts.begin(), wts.end());
  return out;
}

Timeslice scaled(const Timeslice& s, double lambda) {
  if (!(lambda > 0.0)) { throw DomainError(fmt::format("scale factor must be positive, got {}", lambda)); }
  Timeslice out = s;
  out.time      = lambda * lambda * s.time;
  for (auto& p : out.points) { p *= lambda; }
  for (auto& k : out.curvature) { k /= lambda; }
  for (auto& w : out.weights) { w *= std::pow(lambda, s.dimension); }
  return out;
}

CylinderBlowDown translator_blowdown(const RadialProfile& profile, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) { throw DomainError("blow-down scale must lie in (0, 1]"); }
  if (profile.dimension < 2) { throw DomainError("the bowl needs dimension n >= 2"); }
  if (profile.r_max() < 10.0 / lambda) {
    throw InsufficientProfile(
        fmt::format("profile ends at r = {}, scale {} needs r >= {}", profile.r_max(), lambda, 10.0 / lambda));
  }
  const double z = 1.0 / (lambda * lambda);
  const auto it  = std::lower_bound(profile.heights.begin(), profile.heights.end(), z);
  if (it == profile.heights.end() || it == profile.heights.begin()) {
    throw InsufficientProfile(fmt::format("profile never reaches height {}", z));
  }
  const auto j   = static_cast<std::size_t>(it - profile.heights.begin());
  const double w = (z - profile.heights[j - 1]) / (profile.heights[j] - profile.heights[j - 1]);
  const double r = (1.0 - w) * profile.radii[j - 1] + w * profile.radii[j];

  CylinderBlowDown out;
  out.lambda   = lambda;
  out.ratio    = lambda * r / std::sqrt(2.0 * (profile.dimension - 1));
  out.cylinder = std::abs(out.ratio - 1.0) <= 0.05;
  return out;
}

SlabClass slab_classify(const TranslatorSample& s, double horizon, double tolerance) {
  const Timeslice& c = s.slice;
  if (c.size() < 2) { throw Inconclusive("sample has fewer than two points"); }
  const Vec2 e    = s.direction * (1.0 / norm(s.direction));
  const Vec2 side = perp(e);
  double b_lo     = std::numeric_limits<double>::infinity();
  double b_hi     = -b_lo;
  for (const auto& p : c.points) {
    b_lo = std::min(b_lo, dot(p, e));
    b_hi = std::max(b_hi, dot(p, e));
  }
  auto extent = [&](double b_max) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& p : c.points) {
      if (dot(p, e) > b_max) { continue; }
      lo = std::min(lo, dot(p, side));
      hi = std::max(hi, dot(p, side));
    }
    return hi - lo;
  };
  const double full = extent(b_hi);
  if (full > horizon) { return {true, std::numeric_limits<double>::infinity()}; }
  const double half = extent(b_lo + 0.5 * (b_hi - b_lo));
  if (full - half <= tolerance * std::max(1.0, full)) { return {false, full}; }
  throw Inconclusive(
      fmt::format("extent {:.6g} is below the horizon {:.6g} and still growing ({:.3e} over the upper half)", full,
                  horizon, full - half));
}

double graph_distance(const Timeslice& curve, Vec2 direction, const Timeslice& reference, double half_width) {
  const Vec2 d    = direction * (1.0 / norm(direction));
  const Vec2 axis = -perp(d);
  std::vector<std::pair<double, double>> graph;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (dot(curve.normals[i], d) < 0.0) { graph.emplace_back(dot(curve.points[i], axis), dot(curve.points[i], d)); }
  }
  std::sort(graph.begin(), graph.end());
  if (graph.size() < 2 || graph.front().first > -half_width || graph.back().first < half_width) {
    throw DomainError("curve does not cover the comparison window");
  }
  double worst = 0.0;
  for (const auto& p : reference.points) {
    if (std::abs(p.x) > half_width) { continue; }
    const auto it = std::lower_bound(graph.begin(), graph.end(), std::make_pair(p.x, -std::numeric_limits<double>::infinity()));
    const auto hi = std::clamp<std::ptrdiff_t>(it - graph.begin(), 1, static_cast<std::ptrdiff_t>(graph.size()) - 1);
    const auto& [a0, b0] = graph[static_cast<std::size_t>(hi - 1)];
    const auto& [a1, b1] = graph[static_cast<std::size_t>(hi)];
    const double b       = b0 + (b1 - b0) * (p.x - a0) / (a1 - a0);
    worst                = std::max(worst, std::abs(b - p.y));
  }
  return worst;
}

}  // namespace mcf
