#include "mcf/soliton_catalog.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "mcf/errors.hpp"

namespace mcf {

namespace {

constexpr double kPi = std::numbers::pi;

void require_ancient_time(double t, const char* what) {
  if (!(t < 0.0)) { throw DomainError(fmt::format("{} needs t < 0, got t = {}", what, t)); }
}

// asinh(sign·e^L) without overflowing for large L.
double asinh_of_exp(double log_magnitude, double sign) {
  if (log_magnitude < 20.0) { return std::asinh(sign * std::exp(log_magnitude)); }
  return sign * (log_magnitude + std::numbers::ln2);
}

// Each sample stands for the polyline piece halfway to its neighbours.
void assign_polyline_weights(Timeslice& s, bool closed) {
  const std::size_t n = s.size();
  s.weights.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = norm(s.points[i + 1] - s.points[i]);
    s.weights[i] += 0.5 * d;
    s.weights[i + 1] += 0.5 * d;
  }
  if (closed && n > 1) {
    const double d = norm(s.points.front() - s.points.back());
    s.weights.front() += 0.5 * d;
    s.weights.back() += 0.5 * d;
  }
}

// Oval sample in the first quadrant, with its Gauss angle.
struct OvalSample {
  double theta;
  Vec2 point;
};

}  // namespace

SupportFunction shrinking_circle(double t, std::size_t grid_size) {
  require_ancient_time(t, "shrinking_circle");
  return SupportFunction(std::vector<double>(grid_size, std::sqrt(-2.0 * t)));
}

double shrinker_radius(int n, int k, double t) {
  require_ancient_time(t, "shrinker_radius");
  if (n < 1 || k < 0 || k >= n) {
    throw DomainError(fmt::format("shrinker_radius needs 0 <= k < n, got n = {}, k = {}", n, k));
  }
  return std::sqrt(-2.0 * static_cast<double>(n - k) * t);
}

SupportFunction ellipse_support(double a, double b, std::size_t grid_size) {
  if (!(a > 0.0 && b > 0.0)) { throw DomainError("ellipse semi-axes must be positive"); }
  std::vector<double> h(grid_size);
  const double dt = 2.0 * kPi / static_cast<double>(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double c = std::cos(static_cast<double>(i) * dt);
    const double s = std::sin(static_cast<double>(i) * dt);
    h[i]           = std::sqrt(a * a * c * c + b * b * s * s);
  }
  return SupportFunction(std::move(h));
}

Timeslice grim_reaper(double t, std::span<const double> x_samples) {
  Timeslice s;
  s.time = t;
  for (const double x : x_samples) {
    if (!(std::abs(x) < 0.5 * kPi)) {
      throw DomainError(fmt::format("Grim Reaper abscissa must satisfy |x| < pi/2, got {}", x));
    }
    const double c = std::cos(x);
    s.points.push_back({x, t - std::log(c)});
    s.normals.push_back({std::sin(x), -c});
    s.curvature.push_back(c);
  }
  assign_polyline_weights(s, false);
  return s;
}

Timeslice grim_reaper_by_height(double t, double max_height, std::size_t samples_per_branch) {
  constexpr double kTipHalfWidth = 1.4;
  const double tip_height        = -std::log(std::cos(kTipHalfWidth));
  if (!(max_height > tip_height)) {
    throw DomainError(fmt::format("Grim Reaper height must exceed {}", tip_height));
  }
  const std::size_t m = std::max<std::size_t>(samples_per_branch, 8);

  std::vector<double> right_heights;
  for (std::size_t j = 1; j <= m; ++j) {
    right_heights.push_back(tip_height + (max_height - tip_height) * static_cast<double>(j) / static_cast<double>(m));
  }
  auto branch_sample = [&](double eta, double sign, Timeslice& s) {
    const double c = std::exp(-eta);
    const double x = sign * std::acos(c);
    s.points.push_back({x, t + eta});
    s.normals.push_back({sign * std::sqrt(std::max(0.0, 1.0 - c * c)), -c});
    s.curvature.push_back(c);
  };

  Timeslice s;
  s.time = t;
  for (auto it = right_heights.rbegin(); it != right_heights.rend(); ++it) { branch_sample(*it, -1.0, s); }
  for (std::size_t j = 0; j <= 2 * m; ++j) {
    const double x = -kTipHalfWidth + 2.0 * kTipHalfWidth * static_cast<double>(j) / static_cast<double>(2 * m);
    const double c = std::cos(x);
    s.points.push_back({x, t - std::log(c)});
    s.normals.push_back({std::sin(x), -c});
    s.curvature.push_back(c);
  }
  for (const double eta : right_heights) { branch_sample(eta, 1.0, s); }
  assign_polyline_weights(s, false);
  return s;
}

double angenent_oval_curvature(double theta, double t) {
  require_ancient_time(t, "angenent_oval_curvature");
  const double e2 = std::exp(2.0 * t);
  const double s  = std::sin(theta);
  const double c  = std::cos(theta);
  return std::sqrt((s * s + e2 * c * c) / (-std::expm1(2.0 * t)));
}

Vec2 angenent_oval_point(double theta, double t) {
  require_ancient_time(t, "angenent_oval_point");
  // Outward normal ∝ (e^{-t} sin x, sinh y) combined with cosh y = e^{-t} cos x
  // gives sin x = cos θ·√(1 - e^{2t}) and sinh y = e^{-t} sin θ·√(1 - e^{2t}).
  const double shrink = std::sqrt(-std::expm1(2.0 * t));
  const double x      = std::asin(std::cos(theta) * shrink);
  const double s      = std::sin(theta);
  double y            = 0.0;
  if (s != 0.0) { y = asinh_of_exp(-t + std::log(std::abs(s) * shrink), s > 0.0 ? 1.0 : -1.0); }
  return {x, y};
}

double angenent_oval_residual(Vec2 p, double t) {
  // e^{t} cosh y, evaluated in log space.
  const double ay     = std::abs(p.y);
  const double scaled = 0.5 * (std::exp(t + ay) + std::exp(t - ay));
  return scaled - std::cos(p.x);
}

SupportFunction angenent_oval_support(double t, std::size_t grid_size, DerivativeScheme scheme) {
  require_ancient_time(t, "angenent_oval_support");
  std::vector<double> h(grid_size);
  const double dt = 2.0 * kPi / static_cast<double>(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double theta = static_cast<double>(i) * dt;
    const Vec2 p       = angenent_oval_point(theta, t);
    h[i]               = dot(p, unit_at(theta));
  }
  return SupportFunction(std::move(h), scheme);
}

SupportFlow angenent_oval_flow(std::span<const double> times, std::size_t grid_size) {
  SupportFlow flow;
  for (const double t : times) {
    if (!flow.times.empty() && !(t > flow.times.back())) { throw DomainError("oval frame times must increase"); }
    flow.times.push_back(t);
    flow.frames.push_back(angenent_oval_support(t, grid_size));
  }
  return flow;
}

Timeslice angenent_oval(double t, std::size_t sample_count) {
  require_ancient_time(t, "angenent_oval");
  const std::size_t m = std::max<std::size_t>(sample_count / 8, 4);
  const double shrink = std::sqrt(-std::expm1(2.0 * t));
  // Height of the tip: arccosh(e^{-t}).
  const double tip_height = -t < 20.0 ? std::acosh(std::exp(-t)) : -t + std::numbers::ln2;

  std::vector<OvalSample> quadrant;
  for (std::size_t k = 0; k <= m; ++k) {
    const double theta = 0.5 * kPi * static_cast<double>(k) / static_cast<double>(m);
    quadrant.push_back({theta, k == m ? Vec2{0.0, tip_height} : angenent_oval_point(theta, t)});
  }
  for (std::size_t j = 1; j < m; ++j) {
    const double y         = tip_height * static_cast<double>(j) / static_cast<double>(m);
    const double sinh_y_et = 0.5 * (std::exp(y + t) - std::exp(t - y));
    const double sin_theta = std::min(1.0, sinh_y_et / shrink);
    const double theta     = std::asin(sin_theta);
    const double x         = std::asin(std::cos(theta) * shrink);
    quadrant.push_back({theta, {x, y}});
  }
  std::sort(quadrant.begin(), quadrant.end(),
            [](const OvalSample& a, const OvalSample& b) { return a.point.y < b.point.y; });
  quadrant.erase(std::unique(quadrant.begin(), quadrant.end(),
                             [](const OvalSample& a, const OvalSample& b) {
                               return norm(a.point - b.point) <= 1e-12 * (1.0 + std::abs(a.point.y));
                             }),
                 quadrant.end());

  Timeslice s;
  s.time = t;
  auto push = [&](const OvalSample& q, double sx, double sy) {
    const double theta = std::atan2(sy * std::sin(q.theta), sx * std::cos(q.theta));
    s.points.push_back({sx * q.point.x, sy * q.point.y});
    s.normals.push_back(unit_at(theta));
    s.curvature.push_back(angenent_oval_curvature(q.theta, t));
  };
  const std::size_t last = quadrant.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) { push(quadrant[i], 1.0, 1.0); }
  for (std::size_t i = last; i-- > 0;) { push(quadrant[i], -1.0, 1.0); }
  for (std::size_t i = 1; i <= last; ++i) { push(quadrant[i], -1.0, -1.0); }
  for (std::size_t i = last; i-- > 1;) { push(quadrant[i], 1.0, -1.0); }
  assign_polyline_weights(s, true);
  return s;
}

Timeslice straight_line(Vec2 point, Vec2 normal, double half_length, double spacing, double time) {
  if (!(spacing > 0.0 && half_length > 0.0)) { throw DomainError("line sampling needs positive extent and spacing"); }
  const Vec2 tangent  = perp(normal);
  const auto count    = static_cast<std::size_t>(std::ceil(2.0 * half_length / spacing));
  const double actual = 2.0 * half_length / static_cast<double>(count);
  Timeslice s;
  s.time = time;
  for (std::size_t j = 0; j <= count; ++j) {
    const double arc = -half_length + actual * static_cast<double>(j);
    s.points.push_back(point + arc * tangent);
    s.normals.push_back(normal);
    s.curvature.push_back(0.0);
    s.weights.push_back(j == 0 || j == count ? 0.5 * actual : actual);
  }
  return s;
}

SeriesValue bowl_series(int n, double r) {
  const double nn = static_cast<double>(n);
  const double c4 = 1.0 / (4.0 * nn * nn * nn * (nn + 2.0));
  return {r * r / (2.0 * nn) + c4 * r * r * r * r, r / nn + 4.0 * c4 * r * r * r};
}

RadialProfile bowl_profile(int n, double r_max, double step) {
  if (n < 2) { throw DomainError(fmt::format("bowl_profile needs n >= 2, got {}", n)); }
  if (!(r_max >= 1.0)) { throw DomainError(fmt::format("bowl_profile needs r_max >= 1, got {}", r_max)); }
  if (!(step > 0.0 && step <= 1e-2)) {
    throw DomainError(fmt::format("bowl_profile needs 0 < step <= 1e-2, got {}", step));
  }
  using State          = std::array<double, 2>;
  const double coupled = static_cast<double>(n - 1);
  auto rhs             = [coupled](const State& s, State& ds, double r) {
    ds[0] = s[1];
    ds[1] = (1.0 + s[1] * s[1]) * (1.0 - coupled * s[1] / r);
  };

  const auto count = static_cast<std::size_t>(std::floor(r_max / step + 1e-9));
  std::vector<double> grid(count + 1);
  for (std::size_t j = 0; j <= count; ++j) { grid[j] = step * static_cast<double>(j); }

  RadialProfile p;
  p.dimension = n;
  p.radii     = grid;
  p.heights.assign(grid.size(), 0.0);
  p.slopes.assign(grid.size(), 0.0);
  const auto start = bowl_series(n, step);
  State state{start.height, start.slope};
  p.heights[1] = state[0];
  p.slopes[1]  = state[1];

  namespace odeint = boost::numeric::odeint;
  try {
    auto stepper    = odeint::make_dense_output(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>());
    std::size_t idx = 1;
    odeint::integrate_times(stepper, rhs, state, grid.begin() + 1, grid.end(), step * 0.1,
                            [&](const State& s, double) {
                              p.heights[idx] = s[0];
                              p.slopes[idx]  = s[1];
                              ++idx;
                            });
  } catch (const std::exception& e) {
    throw IntegrationFailure(fmt::format("bowl profile integration failed: {}", e.what()));
  }
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (!std::isfinite(p.heights[j]) || !std::isfinite(p.slopes[j])) {
      throw IntegrationFailure(fmt::format("bowl profile is not finite at r = {}", p.radii[j]));
    }
  }
  return p;
}

}  // namespace mcf
