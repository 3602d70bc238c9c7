#include "mcf/csf_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "mcf/diagnostics.hpp"
#include "spectral.hpp"

namespace mcf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Raw-buffer RK4 so the long evolutions avoid per-stage allocation.
class Integrator {
 public:
  explicit Integrator(const SupportFunction& like)
      : n_(like.grid_size()),
        scheme_(like.scheme()),
        inv_denom_(1.0 / (2.0 - 2.0 * std::cos(like.theta_step()))),
        k1_(n_),
        k2_(n_),
        k3_(n_),
        k4_(n_),
        stage_(n_),
        rho_(n_) {}

  // h + h'' into out; false if any sample is at or below the convexity floor.
  bool radius(const std::vector<double>& h, std::vector<double>& out) const {
    if (scheme_ == DerivativeScheme::Spectral) {
      out = detail::spectral_identity_plus_second(h);
    } else {
      const std::size_t last = n_ - 1;
      out[0]                 = h[0] + (h[1] - 2.0 * h[0] + h[last]) * inv_denom_;
      for (std::size_t i = 1; i < last; ++i) { out[i] = h[i] + (h[i + 1] - 2.0 * h[i] + h[i - 1]) * inv_denom_; }
      out[last] = h[last] + (h[0] - 2.0 * h[last] + h[last - 1]) * inv_denom_;
    }
    for (double r : out) {
      if (!(r > kConvexityFloor)) { return false; }
    }
    return true;
  }

  // Advances h by dt given rho = h + h'' at h; on success h and rho hold the
  // new state. On failure both are left untouched.
  bool advance(std::vector<double>& h, std::vector<double>& rho, double dt) {
    for (std::size_t i = 0; i < n_; ++i) { k1_[i] = -1.0 / rho[i]; }
    if (!stage(h, 0.5 * dt, k1_, k2_) || !stage(h, 0.5 * dt, k2_, k3_) || !stage(h, dt, k3_, k4_)) { return false; }
    for (std::size_t i = 0; i < n_; ++i) {
      stage_[i] = h[i] + dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }
    if (!radius(stage_, rho_)) { return false; }
    h.swap(stage_);
    rho.swap(rho_);
    return true;
  }

  [[nodiscard]] double bound(const std::vector<double>& rho, double cfl) const {
    const double rho_min = *std::min_element(rho.begin(), rho.end());
    const auto n         = static_cast<double>(n_);
    const double lambda  = scheme_ == DerivativeScheme::Spectral ? 0.25 * n * n - 1.0 : 4.0 * inv_denom_ - 1.0;
    return cfl * rho_min * rho_min / lambda;
  }

 private:
  bool stage(const std::vector<double>& h, double a, const std::vector<double>& k, std::vector<double>& out) {
    for (std::size_t i = 0; i < n_; ++i) { stage_[i] = h[i] + a * k[i]; }
    if (!radius(stage_, out)) { return false; }
    for (double& r : out) { r = -1.0 / r; }
    return true;
  }

  std::size_t n_;
  DerivativeScheme scheme_;
  double inv_denom_;
  std::vector<double> k1_, k2_, k3_, k4_, stage_, rho_;
};

std::vector<double> frame_schedule(double t0, double t1, const StepPolicy& policy) {
  std::vector<double> times;
  if (policy.frames_per_decade > 0.0) {
    for (int k = 1;; ++k) {
      const double t = t0 * std::pow(10.0, -static_cast<double>(k) / policy.frames_per_decade);
      if (t >= t1) { break; }
      times.push_back(t);
    }
  }
  for (double c : policy.checkpoints) {
    if (c > t0 && c < t1) { times.push_back(c); }
  }
  times.push_back(t1);
  std::sort(times.begin(), times.end());
  std::vector<double> out;
  for (double t : times) {
    if (out.empty() || t - out.back() > 1e-12 * std::abs(t)) { out.push_back(t); }
  }
  return out;
}

}  // namespace

double stable_step(const SupportFunction& h, double cfl) {
  const Integrator integ(h);
  std::vector<double> rho(h.grid_size());
  if (!integ.radius({h.values().begin(), h.values().end()}, rho)) { throw ConvexityLost("support function is not strictly convex"); }
  return integ.bound(rho, cfl);
}

SupportFunction step(const SupportFunction& h, double dt, double cfl) {
  if (!(dt > 0.0)) { throw DomainError(fmt::format("time step must be positive, got {}", dt)); }
  Integrator integ(h);
  std::vector<double> v(h.values().begin(), h.values().end());
  std::vector<double> rho(v.size());
  if (!integ.radius(v, rho)) { throw ConvexityLost("support function is not strictly convex"); }
  const double bound = integ.bound(rho, cfl);
  if (dt > bound * (1.0 + 1e-12)) {
    throw StepRejected(fmt::format("dt = {:.3e} exceeds the stability bound {:.3e}", dt, bound));
  }
  if (!integ.advance(v, rho, dt)) { throw ConvexityLost("step produced a non-convex support function"); }
  return SupportFunction(std::move(v), h.scheme());
}

SupportFlow evolve(const SupportFunction& h0, double t0, double t1, const StepPolicy& policy) {
  if (!(t0 < t1) || !(t1 < 0.0)) {
    throw DomainError(fmt::format("evolve needs t0 < t1 < 0, got t0 = {}, t1 = {}", t0, t1));
  }
  SupportFlow flow;
  flow.cfl               = policy.cfl;
  flow.frames_per_decade = policy.frames_per_decade;
  flow.times.push_back(t0);
  flow.frames.push_back(h0);

  Integrator integ(h0);
  std::vector<double> h(h0.values().begin(), h0.values().end());
  std::vector<double> rho(h.size());
  if (!integ.radius(h, rho)) { throw ConvexityLost("initial support function is not strictly convex"); }
  auto record = [&](double t) {
    flow.times.push_back(t);
    flow.frames.emplace_back(h, h0.scheme());
  };

  double t = t0;
  for (double target : frame_schedule(t0, t1, policy)) {
    while (t < target) {
      double dt     = std::min(integ.bound(rho, policy.cfl), target - t);
      bool accepted = false;
      for (int halving = 0; halving <= policy.max_halvings && !accepted; ++halving) {
        accepted = integ.advance(h, rho, dt);
        if (!accepted) { dt *= 0.5; }
      }
      if (!accepted) {
        throw StepRejected(
            fmt::format("step rejected after {} halvings at t = {:.17g}", policy.max_halvings, t));
      }
      t = (target - t <= dt) ? target : t + dt;
      if (*std::min_element(h.begin(), h.end()) < policy.extinction_floor) {
        record(t);
        throw ExtinctionReached(fmt::format("support fell below {} at t = {:.17g}", policy.extinction_floor, t),
                                std::move(flow));
      }
    }
    record(t);
  }
  return flow;
}

SupportFlow trim_before(const SupportFlow& flow, double t) {
  SupportFlow out;
  out.cfl               = flow.cfl;
  out.frames_per_decade = flow.frames_per_decade;
  for (std::size_t m = 0; m < flow.size(); ++m) {
    if (flow.times[m] >= t - 1e-12 * std::abs(t)) {
      out.times.push_back(flow.times[m]);
      out.frames.push_back(flow.frames[m]);
    }
  }
  return out;
}

SpacetimePoint extinction_estimate(const SupportFlow& flow) {
  if (flow.size() == 0) { throw InsufficientHistory("empty flow"); }
  const auto& last = flow.frames.back();
  return {area_centroid(last), flow.times.back() + enclosed_area(last) / kTwoPi};
}

std::string_view to_string(DensityClass c) {
  switch (c) {
    case DensityClass::PlaneMult1: return "PlaneMult1";
    case DensityClass::Circle: return "Circle";
    case DensityClass::PlaneMult2: return "PlaneMult2";
    case DensityClass::Inconclusive: break;
  }
  return "Inconclusive";
}

DensityClass classify_density(double theta, double band) {
  const double circle = std::sqrt(kTwoPi / std::numbers::e);
  const std::pair<double, DensityClass> targets[] = {
      {1.0, DensityClass::PlaneMult1}, {circle, DensityClass::Circle}, {2.0, DensityClass::PlaneMult2}};
  for (const auto& [value, label] : targets) {
    if (std::abs(theta - value) <= band) { return label; }
  }
  return DensityClass::Inconclusive;
}

BlowDown blow_down(const SupportFlow& flow, std::span<const double> lambdas) {
  return blow_down(flow, lambdas, extinction_estimate(flow));
}

BlowDown blow_down(const SupportFlow& flow, std::span<const double> lambdas, SpacetimePoint basepoint) {
  if (lambdas.empty()) { throw DomainError("blow_down needs at least one scale"); }
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    if (!(lambdas[j] > 0.0 && lambdas[j] <= 1.0) || (j > 0 && !(lambdas[j] < lambdas[j - 1]))) {
      throw DomainError("blow_down scales must decrease within (0, 1]");
    }
  }
  BlowDown out;
  for (double lambda : lambdas) {
    const double t = basepoint.t - 1.0 / (lambda * lambda);
    if (t < flow.times.front() * (1.0 + 1e-12)) {
      throw InsufficientHistory(
          fmt::format("scale {} needs the flow at t = {:.6g}, earliest frame is {:.6g}", lambda, t, flow.times.front()));
    }
    if (t > flow.times.back() + 1e-12 * std::abs(flow.times.back())) {
      throw DomainError(fmt::format("scale {} needs the flow at t = {:.6g}, after the last frame", lambda, t));
    }
    auto hi = static_cast<std::size_t>(std::lower_bound(flow.times.begin(), flow.times.end(), t) - flow.times.begin());
    hi      = std::clamp<std::size_t>(hi, 0, flow.size() - 1);
    const double theta_hi = gaussian_density(embed(flow.frames[hi], flow.times[hi]), basepoint);
    double theta          = theta_hi;
    if (hi > 0 && flow.times[hi] != t) {
      const std::size_t lo  = hi - 1;
      const double theta_lo = gaussian_density(embed(flow.frames[lo], flow.times[lo]), basepoint);
      const double w        = (t - flow.times[lo]) / (flow.times[hi] - flow.times[lo]);
      theta                 = (1.0 - w) * theta_lo + w * theta_hi;
    }
    out.densities.emplace_back(lambda, theta);
  }
  const std::size_t k = out.densities.size();
  const auto last     = classify_density(out.densities[k - 1].second);
  if (k == 1) {
    out.label = last;
  } else {
    out.label = classify_density(out.densities[k - 2].second) == last ? last : DensityClass::Inconclusive;
  }
  return out;
}

std::size_t frame_at(const SupportFlow& flow, double t) {
  if (flow.size() == 0 || t < flow.times.front() * (1.0 + 1e-9)) {
    throw InsufficientHistory(fmt::format("no frame at t = {:.6g}", t));
  }
  for (std::size_t m = 0; m < flow.size(); ++m) {
    if (std::abs(flow.times[m] - t) <= 1e-9 * std::abs(t)) { return m; }
  }
  throw InsufficientHistory(fmt::format("no frame recorded at t = {:.6g}", t));
}

AsymptoticTranslator asymptotic_translator(const SupportFlow& flow, Vec2 direction, std::span<const double> times) {
  if (flow.size() == 0) { throw InsufficientHistory("empty flow"); }
  const double dtheta = flow.frames.front().theta_step();
  double angle        = std::atan2(direction.y, direction.x);
  if (angle < 0.0) { angle += kTwoPi; }
  const std::size_t i = flow.frames.front().wrap(static_cast<std::ptrdiff_t>(std::lround(angle / dtheta)));

  AsymptoticTranslator out;
  for (double s : times) {
    const std::size_t m = frame_at(flow, s);
    Timeslice slice     = embed(flow.frames[m], flow.times[m]);
    const Vec2 tip      = slice.points[i];
    for (Vec2& p : slice.points) { p -= tip; }
    out.times.push_back(flow.times[m]);
    out.speeds.push_back(slice.curvature[i]);
    out.slices.push_back(std::move(slice));
  }
  return out;
}

double max_eigenvalue(const Mat2& m) {
  const double mean = 0.5 * (m.xx + m.yy);
  const double dev  = std::hypot(0.5 * (m.xx - m.yy), m.xy);
  return mean + dev;
}

// Arrival time ---------------------------------------------------------------

ArrivalTime::ArrivalTime(const SupportFlow& flow) : ArrivalTime(flow, extinction_estimate(flow).x) {}

ArrivalTime::ArrivalTime(const SupportFlow& flow, Vec2 center) : times_(flow.times), center_(center) {
  if (flow.size() < 4) { throw InsufficientHistory("arrival time needs at least four frames"); }
  frames_.reserve(flow.size());
  for (const auto& h : flow.frames) {
    const Timeslice s = embed(h);
    std::vector<std::size_t> order(s.size());
    std::vector<double> angle(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Vec2 d = s.points[i] - center_;
      angle[i]     = std::atan2(d.y, d.x);
      order[i]     = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return angle[a] < angle[b]; });
    Polar f;
    f.scheme = h.scheme();
    f.values.assign(h.values().begin(), h.values().end());
    if (f.scheme == DerivativeScheme::Spectral) { f.coeffs = detail::fourier_coefficients(h.values()); }
    for (const std::size_t i : order) {
      f.angle.push_back(angle[i]);
      f.theta.push_back(h.theta(i));
    }
    frames_.push_back(std::move(f));
  }
}

std::size_t ArrivalTime::node_after(std::size_t frame, double angle) const {
  const Polar& f = frames_[frame];
  const auto it  = std::upper_bound(f.angle.begin(), f.angle.end(), angle);
  return static_cast<std::size_t>(it - f.angle.begin()) % f.angle.size();
}

std::array<double, 3> ArrivalTime::support_jet(const Polar& f, double theta) const {
  const std::size_t n = f.values.size();
  if (f.scheme == DerivativeScheme::Spectral) {
    const std::complex<double> rot = std::polar(1.0, theta);
    std::complex<double> e{1.0, 0.0};
    std::array<double, 3> jet{};
    for (std::size_t k = 0; k < f.coeffs.size(); ++k) {
      const double w  = (k == 0 || 2 * k == n) ? 1.0 : 2.0;
      const double dk = static_cast<double>(k);
      const std::complex<double> c = f.coeffs[k] * e;
      jet[0] += w * c.real();
      jet[1] -= w * dk * c.imag();
      jet[2] -= w * dk * dk * c.real();
      e *= rot;
    }
    return jet;
  }
  const double d    = kTwoPi / static_cast<double>(n);
  const double x    = theta / d;
  const double base = std::floor(x);
  const double s    = x - base;
  const auto i      = static_cast<std::ptrdiff_t>(base);
  auto at           = [&](std::ptrdiff_t k) {
    const auto m = static_cast<std::ptrdiff_t>(n);
    return f.values[static_cast<std::size_t>(((k % m) + m) % m)];
  };
  // R + P cos(θ - θ_k) + Q sin(θ - θ_k) through the samples k - 1, k, k + 1.
  auto circle = [&](std::ptrdiff_t k) {
    const double avg = 0.5 * (at(k + 1) + at(k - 1));
    const double p   = (at(k) - avg) / (1.0 - std::cos(d));
    const double q   = (at(k + 1) - at(k - 1)) / (2.0 * std::sin(d));
    const double phi = theta - static_cast<double>(k) * d;
    const double c   = std::cos(phi);
    const double sn  = std::sin(phi);
    return std::array<double, 3>{at(k) - p + p * c + q * sn, -p * sn + q * c, -p * c - q * sn};
  };
  const auto a = circle(i);
  const auto b = circle(i + 1);
  const double w   = s * s * (3.0 - 2.0 * s);
  const double w1  = 6.0 * s * (1.0 - s) / d;
  const double w2  = (6.0 - 12.0 * s) / (d * d);
  const double gap = b[0] - a[0];
  const double gp  = b[1] - a[1];
  return {a[0] + w * gap, a[1] + w * gp + w1 * gap, a[2] + w * (b[2] - a[2]) + 2.0 * w1 * gp + w2 * gap};
}

double ArrivalTime::radius_at(std::size_t frame, double angle) const {
  const Polar& f      = frames_[frame];
  const std::size_t b = node_after(frame, angle);
  const std::size_t a = (b + f.angle.size() - 1) % f.angle.size();
  const std::size_t n = f.values.size();
  const Vec2 ray      = unit_at(angle);

  struct Eval {
    Vec2 point;
    Vec2 velocity;
  };
  auto curve = [&](double theta) {
    const auto jet = support_jet(f, theta);
    const Vec2 nu  = unit_at(theta);
    return Eval{jet[0] * nu + jet[1] * perp(nu) - center_, (jet[0] + jet[2]) * perp(nu)};
  };

  // cross(ray, X(θ) - c) increases through zero near [θ_a, θ_b]; the grid
  // points come from the scheme's h', so widen until the signs bracket.
  const double step = kTwoPi / static_cast<double>(n);
  double lo         = f.theta[a];
  double hi         = f.theta[b];
  if (hi <= lo) { hi += kTwoPi; }
  for (int k = 0; k < 8 && cross(ray, curve(lo).point) > 0.0; ++k) { lo -= step; }
  for (int k = 0; k < 8 && cross(ray, curve(hi).point) < 0.0; ++k) { hi += step; }
  double theta = lo + (hi - lo) * 0.5;
  for (int it = 0; it < 100; ++it) {
    const Eval x   = curve(theta);
    const double g = cross(ray, x.point);
    if (g < 0.0) {
      lo = theta;
    } else {
      hi = theta;
    }
    const double slope = cross(ray, x.velocity);
    double next        = slope > 0.0 ? theta - g / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) { next = 0.5 * (lo + hi); }
    if (std::abs(next - theta) <= 1e-15 * std::max(1.0, std::abs(theta)) || hi - lo <= 1e-15) {
      theta = next;
      break;
    }
    theta = next;
  }
  return dot(curve(theta).point, ray);
}

std::size_t ArrivalTime::bracket(double angle, double r) const {
  // Radii shrink with the frame index; find m with R_m ≥ r > R_{m+1}.
  std::size_t lo = 0;
  std::size_t hi = frames_.size() - 1;
  if (r > radius_at(lo, angle)) { throw OutOfSweep("point lies outside the earliest frame"); }
  if (r <= radius_at(hi, angle)) { throw OutOfSweep("point lies inside the latest frame"); }
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (radius_at(mid, angle) >= r) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double ArrivalTime::value(Vec2 p) const {
  const Vec2 d       = p - center_;
  const double r     = norm(d);
  const double angle = std::atan2(d.y, d.x);
  const std::size_t m = bracket(angle, r);

  // Cubic in t through the frames m-1 .. m+2 (shifted at the ends).
  const std::size_t last  = frames_.size() - 1;
  const std::size_t first = std::min(m > 0 ? m - 1 : 0, last - 3);
  double ts[4];
  double rs[4];
  for (std::size_t k = 0; k < 4; ++k) {
    ts[k] = times_[first + k];
    rs[k] = radius_at(first + k, angle);
  }
  auto radius_of_t = [&](double t) {
    double out = 0.0;
    for (int a = 0; a < 4; ++a) {
      double l = 1.0;
      for (int b = 0; b < 4; ++b) {
        if (a != b) { l *= (t - ts[b]) / (ts[a] - ts[b]); }
      }
      out += l * rs[a];
    }
    return out;
  };
  double lo = times_[m];
  double hi = times_[m + 1];
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (radius_of_t(mid) >= r) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double ArrivalTime::sweep_per_frame(Vec2 p) const {
  const Vec2 d        = p - center_;
  const double angle  = std::atan2(d.y, d.x);
  const std::size_t m = bracket(angle, norm(d));
  return radius_at(m, angle) - radius_at(m + 1, angle);
}

void ArrivalTime::check_stencil(Vec2 p, double spacing) const {
  const double sweep = sweep_per_frame(p);
  if (spacing < 2.0 * sweep) {
    throw StencilFailure(
        fmt::format("stencil spacing {:.3e} is below twice the swept distance per frame {:.3e}", spacing, sweep));
  }
}

Vec2 ArrivalTime::gradient(Vec2 p, double spacing) const {
  check_stencil(p, spacing);
  const double e = spacing;
  return {(value(p + Vec2{e, 0.0}) - value(p - Vec2{e, 0.0})) / (2.0 * e),
          (value(p + Vec2{0.0, e}) - value(p - Vec2{0.0, e})) / (2.0 * e)};
}

Mat2 ArrivalTime::hessian(Vec2 p, double spacing) const {
  check_stencil(p, spacing);
  const double e  = spacing;
  const double u0 = value(p);
  Mat2 m;
  m.xx = (value(p + Vec2{e, 0.0}) - 2.0 * u0 + value(p - Vec2{e, 0.0})) / (e * e);
  m.yy = (value(p + Vec2{0.0, e}) - 2.0 * u0 + value(p - Vec2{0.0, e})) / (e * e);
  m.xy = (value(p + Vec2{e, e}) - value(p + Vec2{e, -e}) - value(p + Vec2{-e, e}) + value(p + Vec2{-e, -e})) /
         (4.0 * e * e);
  return m;
}

std::vector<ArrivalSample> arrival_time_field(const SupportFlow& flow, std::span<const Vec2> grid, double spacing) {
  const ArrivalTime u(flow);
  std::vector<ArrivalSample> out;
  out.reserve(grid.size());
  for (const Vec2& p : grid) {
    out.push_back({p, u.value(p), u.gradient(p, spacing), u.hessian(p, spacing)});
  }
  return out;
}

}  // namespace mcf
