#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mcf/convex_geometry.hpp"

namespace mcf {

/// Rotationally symmetric graph z = u(r) over ℝⁿ (meridian of a hypersurface
/// in ℝⁿ⁺¹).
struct RadialProfile {
  int dimension{2};
  std::vector<double> radii;
  std::vector<double> heights;
  std::vector<double> slopes;

  [[nodiscard]] std::size_t size() const { return radii.size(); }
  [[nodiscard]] double r_max() const { return radii.empty() ? 0.0 : radii.back(); }
};

// Shrinking circles and cylinders ------------------------------------------

/// Constant support √(-2t): the circle reaching the origin at t = 0.
[[nodiscard]] SupportFunction shrinking_circle(double t, std::size_t grid_size = 256);

/// Radius √(-2(n-k)t) of the spherical factor of ℝᵏ × Sⁿ⁻ᵏ.
[[nodiscard]] double shrinker_radius(int n, int k, double t);

[[nodiscard]] SupportFunction ellipse_support(double a, double b, std::size_t grid_size = 256);

// Grim Reaper ----------------------------------------------------------------

/// Samples of y = t - log cos x at the given abscissae, |x| < π/2. Translates
/// with unit speed in +e₂; normals point away from the convex side (down).
[[nodiscard]] Timeslice grim_reaper(double t, std::span<const double> x_samples);

/// Grim Reaper sampled up to `max_height` above its tip on both branches;
/// the branches are parametrised by height so they can reach arbitrarily
/// close to the asymptotes x = ±π/2.
[[nodiscard]] Timeslice grim_reaper_by_height(double t, double max_height, std::size_t samples_per_branch);

// Angenent oval ---------------------------------------------------------------

/// Closed curve cosh y = e^{-t} cos x for t < 0. Samples combine a uniform
/// Gauss-angle grid (resolving the tips) with a uniform height grid
/// (resolving the long sides when -t is large).
[[nodiscard]] Timeslice angenent_oval(double t, std::size_t sample_count);

/// Exact support function of the oval on an N-point Gauss-angle grid.
[[nodiscard]] SupportFunction angenent_oval_support(double t, std::size_t grid_size,
                                                   DerivativeScheme scheme = DerivativeScheme::Centered);

/// Exact curvature of the oval at the point with outward normal angle θ.
[[nodiscard]] double angenent_oval_curvature(double theta, double t);

/// Point of the oval with outward normal angle θ.
[[nodiscard]] Vec2 angenent_oval_point(double theta, double t);

/// e^{t} cosh y - cos x, the scaled implicit residual (finite for any t).
[[nodiscard]] double angenent_oval_residual(Vec2 p, double t);

/// Catalog frames of the oval at the requested times.
[[nodiscard]] SupportFlow angenent_oval_flow(std::span<const double> times, std::size_t grid_size);

// Line -----------------------------------------------------------------------

/// Straight line through `point` with unit `normal`, sampled on
/// [-half_length, half_length] with the given spacing.
[[nodiscard]] Timeslice straight_line(Vec2 point, Vec2 normal, double half_length, double spacing, double time);

// Bowl soliton ---------------------------------------------------------------

/// Integrates u''/(1 + u'²) + (n-1)u'/r = 1, u(0) = u'(0) = 0, sampling the
/// profile every `step` up to `r_max`. The bowl opens upward and translates
/// with unit speed in +e_{n+1}.
[[nodiscard]] RadialProfile bowl_profile(int n, double r_max, double step);

/// Height and slope of the small-r expansion u = r²/(2n) + r⁴/(4n³(n+2)).
struct SeriesValue {
  double height;
  double slope;
};
[[nodiscard]] SeriesValue bowl_series(int n, double r);

}  // namespace mcf
