#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mcf/vec2.hpp"

namespace mcf {

/// How θ-derivatives of a sampled support function are taken.
///
/// Spectral: FFT differentiation, exact on trigonometric polynomials of degree
/// below N/2. Used for smooth data.
///
/// Centered: three-point differences normalised by 2 - 2cos(dθ) (resp.
/// 2 sin(dθ)) so that cos θ and sin θ are differentiated exactly. With this
/// normalisation the samples are the support numbers of a convex polygon with
/// edge normals θ_i, h + h'' is proportional to the edge length, and adding a
/// translation ⟨c, ν⟩ leaves the curvature untouched. Used for data whose
/// curvature varies on scales below the grid spacing (long flat sides).
enum class DerivativeScheme { Spectral, Centered };

/// Threshold on h + h'' below which a sample is treated as non-convex.
inline constexpr double kConvexityFloor = 1e-9;

/// Uniform samples h(θ_i), θ_i = i·2π/N, of the support function of a compact
/// strictly convex planar curve.
class SupportFunction {
 public:
  /// Picks the spectral scheme when N is a power of two, centered otherwise.
  explicit SupportFunction(std::vector<double> values);
  SupportFunction(std::vector<double> values, DerivativeScheme scheme);

  [[nodiscard]] std::size_t grid_size() const { return values_.size(); }
  [[nodiscard]] double theta_step() const;
  [[nodiscard]] double theta(std::size_t i) const;
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
  [[nodiscard]] DerivativeScheme scheme() const { return scheme_; }

  /// Index arithmetic mod N.
  [[nodiscard]] std::size_t wrap(std::ptrdiff_t i) const;

 private:
  std::vector<double> values_;
  DerivativeScheme scheme_;
};

[[nodiscard]] DerivativeScheme default_scheme(std::size_t n);

/// Returns h' on the grid.
[[nodiscard]] std::vector<double> support_derivative(const SupportFunction& h);

/// Returns h + h'' (the radius of curvature) on the grid, without the
/// convexity check.
[[nodiscard]] std::vector<double> radius_of_curvature_unchecked(const SupportFunction& h);

/// Returns h + h'' and throws ConvexityLost if any sample is at or below
/// kConvexityFloor.
[[nodiscard]] std::vector<double> radius_of_curvature(const SupportFunction& h);

/// A sampled curve (or the meridian of a rotationally symmetric hypersurface).
///
/// Every sample stands for a short straight piece of length weights[i] through
/// points[i], orthogonal to normals[i]. Normals point out of the enclosed (or
/// convex) region; curvature is the scalar mean curvature, positive on convex
/// pieces, so that the mean curvature vector is -curvature·normal.
struct Timeslice {
  double time{0.0};
  std::vector<Vec2> points;
  std::vector<Vec2> normals;
  std::vector<double> curvature;
  std::vector<double> weights;
  /// Hypersurface dimension n the curvature refers to (1 for plane curves).
  int dimension{1};
  /// Samples of a smooth closed curve at uniform parameter steps. Curve
  /// quadratures then use the point rule (trapezoidal in the parameter,
  /// spectrally accurate) instead of integrating over the straight pieces.
  bool smooth{false};

  [[nodiscard]] std::size_t size() const { return points.size(); }
};

/// Appends the samples of `b` to `a` (disjoint union of two slices).
[[nodiscard]] Timeslice merge(const Timeslice& a, const Timeslice& b);

struct Measurements {
  double width_min{0.0};
  double width_max{0.0};
  double diameter{0.0};
  double inradius{0.0};
  double circumradius{0.0};
};

/// Time-indexed support functions, times increasing and negative.
struct SupportFlow {
  std::vector<double> times;
  std::vector<SupportFunction> frames;
  /// Step policy recorded by the engine.
  double cfl{0.0};
  double frames_per_decade{0.0};

  [[nodiscard]] std::size_t size() const { return times.size(); }
  [[nodiscard]] std::size_t resolution() const {
    return frames.empty() ? 0 : frames.front().grid_size();
  }
};

/// Realises the inverse Gauss map X(θ) = h e_r + h' e_θ.
[[nodiscard]] Timeslice embed(const SupportFunction& h, double time = 0.0);

[[nodiscard]] Measurements measure(const SupportFunction& h);

/// Width h(θ) + h(θ + π) at every grid angle.
[[nodiscard]] std::vector<double> widths(const SupportFunction& h);

/// Area enclosed, ½∫h(h + h'')dθ with the scheme's quadrature.
[[nodiscard]] double enclosed_area(const SupportFunction& h);

/// Centroid of the enclosed region.
[[nodiscard]] Vec2 area_centroid(const SupportFunction& h);

/// Length of the chord through `origin` in direction ±`direction`, measured
/// against the half-planes ⟨x, ν_i⟩ ≤ h_i. Returns {forward, backward} extents.
struct Chord {
  double forward{0.0};
  double backward{0.0};
  [[nodiscard]] double length() const { return forward + backward; }
};
[[nodiscard]] Chord chord(const SupportFunction& h, Vec2 origin, Vec2 direction);

/// Support function of the body translated by `shift`.
[[nodiscard]] SupportFunction translate(const SupportFunction& h, Vec2 shift);

/// h_λ(θ, t) = λ·h(θ, λ⁻²t).
[[nodiscard]] SupportFlow parabolic_rescale(const SupportFlow& flow, double lambda);

/// Largest circle inside ⋂{⟨x, ν_i⟩ ≤ h_i}.
[[nodiscard]] double inradius(std::span<const Vec2> normals, std::span<const double> support);

/// Radius of the smallest circle enclosing the points.
[[nodiscard]] double circumradius(std::span<const Vec2> points);

[[nodiscard]] double diameter(std::span<const Vec2> points);

/// Hausdorff distance between two convex bodies on a common grid:
/// max |h₁ - h₂|.
[[nodiscard]] double hausdorff_distance(const SupportFunction& a, const SupportFunction& b);

}  // namespace mcf
