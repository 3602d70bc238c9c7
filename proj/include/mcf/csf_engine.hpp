#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "mcf/convex_geometry.hpp"
#include "mcf/errors.hpp"

namespace mcf {

struct StepPolicy {
  /// dt ≤ cfl / (max κ² · λ_max) where λ_max bounds the second-derivative
  /// operator of the scheme; explicit RK4 is stable up to cfl ≈ 2.78.
  double cfl{2.0};
  /// Frames recorded uniformly in log(-t).
  double frames_per_decade{50.0};
  int max_halvings{40};
  /// evolve stops once min h falls below this.
  double extinction_floor{1e-3};
  /// Additional times at which a frame is recorded.
  std::vector<double> checkpoints;
};

/// Thrown by evolve when the curve becomes too small; carries everything
/// computed so far.
class ExtinctionReached : public Error {
 public:
  ExtinctionReached(const std::string& what, SupportFlow partial)
      : Error(what), partial_(std::move(partial)) {}
  [[nodiscard]] const SupportFlow& partial() const { return partial_; }
  [[nodiscard]] double last_time() const { return partial_.times.empty() ? 0.0 : partial_.times.back(); }

 private:
  SupportFlow partial_;
};

/// Largest step the policy admits for this state.
[[nodiscard]] double stable_step(const SupportFunction& h, double cfl = StepPolicy{}.cfl);

/// One RK4 step of ∂ₜh = -1/(h + h'').
[[nodiscard]] SupportFunction step(const SupportFunction& h, double dt, double cfl = StepPolicy{}.cfl);

[[nodiscard]] SupportFlow evolve(const SupportFunction& h0, double t0, double t1, const StepPolicy& policy = {});

/// Frames with time ≥ t.
[[nodiscard]] SupportFlow trim_before(const SupportFlow& flow, double t);

struct SpacetimePoint {
  Vec2 x;
  double t{0.0};
};

/// Extinction time from the area law (area decreases at rate 2π) and
/// extinction point from the centroid of the last frame.
[[nodiscard]] SpacetimePoint extinction_estimate(const SupportFlow& flow);

// Blow-down -------------------------------------------------------------------

enum class DensityClass { PlaneMult1, Circle, PlaneMult2, Inconclusive };

[[nodiscard]] std::string_view to_string(DensityClass c);

/// Nearest of the shrinker densities 1, √(2π/e), 2 within ±band.
[[nodiscard]] DensityClass classify_density(double theta, double band = 0.05);

struct BlowDown {
  std::vector<std::pair<double, double>> densities;  // (λ, Θ_λ(-1))
  DensityClass label{DensityClass::Inconclusive};
};

/// Gaussian area of the λ-rescaled flow at time -1, i.e. of the frame at
/// T - λ⁻² about the extinction point. The label is the classification
/// shared by the two smallest λ, Inconclusive otherwise.
[[nodiscard]] BlowDown blow_down(const SupportFlow& flow, std::span<const double> lambdas);
[[nodiscard]] BlowDown blow_down(const SupportFlow& flow, std::span<const double> lambdas, SpacetimePoint basepoint);

// Asymptotic translator ------------------------------------------------------

struct AsymptoticTranslator {
  std::vector<double> times;
  /// Frames translated so that the point with normal e sits at the origin.
  std::vector<Timeslice> slices;
  /// Curvature at that point.
  std::vector<double> speeds;
};

[[nodiscard]] AsymptoticTranslator asymptotic_translator(const SupportFlow& flow, Vec2 direction,
                                                         std::span<const double> times);

/// Index of the frame recorded at time t (relative tolerance 1e-9).
[[nodiscard]] std::size_t frame_at(const SupportFlow& flow, double t);

// Arrival time -----------------------------------------------------------------

/// Symmetric 2×2 matrix.
struct Mat2 {
  double xx{0.0};
  double xy{0.0};
  double yy{0.0};
};

[[nodiscard]] double max_eigenvalue(const Mat2& m);

struct ArrivalSample {
  Vec2 point;
  double value{0.0};
  Vec2 gradient;
  Mat2 hessian;
};

/// u(X) = t ⇔ X on the frame at time t, reconstructed by intersecting the
/// ray from `center` through X with every frame and interpolating in time.
/// Each frame is the curve X(θ) = hν + h'ν^⊥ of an interpolant of its
/// support function matching the derivative scheme: the trigonometric
/// interpolant for spectral frames; for centered frames, the blend with
/// weight 3s² - 2s³ of the two circles R + ⟨p, ν⟩ fitted through three
/// neighbouring samples at either end of each grid interval.
class ArrivalTime {
 public:
  explicit ArrivalTime(const SupportFlow& flow);
  ArrivalTime(const SupportFlow& flow, Vec2 center);

  /// Throws OutOfSweep outside the earliest or inside the latest frame.
  [[nodiscard]] double value(Vec2 p) const;
  /// Centered differences; throws StencilFailure if `spacing` is below twice
  /// the distance swept between consecutive frames near p.
  [[nodiscard]] Vec2 gradient(Vec2 p, double spacing) const;
  [[nodiscard]] Mat2 hessian(Vec2 p, double spacing) const;
  /// Distance swept between the two frames bracketing p along its ray.
  [[nodiscard]] double sweep_per_frame(Vec2 p) const;

  [[nodiscard]] Vec2 center() const { return center_; }

 private:
  // Grid nodes sorted by polar angle about the center with their Gauss
  // angles; Fourier coefficients of h for spectral frames.
  struct Polar {
    DerivativeScheme scheme{DerivativeScheme::Centered};
    std::vector<double> values;
    std::vector<std::complex<double>> coeffs;
    std::vector<double> angle;
    std::vector<double> theta;
  };

  [[nodiscard]] std::size_t node_after(std::size_t frame, double angle) const;
  [[nodiscard]] double radius_at(std::size_t frame, double angle) const;
  // h, h' and h'' of the interpolant at θ.
  [[nodiscard]] std::array<double, 3> support_jet(const Polar& f, double theta) const;
  [[nodiscard]] std::size_t bracket(double angle, double r) const;
  void check_stencil(Vec2 p, double spacing) const;

  std::vector<double> times_;
  std::vector<Polar> frames_;
  Vec2 center_;
};

[[nodiscard]] std::vector<ArrivalSample> arrival_time_field(const SupportFlow& flow, std::span<const Vec2> grid,
                                                            double spacing);

}  // namespace mcf
