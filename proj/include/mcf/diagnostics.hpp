#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcf/convex_geometry.hpp"
#include "mcf/csf_engine.hpp"

namespace mcf {

// Gaussian area ---------------------------------------------------------------

/// Θ = ∫ Φ(p - x₀, t - t₀) over the slice, Φ(p, t) = (-4πt)^{-n/2} e^{|p|²/4t}.
///
/// For curves each sample is integrated exactly over its straight piece
/// (erf quadrature), so polygons and lines are handled without error beyond
/// rounding. Smooth slices (spectral frames) and n ≥ 2 use the point rule
/// with the sample weights.
[[nodiscard]] double gaussian_density(const Timeslice& s, SpacetimePoint basepoint);

/// ∫ |H⃗ + p^⊥/(-2t)|² Φ with p, t relative to the basepoint.
[[nodiscard]] double density_deficit(const Timeslice& s, SpacetimePoint basepoint);

/// Largest Θ(t_{m+1}) - Θ(t_m) along the flow.
[[nodiscard]] double monotonicity_check(const SupportFlow& flow, SpacetimePoint basepoint);

struct MonotonicityIdentity {
  /// max over interior frames of |dΘ/dt + deficit| / deficit.
  double max_relative_mismatch{0.0};
  std::vector<double> times;
  std::vector<double> derivative;
  std::vector<double> deficit;
};

/// Compares the three-point difference quotient of Θ with -deficit.
[[nodiscard]] MonotonicityIdentity monotonicity_identity(const SupportFlow& flow, SpacetimePoint basepoint);

struct GaussianBound {
  double measured{0.0};
  double bound{0.0};
};

/// sup over τ of τ^{-n/2} ∫ e^{-|y|²/τ} against c_n Σ (i+1)ⁿ e^{-i²}, with c_n
/// the area of the unit n-sphere.
[[nodiscard]] GaussianBound gaussian_bound_check(const Timeslice& s, std::span<const double> taus);

[[nodiscard]] double gaussian_area_bound(int n);

// Harnack and arrival time ---------------------------------------------------

/// min over θ and consecutive frames of the difference quotient of κ in t.
[[nodiscard]] double harnack_min(const SupportFlow& flow);

/// A grid point (θ index) on an interior frame.
struct FrameSample {
  std::size_t frame{0};
  std::size_t index{0};
};

/// `count` samples drawn with a fixed seed from frames with time in [t_lo, t_hi].
[[nodiscard]] std::vector<FrameSample> frame_samples(const SupportFlow& flow, std::size_t count, double t_lo,
                                                     double t_hi, std::uint64_t seed = 1);

/// D²u in the frame (ν^⊥, ν), ν the outer normal, from κ, κ_θ and ∂ₜκ at fixed θ:
/// [[-1, κ_θ/κ], [κ_θ/κ, -(∂ₜκ + κκ_θ²)/κ³]].
[[nodiscard]] Mat2 arrival_hessian_formula(const SupportFlow& flow, const FrameSample& sample);

/// The same matrix rotated to Cartesian axes.
[[nodiscard]] Mat2 arrival_hessian_formula_xy(const SupportFlow& flow, const FrameSample& sample);

struct ArrivalHessianCheck {
  double max_eigenvalue{0.0};
  /// Largest entry difference between the formula and the finite-difference
  /// Hessian over max(1, largest formula entry); empty when the cross-check
  /// is off.
  std::optional<double> max_mismatch;
  std::size_t samples{0};
};

/// Max eigenvalue of the formula Hessian over the samples; if `field` is
/// given, also the cross-check against its difference stencils with spacing
/// max(min_spacing, 2.5 × swept distance per frame).
[[nodiscard]] ArrivalHessianCheck arrival_hessian_check(const SupportFlow& flow, std::span<const FrameSample> samples,
                                                        const ArrivalTime* field = nullptr,
                                                        double min_spacing = 0.0);

/// max |div(Du/|Du|) + 1/|Du|| at the points, from difference stencils with
/// spacing max(min_spacing, 2.5 × swept distance per frame). Throws
/// DegenerateGradient if |Du| < 0.1 at a point.
[[nodiscard]] double level_set_residual(const ArrivalTime& u, std::span<const Vec2> points, double min_spacing);

/// Spacing used by the stencils above at p.
[[nodiscard]] double stencil_spacing(const ArrivalTime& u, Vec2 p, double min_spacing);

/// Midpoint concavity along segments: max of (u(a) + u(b))/2 - u((a + b)/2).
[[nodiscard]] double concavity_defect(const ArrivalTime& u, std::span<const std::pair<Vec2, Vec2>> segments);

// Rigidity and slab quantities ---------------------------------------------

struct DiagnosticSeries {
  std::vector<double> times;
  std::map<std::string, std::vector<double>> channels;
};

/// typeI = √(T - t)·max κ, rescaled_diam = diam/√(T - t), eccentricity =
/// circumradius/inradius, and the pinching ratio κ₁/H (≡ 1 for curves).
[[nodiscard]] DiagnosticSeries rigidity_series(const SupportFlow& flow, double extinction_time);

struct WangClaim {
  /// inf over all frames of d(t)·v(0, t)/(-t).
  double alpha{0.0};
  /// inf and sup over the earliest half of the frames.
  double alpha_early_min{0.0};
  double alpha_early_max{0.0};
  std::vector<double> times;
  std::vector<double> values;
};

/// v(0, t): chord through the centroid along the slab normal; d(t): distance
/// from the centroid to the boundary orthogonally to it (the shorter side).
/// Throws NotSlabLike unless `blow_down_label` is PlaneMult2.
[[nodiscard]] WangClaim wang_claim1_check(const SupportFlow& flow, Vec2 slab_normal, DensityClass blow_down_label);

struct GradientEstimate {
  /// min over samples of v/(d - |y|) - |Dv|.
  double min_slack{0.0};
  std::size_t samples{0};
};

/// Width function v(y) along the axis orthogonal to the slab normal, checked
/// against |Dv| ≤ v/(d - |y|) at `count` points with |y| ≤ d - margin.
[[nodiscard]] GradientEstimate gradient_estimate_check(const SupportFunction& frame, Vec2 slab_normal,
                                                       std::size_t count, double margin = 0.5);

/// Channel names understood by diagnostic_series.
[[nodiscard]] std::span<const std::string> known_channels();

/// Per-frame channels for a flow. harnack_min uses the difference with the
/// previous frame (the next one for the first frame); wang_alpha needs a
/// slab normal and is skipped otherwise.
[[nodiscard]] DiagnosticSeries diagnostic_series(const SupportFlow& flow, SpacetimePoint basepoint,
                                                 std::span<const std::string> channels,
                                                 std::optional<Vec2> slab_normal = std::nullopt);

}  // namespace mcf
