#pragma once

#include <string_view>

#include "mcf/convex_geometry.hpp"
#include "mcf/soliton_catalog.hpp"

namespace mcf {

/// A sampled translator moving with unit speed in `direction`.
struct TranslatorSample {
  Timeslice slice;
  Vec2 direction{0.0, 1.0};
};

/// max |H + ⟨e, ν⟩| over the samples. With normals pointing out of the convex
/// side, a translator with velocity e has mean curvature vector e^⊥, i.e.
/// H = -⟨e, ν⟩.
[[nodiscard]] double translator_residual(const Timeslice& s, Vec2 direction);

/// Meridian of the bowl in the (r, z) plane, both branches, as a translator in
/// +e₂ of the meridian plane. H is the full mean curvature of the hypersurface
/// with u'' taken from fourth-order differences of the integrated slopes;
/// weights carry the |Sⁿ⁻¹| r^{n-1} factor.
[[nodiscard]] TranslatorSample bowl_meridian(const RadialProfile& profile);

/// Samples scaled by λ about the origin (curvature scales by 1/λ).
[[nodiscard]] Timeslice scaled(const Timeslice& s, double lambda);

struct CylinderBlowDown {
  double lambda{0.0};
  /// λ·r(λ⁻²)/√(2(n-1)), where r(z) inverts the profile: the radius at which
  /// the rescaled translating flow at time -1 crosses height 0.
  double ratio{0.0};
  bool cylinder{false};
  [[nodiscard]] std::string_view label() const { return cylinder ? "Cylinder" : "Inconclusive"; }
};

/// Throws InsufficientProfile unless r_max ≥ 10/λ.
[[nodiscard]] CylinderBlowDown translator_blowdown(const RadialProfile& profile, double lambda);

struct SlabClass {
  bool entire{false};
  /// Extent orthogonal to the direction of motion; +∞ when entire.
  double width{0.0};
};

/// Entire when the extent orthogonal to e exceeds `horizon`; Slab when the
/// extent of the lower half (in height along e) is within `tolerance` of the
/// full extent. Throws Inconclusive otherwise.
[[nodiscard]] SlabClass slab_classify(const TranslatorSample& s, double horizon = 10.0 * 3.14159265358979323846,
                                      double tolerance = 1e-6);

/// Sup over the reference samples with |x| ≤ half_width of the vertical gap to
/// `curve`, after writing `curve` as a graph over the axis perp(direction)
/// with height along `direction`. The reference is a graph y(x) moving in +e₂.
[[nodiscard]] double graph_distance(const Timeslice& curve, Vec2 direction, const Timeslice& reference,
                                    double half_width);

}  // namespace mcf
