#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mcf/convex_geometry.hpp"
#include "mcf/errors.hpp"
#include "mcf/soliton_catalog.hpp"

using namespace mcf;

namespace {

std::vector<double> sample(std::size_t n, auto f) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) { v[i] = f(2.0 * std::numbers::pi * static_cast<double>(i) / n); }
  return v;
}

}  // namespace

TEST_CASE("constant support embeds as the unit circle") {
  const SupportFunction h(std::vector<double>(64, 1.0));
  const Timeslice s = embed(h);
  REQUIRE(s.size() == 64);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(norm(s.points[i]) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.curvature[i] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(norm(s.normals[i]) - 1.0) < 1e-12);
    CHECK(dot(s.points[i], s.normals[i]) == doctest::Approx(1.0));
  }
}

TEST_CASE("curvature of 2 + cos(2θ)/2 at θ = 0") {
  // h + h'' = 2 - 1.5 cos 2θ, so H(0) = 1/0.5.
  const auto values = sample(64, [](double t) { return 2.0 + 0.5 * std::cos(2.0 * t); });
  const Timeslice spectral = embed(SupportFunction(values, DerivativeScheme::Spectral));
  CHECK(spectral.curvature[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(spectral.curvature[16] == doctest::Approx(1.0 / 3.5).epsilon(1e-12));

  const auto fine          = sample(400, [](double t) { return 2.0 + 0.5 * std::cos(2.0 * t); });
  const Timeslice centered = embed(SupportFunction(fine, DerivativeScheme::Centered));
  CHECK(centered.curvature[0] == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("a negative support value is not convex") {
  std::vector<double> values(64, 1.0);
  values[10] = -1.0;
  CHECK_THROWS_AS((void)embed(SupportFunction(values)), ConvexityLost);
}

TEST_CASE("grid size must be even and at least 16") {
  CHECK_THROWS_AS(SupportFunction(std::vector<double>(15, 1.0)), DomainError);
  CHECK_THROWS_AS(SupportFunction(std::vector<double>(8, 1.0)), DomainError);
}

TEST_CASE("circle measurements") {
  const double r = 1.7;
  const Measurements m = measure(SupportFunction(std::vector<double>(256, r)));
  CHECK(m.width_min == doctest::Approx(2.0 * r));
  CHECK(m.width_max == doctest::Approx(2.0 * r));
  CHECK(m.diameter == doctest::Approx(2.0 * r));
  CHECK(m.inradius == doctest::Approx(r).epsilon(1e-9));
  CHECK(m.circumradius == doctest::Approx(r).epsilon(1e-9));
  CHECK(m.circumradius / m.inradius == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ellipse widths against brute-force projections") {
  const SupportFunction h = ellipse_support(2.0, 1.0, 256);
  const Measurements m    = measure(h);

  // Width in direction θ from the extreme projections of dense boundary points.
  double wmin = 1e9;
  double wmax = 0.0;
  for (int k = 0; k < 720; ++k) {
    const double th = std::numbers::pi * k / 720.0;
    double lo = 1e9;
    double hi = -1e9;
    for (int j = 0; j < 4000; ++j) {
      const double s = 2.0 * std::numbers::pi * j / 4000.0;
      const double p = 2.0 * std::cos(s) * std::cos(th) + std::sin(s) * std::sin(th);
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
    wmin = std::min(wmin, hi - lo);
    wmax = std::max(wmax, hi - lo);
  }
  CHECK(m.width_min == doctest::Approx(wmin).epsilon(1e-6));
  CHECK(m.width_max == doctest::Approx(wmax).epsilon(1e-6));
  CHECK(m.width_min == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(m.width_max == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(m.diameter == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(m.inradius == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(m.circumradius == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(m.width_min <= m.width_max);
  CHECK(2.0 * m.inradius <= m.width_min + 1e-12);
}

TEST_CASE("curvature is unchanged by translation") {
  const SupportFunction h = ellipse_support(2.0, 1.0, 128);
  const Vec2 c{0.3, -1.1};
  const Timeslice a = embed(h);
  const Timeslice b = embed(translate(h, c));
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a.curvature[i] - b.curvature[i]) < 1e-10);
    CHECK(norm(b.points[i] - a.points[i] - c) < 1e-10);
  }
  const Timeslice ac = embed(SupportFunction(std::vector<double>(h.values().begin(), h.values().end()),
                                             DerivativeScheme::Centered));
  const SupportFunction moved = translate(h, c);
  const Timeslice bc          = embed(SupportFunction(std::vector<double>(moved.values().begin(), moved.values().end()),
                                                      DerivativeScheme::Centered));
  for (std::size_t i = 0; i < ac.size(); ++i) { CHECK(std::abs(ac.curvature[i] - bc.curvature[i]) < 1e-10); }
}

TEST_CASE("area and centroid") {
  CHECK(enclosed_area(SupportFunction(std::vector<double>(64, 2.0))) ==
        doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-12));
  CHECK(enclosed_area(ellipse_support(2.0, 1.0, 256)) == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-10));
  const Vec2 c = area_centroid(translate(ellipse_support(2.0, 1.0, 256), {1.5, -0.5}));
  CHECK(c.x == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(c.y == doctest::Approx(-0.5).epsilon(1e-9));
}

TEST_CASE("chords, radii and distances") {
  const SupportFunction unit(std::vector<double>(256, 1.0));
  const Chord c = chord(unit, {0.0, 0.0}, {1.0, 0.0});
  CHECK(c.forward == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.backward == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(chord(unit, {0.5, 0.0}, {0.0, 1.0}).length() == doctest::Approx(2.0 * std::sqrt(0.75)).epsilon(1e-3));

  const std::vector<Vec2> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  CHECK(circumradius(square) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(diameter(square) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  const std::vector<Vec2> normals{{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const std::vector<double> support{2.0, 1.0, 2.0, 1.0};
  CHECK(inradius(normals, support) == doctest::Approx(1.0).epsilon(1e-9));

  CHECK(hausdorff_distance(SupportFunction(std::vector<double>(64, 1.0)),
                           SupportFunction(std::vector<double>(64, 1.25))) == doctest::Approx(0.25));
}

TEST_CASE("parabolic rescaling") {
  SupportFlow circle;
  for (double t : {-4.0, -2.0, -1.0}) {
    circle.times.push_back(t);
    circle.frames.push_back(shrinking_circle(t, 64));
  }
  const SupportFlow half = parabolic_rescale(circle, 0.5);
  for (std::size_t m = 0; m < half.size(); ++m) {
    CHECK(half.times[m] == doctest::Approx(0.25 * circle.times[m]));
    CHECK(half.frames[m][7] == doctest::Approx(std::sqrt(-2.0 * half.times[m])).epsilon(1e-14));
  }
  const SupportFlow same = parabolic_rescale(circle, 1.0);
  CHECK(same.times == circle.times);
  CHECK(same.frames[1][3] == circle.frames[1][3]);

  const double t = -400.0;
  const SupportFlow oval{{t}, {angenent_oval_support(t, 256)}};
  const SupportFlow small = parabolic_rescale(oval, 0.1);
  CHECK(small.times[0] == doctest::Approx(0.01 * t));
  CHECK(measure(small.frames[0]).width_min == doctest::Approx(0.1 * std::numbers::pi).epsilon(1e-6));
}
