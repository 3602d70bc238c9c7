#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mcf/errors.hpp"
#include "mcf/soliton_catalog.hpp"
#include "mcf/translator_engine.hpp"

using namespace mcf;

TEST_CASE("grim reaper is a translator") {
  std::vector<double> xs;
  for (int i = -300; i <= 300; ++i) { xs.push_back(1.55 * i / 300.0); }
  const Timeslice s = grim_reaper(0.0, xs);
  CHECK(translator_residual(s, {0.0, 1.0}) < 1e-12);
  CHECK(translator_residual(s, {0.0, -1.0}) > 1.0);
  CHECK(translator_residual(grim_reaper_by_height(0.0, 20.0, 100), {0.0, 1.0}) < 1e-12);
}

TEST_CASE("a line parallel to the motion is a translator") {
  const Timeslice s = straight_line({0.0, 0.0}, {1.0, 0.0}, 10.0, 0.1, 0.0);
  CHECK(translator_residual(s, {0.0, 1.0}) == 0.0);
}

TEST_CASE("bowl meridian is a translator") {
  for (int n : {2, 3}) {
    const TranslatorSample b = bowl_meridian(bowl_profile(n, 20.0, 1e-3));
    CHECK(b.slice.dimension == n);
    CHECK(translator_residual(b.slice, b.direction) < 1e-8);
  }
  RadialProfile tiny;
  tiny.radii = {0.0, 0.1};
  CHECK_THROWS_AS((void)bowl_meridian(tiny), InsufficientProfile);
}

TEST_CASE("scaling") {
  const std::vector<double> xs{-1.0, 0.0, 1.0};
  Timeslice s      = grim_reaper(-2.0, xs);
  const Timeslice h = scaled(s, 0.5);
  CHECK(h.time == doctest::Approx(-0.5));
  CHECK(h.points[2].x == doctest::Approx(0.5));
  CHECK(h.curvature[2] == doctest::Approx(2.0 * std::cos(1.0)));
  CHECK_THROWS_AS((void)scaled(s, 0.0), DomainError);
}

TEST_CASE("bowl blow-down is the cylinder") {
  for (int n : {2, 3}) {
    const RadialProfile p   = bowl_profile(n, 250.0, 1e-2);
    const CylinderBlowDown c = translator_blowdown(p, 0.05);
    // Height λ⁻² is reached near r = √(2(n-1)λ⁻²), where the ratio is 1.
    CHECK(c.ratio == doctest::Approx(1.0).epsilon(0.05));
    CHECK(c.label() == "Cylinder");
  }
  CHECK_THROWS_AS((void)translator_blowdown(bowl_profile(2, 2.0, 1e-2), 0.05), InsufficientProfile);
  CHECK_THROWS_AS((void)translator_blowdown(bowl_profile(2, 250.0, 1e-2), 1.5), DomainError);
}

TEST_CASE("slab dichotomy") {
  const SlabClass grim = slab_classify({grim_reaper_by_height(0.0, 40.0, 400), {0.0, 1.0}});
  CHECK_FALSE(grim.entire);
  CHECK(std::abs(grim.width - std::numbers::pi) < 1e-6);

  const SlabClass bowl = slab_classify(bowl_meridian(bowl_profile(2, 100.0, 1e-2)));
  CHECK(bowl.entire);

  CHECK_THROWS_AS((void)slab_classify(bowl_meridian(bowl_profile(2, 1.0, 1e-3)), 10.0), Inconclusive);
}

TEST_CASE("graph distance between grim reapers") {
  std::vector<double> xs;
  for (int i = -100; i <= 100; ++i) { xs.push_back(1.5 * i / 100.0); }
  const Timeslice a = grim_reaper(0.0, xs);
  const Timeslice b = grim_reaper(0.25, xs);
  CHECK(graph_distance(b, {0.0, 1.0}, a, 1.0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS((void)graph_distance(a, {0.0, 1.0}, a, 1.6), DomainError);
}
