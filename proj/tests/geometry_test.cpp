#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "geometry_oracle.hpp"
#include "landsig/geometry.hpp"

namespace landsig {
namespace {

Ring square(double lat, double lon, double side) {
  return {{lat, lon}, {lat, lon + side}, {lat + side, lon + side}, {lat + side, lon}, {lat, lon}};
}

double area_of(const BoundingBox& rect, const Polygon& poly) {
  const double anchor = (rect.lat_min + rect.lat_max) / 2;
  return clipped_area_m2(clip_rect_polygon(rect, poly), anchor);
}

TEST(RingArea, EquatorialSquare) {
  EXPECT_NEAR(ring_area_m2(square(0, 0, 0.001)), 12364.0, 12364.0 * 0.005);
  EXPECT_NEAR(ring_area_m2(square(-0.0005, 10, 0.001)), 12364.0, 12364.0 * 0.005);
}

TEST(RingArea, SquareAtSixtyDegrees) {
  EXPECT_NEAR(ring_area_m2(square(60, 0, 0.001)), 6182.0, 6182.0 * 0.005);
}

TEST(RingArea, OrientationDoesNotMatter) {
  auto ring = square(-27.5, 153, 0.01);
  const double ccw = ring_area_m2(ring);
  std::reverse(ring.begin(), ring.end());
  EXPECT_DOUBLE_EQ(ring_area_m2(ring), ccw);
  EXPECT_LT(signed_area_deg2(ring) * signed_area_deg2(square(-27.5, 153, 0.01)), 0);
}

TEST(RingArea, DegenerateRings) {
  const auto code = [](Ring r) {
    try {
      ring_area_m2(canonicalize_ring(std::move(r)));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::NotFound;
  };
  EXPECT_EQ(code({{0, 0}, {0, 1}, {0, 2}}), ErrorCode::DegenerateRing);
  EXPECT_EQ(code({{0, 0}, {1, 1}, {1, 1}, {0, 0}}), ErrorCode::DegenerateRing);
}

TEST(CanonicalizeRing, ClosesAndDropsRepeats) {
  const auto r = canonicalize_ring({{0, 0}, {0, 1}, {0, 1}, {1, 1}});
  EXPECT_EQ(r, (Ring{{0, 0}, {0, 1}, {1, 1}, {0, 0}}));
}

TEST(IsSimple, DetectsBowTies) {
  EXPECT_TRUE(is_simple(square(0, 0, 1)));
  EXPECT_FALSE(is_simple(canonicalize_ring({{0, 0}, {1, 1}, {1, 0}, {0, 1}})));
}

TEST(Locate, InsideBoundaryOutsideAndHoles) {
  Polygon p{square(0, 0, 4), {square(1, 1, 1)}};
  EXPECT_EQ(locate_in_polygon(p, 0.5, 0.5), PointLocation::Inside);
  EXPECT_EQ(locate_in_polygon(p, 0, 2), PointLocation::Boundary);
  EXPECT_EQ(locate_in_polygon(p, 1.5, 1.5), PointLocation::Outside);
  EXPECT_EQ(locate_in_polygon(p, 5, 5), PointLocation::Outside);
  const auto ip = interior_point(p);
  EXPECT_EQ(locate_in_polygon(p, ip.lat, ip.lon), PointLocation::Inside);
}

TEST(Clip, PolygonInsideRectIsUnchanged) {
  const Polygon p{square(0.2, 0.2, 0.1), {}};
  const auto pieces = clip_rect_polygon({0, 1, 0, 1}, p);
  ASSERT_EQ(pieces.size(), 1u);
  EXPECT_NEAR(clipped_area_m2(pieces, 0.5), ring_area_m2(p.outer, 0.5), 1e-6);
}

TEST(Clip, DisjointIsEmpty) {
  EXPECT_TRUE(clip_rect_polygon({0, 1, 0, 1}, {square(2, 2, 1), {}}).empty());
  EXPECT_TRUE(clip_rect_polygon({0, 1, 0, 1}, {square(0, 1, 1), {}}).empty());
}

TEST(Clip, HoleIsSubtracted) {
  const Polygon p{square(0, 0, 1), {square(0.25, 0.25, 0.5)}};
  EXPECT_NEAR(area_of({0, 1, 0, 1}, p), 0.75 * testing::rect_area_m2({0, 1, 0, 1}, 0.5), 1e-3);
}

TEST(Clip, MatchesMonteCarloOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> offset(-0.004, 0.004);
  std::uniform_real_distribution<double> span(0.001, 0.008);
  for (int i = 0; i < 100; ++i) {
    const double lat = -37.8 + offset(rng);
    const double lon = 144.96 + offset(rng);
    const auto poly = testing::random_polygon(rng, -37.8, 144.96, 0.004, i % 2 == 1);
    ASSERT_TRUE(is_simple(poly.outer));
    const BoundingBox rect{lat, lat + span(rng), lon, lon + span(rng)};
    const double anchor = (rect.lat_min + rect.lat_max) / 2;
    const double rect_area = testing::rect_area_m2(rect, anchor);
    const double oracle = testing::monte_carlo_fraction(rect, poly, 200000, 100 + i) * rect_area;
    EXPECT_NEAR(area_of(rect, poly), oracle, 0.01 * rect_area) << "pair " << i;
  }
}

TEST(Clip, IntersectionNeverExceedsEitherArea) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> offset(-0.004, 0.004);
  std::uniform_real_distribution<double> span(0.0005, 0.01);
  for (int i = 0; i < 500; ++i) {
    const auto poly = testing::random_polygon(rng, 0, 0, 0.004, i % 2 == 0);
    const BoundingBox rect{offset(rng), 0, offset(rng), 0};
    BoundingBox r = rect;
    r.lat_max = r.lat_min + span(rng);
    r.lon_max = r.lon_min + span(rng);
    const double anchor = (r.lat_min + r.lat_max) / 2;
    const double inter = area_of(r, poly);
    const double bound = std::min(testing::rect_area_m2(r, anchor), ring_area_m2(poly.outer, anchor));
    EXPECT_LE(inter, bound * (1 + 1e-6));
    EXPECT_GE(inter, 0.0);
  }
}

TEST(Clip, RotationAndOrientationInvariant) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    auto poly = testing::random_polygon(rng, 0, 0, 0.004, true);
    const BoundingBox r{-0.002, 0.003, -0.001, 0.002};
    const double base = area_of(r, poly);
    Ring open(poly.outer.begin(), poly.outer.end() - 1);
    std::rotate(open.begin(), open.begin() + static_cast<long>(i % open.size()), open.end());
    if (i % 2) std::reverse(open.begin(), open.end());
    open.push_back(open.front());
    EXPECT_NEAR(area_of(r, Polygon{open, {}}), base, 1e-6 * (1 + base));
  }
}

TEST(Clip, TranslationKeepsCoverageAndScalesAreaByCosine) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> shift(-0.1, 0.1);
  for (int i = 0; i < 200; ++i) {
    const auto poly = testing::random_polygon(rng, -33.87, 151.21, 0.004, true);
    const BoundingBox r{-33.872, -33.866, 151.207, 151.213};
    const double base = area_of(r, poly);
    if (base < 1.0) continue;
    const double dlat = shift(rng);
    const double dlon = shift(rng);
    Polygon moved = poly;
    for (auto& v : moved.outer) v = {v.lat + dlat, v.lon + dlon};
    const BoundingBox mr{r.lat_min + dlat, r.lat_max + dlat, r.lon_min + dlon, r.lon_max + dlon};
    const double moved_area = area_of(mr, moved);
    const double coverage = base / testing::rect_area_m2(r, (r.lat_min + r.lat_max) / 2);
    const double moved_coverage = moved_area / testing::rect_area_m2(mr, (mr.lat_min + mr.lat_max) / 2);
    EXPECT_NEAR(moved_coverage, coverage, 0.001 * coverage);
    const double cos_ratio = std::cos((mr.lat_min + mr.lat_max) / 2 * std::numbers::pi / 180) /
                             std::cos((r.lat_min + r.lat_max) / 2 * std::numbers::pi / 180);
    EXPECT_NEAR(moved_area, base * cos_ratio, 1e-6 * base);
  }
}

TEST(PolygonsOverlap, SharedEdgesDoNotCount) {
  const Polygon a{square(0, 0, 1), {}};
  EXPECT_FALSE(polygons_overlap(a, {square(0, 1, 1), {}}));
  EXPECT_FALSE(polygons_overlap(a, {square(1, 1, 1), {}}));
  EXPECT_TRUE(polygons_overlap(a, {square(0.5, 0.5, 1), {}}));
  EXPECT_TRUE(polygons_overlap(a, {square(0.25, 0.25, 0.5), {}}));
  EXPECT_TRUE(polygons_overlap(a, a));
  EXPECT_FALSE(polygons_overlap({square(0, 0, 4), {square(1, 1, 2)}}, {square(1.5, 1.5, 1), {}}));
}

}  // namespace
}  // namespace landsig
