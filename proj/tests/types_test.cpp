#include <gtest/gtest.h>

#include <random>

#include "landsig/types.hpp"
#include "support.hpp"

namespace landsig {
namespace {

ErrorCode code_of(const BoundingBox& b) {
  try {
    validate_bbox(b);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::InvalidArgument;
}

TEST(BoundingBox, AcceptsPublishedClusterExtent) {
  EXPECT_NO_THROW(validate_bbox({-37.82, -37.80, 144.95, 144.97}));
}

TEST(BoundingBox, ZeroLatitudeExtentIsDegenerate) {
  EXPECT_EQ(code_of({0, 0, 10, 20}), ErrorCode::DegenerateBox);
}

TEST(BoundingBox, LongitudePast180IsOutOfRange) {
  EXPECT_EQ(code_of({10, 20, 170, 190}), ErrorCode::OutOfRange);
}

TEST(BoundingBox, InvertedAndNonFiniteBoxes) {
  EXPECT_EQ(code_of({1, 0, 0, 1}), ErrorCode::DegenerateBox);
  EXPECT_EQ(code_of({0, 1, 179, -179}), ErrorCode::DegenerateBox);
  EXPECT_EQ(code_of({0, std::nan(""), 0, 1}), ErrorCode::OutOfRange);
  EXPECT_EQ(code_of({-91, 0, 0, 1}), ErrorCode::OutOfRange);
}

TEST(BoundingBox, HalfOpenContainment) {
  const BoundingBox b{0, 1, 0, 1};
  EXPECT_TRUE(b.contains(0.0, 0.0));
  EXPECT_TRUE(b.contains(0.5, 0.0));
  EXPECT_FALSE(b.contains(1.0, 0.5));
  EXPECT_FALSE(b.contains(0.5, 1.0));
  EXPECT_FALSE(b.contains(1.0, 1.0));
}

TEST(BoundingBox, AdjacentBoxesTileWithoutDoubleCounting) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> grid(0, 20);
  const BoundingBox left{0, 1, 0, 0.5};
  const BoundingBox right{0, 1, 0.5, 1};
  const BoundingBox both{0, 1, 0, 1};
  for (int i = 0; i < 2000; ++i) {
    const double lat = grid(rng) / 20.0;
    const double lon = grid(rng) / 20.0;
    const int n = int(left.contains(lat, lon)) + int(right.contains(lat, lon));
    EXPECT_EQ(n, int(both.contains(lat, lon))) << lat << "," << lon;
  }
}

TEST(GeoEvent, ValidationBounds) {
  EXPECT_NO_THROW(validate_event({-90, 180, 0, "u"}));
  EXPECT_THROW(validate_event({90.5, 0, 0, "u"}), Error);
  EXPECT_THROW(validate_event({0, -180.1, 0, "u"}), Error);
  EXPECT_THROW(validate_event({0, 0, -1, "u"}), Error);
  EXPECT_THROW(validate_event({std::nan(""), 0, 0, "u"}), Error);
}

TEST(LandUseLabel, NamesRoundTripCaseInsensitively) {
  for (auto label : kAllLabels) {
    EXPECT_EQ(parse_label(to_string(label)), label);
  }
  EXPECT_EQ(parse_label("rEcReAtIoN"), LandUseLabel::Recreation);
  EXPECT_EQ(parse_label("Industrial"), std::nullopt);
}

TEST(HourlyCounts, TotalAndAccumulate) {
  auto a = testing::uniform_counts(2);
  a += testing::counts_of({5});
  EXPECT_EQ(a.total(), 53u);
  EXPECT_EQ(a[0], 7u);
}

}  // namespace
}  // namespace landsig
