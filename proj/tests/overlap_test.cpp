#include <gtest/gtest.h>

#include <random>

#include "geometry_oracle.hpp"
#include "landsig/geometry.hpp"
#include "landsig/overlap.hpp"
#include "landsig/synth.hpp"

namespace landsig {
namespace {

using L = LandUseLabel;

Zone rect_zone(L label, const BoundingBox& b, std::string id) {
  return Zone{label, {Polygon{rect_ring(b), {}}}, std::move(id)};
}

TEST(Overlap, ClusterInsideZoneFourTimesItsArea) {
  const std::vector<Zone> zones = {rect_zone(L::Business, {0, 0.02, 0, 0.02}, "z")};
  const auto r = overlap_report("c", {0.005, 0.015, 0.005, 0.015}, L::Business, zones);
  EXPECT_NEAR(r.pct_of_cluster, 100.0, 1e-9);
  EXPECT_NEAR(r.pct_of_zone, 25.0, 1e-9);
  EXPECT_NEAR(r.iou, 25.0, 1e-9);
  EXPECT_EQ(r.headline_definition, OverlapDefinition::PctOfZone);
  EXPECT_DOUBLE_EQ(r.headline_pct, r.pct_of_zone);
}

TEST(Overlap, DisjointClusterScoresZero) {
  const std::vector<Zone> zones = {rect_zone(L::Business, {0, 0.01, 0, 0.01}, "a"),
                                   rect_zone(L::Education, {0.02, 0.03, 0.02, 0.03}, "b")};
  const auto r = overlap_report("c", {0.02, 0.03, 0.02, 0.03}, L::Business, zones);
  EXPECT_EQ(r.pct_of_cluster, 0.0);
  EXPECT_EQ(r.pct_of_zone, 0.0);
  EXPECT_EQ(r.iou, 0.0);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].zone_id, "a");
}

TEST(Overlap, NoZonesForLabel) {
  const std::vector<Zone> zones = {rect_zone(L::Business, {0, 0.01, 0, 0.01}, "a")};
  try {
    overlap_report("c", {0, 0.01, 0, 0.01}, L::Recreation, zones);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoZonesForLabel);
  }
}

TEST(Overlap, ExactZoneMatchIsFullOverlap) {
  const auto zones = zones_of(default_profiles());
  for (const auto& z : zones) {
    const auto r = overlap_report("c", z.bounds(), z.label, zones);
    EXPECT_NEAR(r.pct_of_cluster, 100.0, 0.1);
    EXPECT_NEAR(r.pct_of_zone, 100.0, 0.1);
    EXPECT_NEAR(r.iou, 100.0, 0.1);
  }
}

TEST(Overlap, MultipleZonesOfOneLabelAreSummed) {
  const std::vector<Zone> zones = {rect_zone(L::Recreation, {0, 0.01, 0, 0.01}, "west"),
                                   rect_zone(L::Recreation, {0, 0.01, 0.01, 0.02}, "east"),
                                   rect_zone(L::Recreation, {0.5, 0.6, 0.5, 0.6}, "far")};
  const auto r = overlap_report("c", {0, 0.01, 0.005, 0.015}, L::Recreation, zones);
  EXPECT_EQ(r.rows.size(), 3u);
  EXPECT_NEAR(r.pct_of_cluster, 100.0, 1e-6);
  EXPECT_NEAR(r.pct_of_zone, 50.0, 1e-6);
  EXPECT_NEAR(r.iou, 50.0, 1e-6);
  EXPECT_EQ(r.rows[2].intersection_area_m2, 0.0);
}

TEST(Overlap, IouNeverExceedsTheOtherDefinitions) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> offset(-0.006, 0.006);
  std::uniform_real_distribution<double> span(0.0005, 0.012);
  for (int i = 0; i < 500; ++i) {
    std::vector<Zone> zones = {Zone{L::Residential, {testing::random_polygon(rng, -27.47, 153.02, 0.004, i % 2)}, "z"}};
    const double lat = -27.47 + offset(rng);
    const double lon = 153.02 + offset(rng);
    const BoundingBox rect{lat, lat + span(rng), lon, lon + span(rng)};
    for (auto def : {OverlapDefinition::PctOfZone, OverlapDefinition::PctOfCluster, OverlapDefinition::Iou}) {
      const auto r = overlap_report("c", rect, L::Residential, zones, def);
      EXPECT_LE(r.iou, std::min(r.pct_of_cluster, r.pct_of_zone) + 1e-12);
      EXPECT_LE(r.pct_of_cluster, 100.0 + 1e-9);
      EXPECT_LE(r.pct_of_zone, 100.0 + 1e-9);
      const double expected = def == OverlapDefinition::PctOfZone      ? r.pct_of_zone
                              : def == OverlapDefinition::PctOfCluster ? r.pct_of_cluster
                                                                       : r.iou;
      EXPECT_EQ(r.headline_pct, expected);
    }
  }
}

std::vector<ValidationRow> sample_rows() {
  const std::vector<Zone> zones = {rect_zone(L::Business, {0, 0.02, 0, 0.02}, "b"),
                                   rect_zone(L::Education, {0.03, 0.04, 0, 0.01}, "e")};
  return {{"Melbourne", overlap_report("1", {0.005, 0.015, 0.005, 0.015}, L::Business, zones)},
          {"Melbourne", overlap_report("2", {0.03, 0.035, 0, 0.01}, L::Education, zones)}};
}

TEST(OverlapTable, ColumnsFollowTheOfficialLabels) {
  const auto csv = overlap_table_csv(sample_rows());
  EXPECT_EQ(csv,
            "dataset,cluster,predicted_land_use,Business,Residential,Education,Recreation,definition\n"
            "Melbourne,1,Business,25.0,-,-,-,pct_of_zone\n"
            "Melbourne,2,Education,-,-,50.0,-,pct_of_zone\n");
}

TEST(OverlapTable, DetailsAndTextRenderings) {
  const auto rows = sample_rows();
  const auto details = overlap_details_csv(rows);
  EXPECT_NE(details.find("Melbourne,1"), std::string::npos);
  EXPECT_NE(overlap_table_text(rows).find("Education"), std::string::npos);
}

}  // namespace
}  // namespace landsig
