#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "landsig/types.hpp"

namespace landsig {

enum class OverlapDefinition { PctOfZone, PctOfCluster, Iou };

std::string_view to_string(OverlapDefinition d);

struct OverlapRow {
  std::string zone_id;
  LandUseLabel zone_label = LandUseLabel::Business;
  double intersection_area_m2 = 0.0;
  double zone_area_m2 = 0.0;
  double pct_of_cluster = 0.0;
  double pct_of_zone = 0.0;
  double iou = 0.0;
};

/// Intersection of one cluster rectangle with the official zones of its
/// predicted label. Aggregate percentages use the zones the rectangle
/// actually touches; all areas share a projection anchored at the
/// rectangle's centre latitude.
struct OverlapReport {
  std::string cluster_id;
  LandUseLabel predicted_label = LandUseLabel::Business;
  double cluster_area_m2 = 0.0;
  std::vector<OverlapRow> rows;  // one per zone of the predicted label, input order
  double intersection_area_m2 = 0.0;
  double touched_zone_area_m2 = 0.0;
  double pct_of_cluster = 0.0;
  double pct_of_zone = 0.0;
  double iou = 0.0;
  OverlapDefinition headline_definition = OverlapDefinition::PctOfZone;
  double headline_pct = 0.0;
};

/// Throws NoZonesForLabel when no zone carries the predicted label.
OverlapReport overlap_report(std::string cluster_id, const BoundingBox& cluster,
                             LandUseLabel predicted, const std::vector<Zone>& zones,
                             OverlapDefinition headline = OverlapDefinition::PctOfZone);

struct ValidationRow {
  std::string dataset;
  OverlapReport report;
};

/// Table-style CSV: one row per cluster, one column per official label; the
/// headline percentage sits under the predicted label and the other columns
/// hold "-".
std::string overlap_table_csv(const std::vector<ValidationRow>& rows);
/// Every per-zone row plus the aggregate percentages.
std::string overlap_details_csv(const std::vector<ValidationRow>& rows);
/// Fixed-width text rendering of overlap_table_csv for terminals.
std::string overlap_table_text(const std::vector<ValidationRow>& rows);

}  // namespace landsig
