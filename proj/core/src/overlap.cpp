#include "landsig/overlap.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "landsig/geometry.hpp"

namespace landsig {

namespace {

double pct(double num, double den) {
  if (den <= 0.0) return 0.0;
  return std::clamp(100.0 * num / den, 0.0, 100.0);
}

struct Percentages {
  double of_cluster, of_zone, iou;
};

Percentages percentages(double intersection, double cluster_area, double zone_area) {
  Percentages p{pct(intersection, cluster_area), pct(intersection, zone_area),
                pct(intersection, cluster_area + zone_area - intersection)};
  p.iou = std::min({p.iou, p.of_cluster, p.of_zone});
  return p;
}

double headline_of(OverlapDefinition d, double of_cluster, double of_zone, double iou) {
  switch (d) {
    case OverlapDefinition::PctOfCluster: return of_cluster;
    case OverlapDefinition::Iou: return iou;
    case OverlapDefinition::PctOfZone: break;
  }
  return of_zone;
}

std::string fmt_pct(double v) { return fmt::format("{:.1f}", v); }

}  // namespace

std::string_view to_string(OverlapDefinition d) {
  switch (d) {
    case OverlapDefinition::PctOfZone: return "pct_of_zone";
    case OverlapDefinition::PctOfCluster: return "pct_of_cluster";
    case OverlapDefinition::Iou: return "iou";
  }
  return "unknown";
}

OverlapReport overlap_report(std::string cluster_id, const BoundingBox& cluster,
                             LandUseLabel predicted, const std::vector<Zone>& zones,
                             OverlapDefinition headline) {
  validate_bbox(cluster);
  const double anchor = 0.5 * (cluster.lat_min + cluster.lat_max);

  OverlapReport r;
  r.cluster_id = std::move(cluster_id);
  r.predicted_label = predicted;
  r.cluster_area_m2 = ring_area_m2(rect_ring(cluster), anchor);
  r.headline_definition = headline;

  bool any_zone = false;
  for (const auto& zone : zones) {
    if (zone.label != predicted) continue;
    any_zone = true;
    OverlapRow row;
    row.zone_id = zone.source_id;
    row.zone_label = zone.label;
    const BoundingBox zb = zone.bounds();
    for (const auto& poly : zone.polygons) {
      row.zone_area_m2 += polygon_area_m2(poly, anchor);
      if (cluster.lat_min <= zb.lat_max && zb.lat_min <= cluster.lat_max &&
          cluster.lon_min <= zb.lon_max && zb.lon_min <= cluster.lon_max) {
        row.intersection_area_m2 += clipped_area_m2(clip_rect_polygon(cluster, poly), anchor);
      }
    }
    row.intersection_area_m2 = std::min({row.intersection_area_m2, row.zone_area_m2, r.cluster_area_m2});
    const auto p = percentages(row.intersection_area_m2, r.cluster_area_m2, row.zone_area_m2);
    row.pct_of_cluster = p.of_cluster;
    row.pct_of_zone = p.of_zone;
    row.iou = p.iou;
    if (row.intersection_area_m2 > 0.0) {
      r.intersection_area_m2 += row.intersection_area_m2;
      r.touched_zone_area_m2 += row.zone_area_m2;
    }
    r.rows.push_back(std::move(row));
  }
  if (!any_zone) {
    throw Error(ErrorCode::NoZonesForLabel,
                fmt::format("no official zones labeled {} are loaded", to_string(predicted)));
  }
  r.intersection_area_m2 = std::min(r.intersection_area_m2, r.cluster_area_m2);
  const auto p = percentages(r.intersection_area_m2, r.cluster_area_m2, r.touched_zone_area_m2);
  r.pct_of_cluster = p.of_cluster;
  r.pct_of_zone = p.of_zone;
  r.iou = p.iou;
  r.headline_pct = headline_of(headline, r.pct_of_cluster, r.pct_of_zone, r.iou);
  return r;
}

std::string overlap_table_csv(const std::vector<ValidationRow>& rows) {
  std::string out = "dataset,cluster,predicted_land_use";
  for (auto label : kAllLabels) out += fmt::format(",{}", to_string(label));
  out += ",definition\n";
  for (const auto& row : rows) {
    out += fmt::format("{},{},{}", row.dataset, row.report.cluster_id,
                       to_string(row.report.predicted_label));
    for (auto label : kAllLabels) {
      out += ",";
      out += label == row.report.predicted_label ? fmt_pct(row.report.headline_pct) : "-";
    }
    out += fmt::format(",{}\n", to_string(row.report.headline_definition));
  }
  return out;
}

std::string overlap_details_csv(const std::vector<ValidationRow>& rows) {
  std::string out =
      "dataset,cluster,predicted_land_use,zone_id,zone_land_use,intersection_area_m2,"
      "zone_area_m2,cluster_area_m2,pct_of_cluster,pct_of_zone,iou\n";
  for (const auto& row : rows) {
    const auto& r = row.report;
    for (const auto& z : r.rows) {
      out += fmt::format("{},{},{},{},{},{:.3f},{:.3f},{:.3f},{:.3f},{:.3f},{:.3f}\n", row.dataset,
                         r.cluster_id, to_string(r.predicted_label), z.zone_id,
                         to_string(z.zone_label), z.intersection_area_m2, z.zone_area_m2,
                         r.cluster_area_m2, z.pct_of_cluster, z.pct_of_zone, z.iou);
    }
    out += fmt::format("{},{},{},*,{},{:.3f},{:.3f},{:.3f},{:.3f},{:.3f},{:.3f}\n", row.dataset,
                       r.cluster_id, to_string(r.predicted_label), to_string(r.predicted_label),
                       r.intersection_area_m2, r.touched_zone_area_m2, r.cluster_area_m2,
                       r.pct_of_cluster, r.pct_of_zone, r.iou);
  }
  return out;
}

std::string overlap_table_text(const std::vector<ValidationRow>& rows) {
  std::string out = fmt::format("{:<12} {:<10} {:<12}", "Dataset", "Cluster", "Predicted");
  for (auto label : kAllLabels) out += fmt::format(" {:>12}", to_string(label));
  out += "\n";
  std::string_view current;
  for (const auto& row : rows) {
    out += fmt::format("{:<12} {:<10} {:<12}", row.dataset == current ? "" : row.dataset,
                       row.report.cluster_id, to_string(row.report.predicted_label));
    current = row.dataset;
    for (auto label : kAllLabels) {
      out += fmt::format(" {:>12}", label == row.report.predicted_label
                                        ? fmt_pct(row.report.headline_pct) + "%"
                                        : std::string("-"));
    }
    out += "\n";
  }
  return out;
}

}  // namespace landsig
