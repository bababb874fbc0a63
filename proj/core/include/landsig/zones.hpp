#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "landsig/classify.hpp"
#include "landsig/types.hpp"

namespace landsig {

/// Maps council land-use codes (the feature's `landuse` property) onto the
/// four labels. Codes are matched exactly; with an empty map the property
/// itself must name a label (case-insensitive).
struct LabelMap {
  std::map<std::string, LandUseLabel> entries;

  std::optional<LandUseLabel> lookup(std::string_view code) const;
};

/// JSON object of code -> label name, e.g. {"Commercial 1 Zone": "Business"}.
LabelMap parse_label_map(std::string_view json_text);
LabelMap load_label_map(const std::filesystem::path& path);

struct ZoneSet {
  std::vector<Zone> zones;
  std::size_t ignored_features = 0;  // unmapped land use or non-areal geometry
};

/// Reads a GeoJSON FeatureCollection of Polygon/MultiPolygon features
/// (positions in [lon, lat] order). Rings are canonicalized and validated;
/// self-intersecting rings and zones that overlap each other are rejected
/// with InvalidZone.
ZoneSet parse_zones_geojson(std::string_view text, const LabelMap& labels,
                            std::string_view property = "landuse");
ZoneSet load_zones(const std::filesystem::path& path, const LabelMap& labels,
                   std::string_view property = "landuse");

/// Canonicalizes rings in place and checks ring validity.
void validate_zone(Zone& zone);
/// Throws InvalidZone naming the first pair of zones whose interiors overlap.
void check_zone_overlaps(const std::vector<Zone>& zones);

std::string zones_to_geojson(const std::vector<Zone>& zones);

/// Bounding box of every polygon, grouped per label in first-seen order; the
/// input shape expected by build_template.
std::vector<TemplateZone> template_zones_from(const std::vector<Zone>& zones);

}  // namespace landsig
