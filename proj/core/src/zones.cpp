#include "landsig/zones.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "json.hpp"
#include "landsig/event_store.hpp"
#include "landsig/geometry.hpp"

namespace landsig {

using nlohmann::json;

namespace {

Ring ring_from_positions(const json& positions) {
  if (!positions.is_array()) throw Error(ErrorCode::InvalidZone, "ring is not an array");
  Ring ring;
  ring.reserve(positions.size());
  for (const auto& p : positions) {
    if (!p.is_array() || p.size() < 2 || !p[0].is_number() || !p[1].is_number()) {
      throw Error(ErrorCode::InvalidZone, "ring position is not [lon, lat]");
    }
    ring.push_back(LatLon{p[1].get<double>(), p[0].get<double>()});
  }
  return ring;
}

Polygon polygon_from_rings(const json& rings) {
  if (!rings.is_array() || rings.empty()) throw Error(ErrorCode::InvalidZone, "polygon has no rings");
  Polygon poly;
  poly.outer = ring_from_positions(rings[0]);
  for (std::size_t i = 1; i < rings.size(); ++i) poly.holes.push_back(ring_from_positions(rings[i]));
  return poly;
}

json positions_of(const Ring& ring) {
  json out = json::array();
  for (const auto& v : ring) out.push_back(json::array({v.lon, v.lat}));
  return out;
}

std::string feature_id(const json& feature, std::size_t index) {
  if (auto it = feature.find("id"); it != feature.end()) {
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number()) return it->dump();
  }
  if (auto props = feature.find("properties"); props != feature.end() && props->is_object()) {
    if (auto it = props->find("id"); it != props->end()) {
      if (it->is_string()) return it->get<std::string>();
      if (it->is_number()) return it->dump();
    }
  }
  return fmt::format("feature-{}", index);
}

}  // namespace

std::optional<LandUseLabel> LabelMap::lookup(std::string_view code) const {
  if (entries.empty()) return parse_label(code);
  const auto it = entries.find(std::string(code));
  if (it == entries.end()) return std::nullopt;
  return it->second;
}

LabelMap parse_label_map(std::string_view json_text) {
  const json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::IoError, "label map must be a JSON object of code -> label");
  }
  LabelMap map;
  for (const auto& [code, value] : j.items()) {
    if (!value.is_string()) throw Error(ErrorCode::IoError, fmt::format("label for '{}' is not a string", code));
    const auto label = parse_label(value.get<std::string>());
    if (!label) {
      throw Error(ErrorCode::IoError,
                  fmt::format("label map: '{}' is not a land-use label", value.get<std::string>()));
    }
    map.entries.emplace(code, *label);
  }
  return map;
}

LabelMap load_label_map(const std::filesystem::path& path) { return parse_label_map(read_file(path)); }

void validate_zone(Zone& zone) {
  if (zone.polygons.empty()) {
    throw Error(ErrorCode::InvalidZone, fmt::format("zone {} has no polygons", zone.source_id));
  }
  const auto check = [&](Ring& ring, std::string_view what) {
    try {
      ring = canonicalize_ring(std::move(ring));
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidZone, fmt::format("zone {}: {}: {}", zone.source_id, what, e.what()));
    }
    for (const auto& v : ring) {
      if (v.lat < -90.0 || v.lat > 90.0 || v.lon < -180.0 || v.lon > 180.0) {
        throw Error(ErrorCode::InvalidZone,
                    fmt::format("zone {}: {} vertex outside WGS84", zone.source_id, what));
      }
    }
    if (!is_simple(ring)) {
      throw Error(ErrorCode::InvalidZone,
                  fmt::format("zone {}: {} is self-intersecting", zone.source_id, what));
    }
    if (signed_area_deg2(ring) == 0.0) {
      throw Error(ErrorCode::InvalidZone, fmt::format("zone {}: {} has zero area", zone.source_id, what));
    }
  };
  for (auto& poly : zone.polygons) {
    check(poly.outer, "outer ring");
    for (auto& hole : poly.holes) check(hole, "hole");
  }
}

void check_zone_overlaps(const std::vector<Zone>& zones) {
  struct Item {
    const Zone* zone;
    const Polygon* poly;
    BoundingBox bounds;
  };
  std::vector<Item> items;
  for (const auto& z : zones) {
    for (const auto& p : z.polygons) {
      Zone single{z.label, {p}, z.source_id};
      items.push_back(Item{&z, &p, single.bounds()});
    }
  }
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return a.bounds.lon_min < b.bounds.lon_min; });
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = i + 1; j < items.size() && items[j].bounds.lon_min < items[i].bounds.lon_max; ++j) {
      const auto& a = items[i].bounds;
      const auto& b = items[j].bounds;
      if (a.lat_min >= b.lat_max || b.lat_min >= a.lat_max) continue;
      if (polygons_overlap(*items[i].poly, *items[j].poly)) {
        throw Error(ErrorCode::InvalidZone, fmt::format("zones {} and {} overlap",
                                                        items[i].zone->source_id,
                                                        items[j].zone->source_id));
      }
    }
  }
}

ZoneSet parse_zones_geojson(std::string_view text, const LabelMap& labels, std::string_view property) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("type", "") != "FeatureCollection" ||
      !j.contains("features") || !j["features"].is_array()) {
    throw Error(ErrorCode::IoError, "zone file is not a GeoJSON FeatureCollection");
  }
  ZoneSet out;
  const auto& features = j["features"];
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& f = features[i];
    const auto props = f.find("properties");
    const auto geom = f.find("geometry");
    if (props == f.end() || !props->is_object() || geom == f.end() || !geom->is_object()) {
      ++out.ignored_features;
      continue;
    }
    const auto code = props->find(std::string(property));
    if (code == props->end() || !code->is_string()) {
      ++out.ignored_features;
      continue;
    }
    const auto label = labels.lookup(code->get<std::string>());
    const std::string type = geom->value("type", "");
    if (!label || (type != "Polygon" && type != "MultiPolygon")) {
      ++out.ignored_features;
      continue;
    }
    Zone zone{*label, {}, feature_id(f, i)};
    const auto coords = geom->find("coordinates");
    if (coords == geom->end() || !coords->is_array()) {
      throw Error(ErrorCode::InvalidZone, fmt::format("zone {} has no coordinates", zone.source_id));
    }
    if (type == "Polygon") {
      zone.polygons.push_back(polygon_from_rings(*coords));
    } else {
      for (const auto& rings : *coords) zone.polygons.push_back(polygon_from_rings(rings));
    }
    validate_zone(zone);
    out.zones.push_back(std::move(zone));
  }
  check_zone_overlaps(out.zones);
  return out;
}

ZoneSet load_zones(const std::filesystem::path& path, const LabelMap& labels, std::string_view property) {
  return parse_zones_geojson(read_file(path), labels, property);
}

std::string zones_to_geojson(const std::vector<Zone>& zones) {
  json features = json::array();
  for (const auto& z : zones) {
    json polys = json::array();
    for (const auto& p : z.polygons) {
      json rings = json::array({positions_of(p.outer)});
      for (const auto& h : p.holes) rings.push_back(positions_of(h));
      polys.push_back(std::move(rings));
    }
    json geometry = z.polygons.size() == 1
                        ? json{{"type", "Polygon"}, {"coordinates", polys[0]}}
                        : json{{"type", "MultiPolygon"}, {"coordinates", polys}};
    features.push_back(json{{"type", "Feature"},
                            {"id", z.source_id},
                            {"properties", {{"landuse", std::string(to_string(z.label))}}},
                            {"geometry", std::move(geometry)}});
  }
  return json{{"type", "FeatureCollection"}, {"features", std::move(features)}}.dump(2) + "\n";
}

std::vector<TemplateZone> template_zones_from(const std::vector<Zone>& zones) {
  std::vector<TemplateZone> out;
  for (const auto& z : zones) {
    auto it = std::find_if(out.begin(), out.end(), [&](const TemplateZone& t) { return t.label == z.label; });
    if (it == out.end()) {
      out.push_back(TemplateZone{z.label, {}});
      it = std::prev(out.end());
    }
    for (const auto& p : z.polygons) it->boxes.push_back(Zone{z.label, {p}, z.source_id}.bounds());
  }
  return out;
}

}  // namespace landsig
