#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "landsig/error.hpp"

namespace landsig {

inline constexpr std::size_t kHoursPerDay = 24;

/// One geo-tagged record. Only position, time and author are kept.
struct GeoEvent {
  double lat = 0.0;
  double lon = 0.0;
  std::int64_t timestamp_utc = 0;
  std::string user_id;

  friend bool operator==(const GeoEvent&, const GeoEvent&) = default;
};

/// Throws OutOfRange unless lat/lon/timestamp satisfy the GeoEvent bounds.
void validate_event(const GeoEvent& e);

/// Axis-aligned lat/lon rectangle, half-open on both axes: [min, max).
struct BoundingBox {
  double lat_min = 0.0;
  double lat_max = 0.0;
  double lon_min = 0.0;
  double lon_max = 0.0;

  bool contains(double lat, double lon) const noexcept {
    return lat >= lat_min && lat < lat_max && lon >= lon_min && lon < lon_max;
  }
  bool contains(const BoundingBox& other) const noexcept {
    return other.lat_min >= lat_min && other.lat_max <= lat_max &&
           other.lon_min >= lon_min && other.lon_max <= lon_max;
  }
  bool intersects(const BoundingBox& other) const noexcept {
    return lat_min < other.lat_max && other.lat_min < lat_max &&
           lon_min < other.lon_max && other.lon_min < lon_max;
  }
  double lat_span() const noexcept { return lat_max - lat_min; }
  double lon_span() const noexcept { return lon_max - lon_min; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Throws OutOfRange (coordinates outside WGS84 or non-finite) or
/// DegenerateBox (min >= max on either axis, which includes boxes that would
/// cross the antimeridian).
void validate_bbox(const BoundingBox& b);

/// Raw per-local-hour event tallies.
struct HourlyCounts {
  std::array<std::uint64_t, kHoursPerDay> counts{};

  std::uint64_t total() const noexcept;
  std::uint64_t& operator[](std::size_t h) { return counts[h]; }
  std::uint64_t operator[](std::size_t h) const { return counts[h]; }
  HourlyCounts& operator+=(const HourlyCounts& other) noexcept;

  friend bool operator==(const HourlyCounts&, const HourlyCounts&) = default;
};

/// 24 non-negative reals, one per local hour.
struct TemporalSignature {
  std::array<double, kHoursPerDay> values{};

  double operator[](std::size_t h) const { return values[h]; }
  double mean() const noexcept;

  friend bool operator==(const TemporalSignature&, const TemporalSignature&) = default;
};

enum class LandUseLabel : std::uint8_t { Business, Residential, Education, Recreation };

inline constexpr std::array<LandUseLabel, 4> kAllLabels = {
    LandUseLabel::Business, LandUseLabel::Residential, LandUseLabel::Education,
    LandUseLabel::Recreation};

std::string_view to_string(LandUseLabel label);
/// Case-insensitive; nullopt for unknown names.
std::optional<LandUseLabel> parse_label(std::string_view name);

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const LatLon&, const LatLon&) = default;
};

/// Closed ring: first vertex repeated as last after canonicalization.
using Ring = std::vector<LatLon>;

struct Polygon {
  Ring outer;
  std::vector<Ring> holes;
};

struct Zone {
  LandUseLabel label = LandUseLabel::Business;
  std::vector<Polygon> polygons;
  std::string source_id;

  BoundingBox bounds() const;
};

}  // namespace landsig
