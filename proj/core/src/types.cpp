#include "landsig/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace landsig {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateBox: return "DegenerateBox";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptySignature: return "EmptySignature";
    case ErrorCode::IncompleteZone: return "IncompleteZone";
    case ErrorCode::SessionClosed: return "SessionClosed";
    case ErrorCode::IncompleteCluster: return "IncompleteCluster";
    case ErrorCode::DegenerateRing: return "DegenerateRing";
    case ErrorCode::InvalidZone: return "InvalidZone";
    case ErrorCode::NoZonesForLabel: return "NoZonesForLabel";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotFound: return "NotFound";
  }
  return "Unknown";
}

void validate_event(const GeoEvent& e) {
  if (!std::isfinite(e.lat) || e.lat < -90.0 || e.lat > 90.0 || !std::isfinite(e.lon) ||
      e.lon < -180.0 || e.lon > 180.0) {
    throw Error(ErrorCode::OutOfRange,
                fmt::format("coordinate ({}, {}) outside WGS84 bounds", e.lat, e.lon));
  }
  if (e.timestamp_utc < 0) {
    throw Error(ErrorCode::OutOfRange, fmt::format("negative timestamp {}", e.timestamp_utc));
  }
}

void validate_bbox(const BoundingBox& b) {
  const auto lat_ok = [](double v) { return std::isfinite(v) && v >= -90.0 && v <= 90.0; };
  const auto lon_ok = [](double v) { return std::isfinite(v) && v >= -180.0 && v <= 180.0; };
  if (!lat_ok(b.lat_min) || !lat_ok(b.lat_max) || !lon_ok(b.lon_min) || !lon_ok(b.lon_max)) {
    throw Error(ErrorCode::OutOfRange,
                fmt::format("bbox [{}, {}) x [{}, {}) outside WGS84 bounds", b.lat_min,
                            b.lat_max, b.lon_min, b.lon_max));
  }
  if (b.lat_min >= b.lat_max || b.lon_min >= b.lon_max) {
    throw Error(ErrorCode::DegenerateBox,
                fmt::format("bbox [{}, {}) x [{}, {}) has no extent", b.lat_min, b.lat_max,
                            b.lon_min, b.lon_max));
  }
}

std::uint64_t HourlyCounts::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

HourlyCounts& HourlyCounts::operator+=(const HourlyCounts& other) noexcept {
  for (std::size_t h = 0; h < kHoursPerDay; ++h) counts[h] += other.counts[h];
  return *this;
}

double TemporalSignature::mean() const noexcept {
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(kHoursPerDay);
}

std::string_view to_string(LandUseLabel label) {
  switch (label) {
    case LandUseLabel::Business: return "Business";
    case LandUseLabel::Residential: return "Residential";
    case LandUseLabel::Education: return "Education";
    case LandUseLabel::Recreation: return "Recreation";
  }
  return "Unknown";
}

std::optional<LandUseLabel> parse_label(std::string_view name) {
  const auto iequals = [](std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
             return std::tolower(static_cast<unsigned char>(x)) ==
                    std::tolower(static_cast<unsigned char>(y));
           });
  };
  for (auto label : kAllLabels) {
    if (iequals(name, to_string(label))) return label;
  }
  return std::nullopt;
}

BoundingBox Zone::bounds() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  BoundingBox b{inf, -inf, inf, -inf};
  for (const auto& poly : polygons) {
    for (const auto& v : poly.outer) {
      b.lat_min = std::min(b.lat_min, v.lat);
      b.lat_max = std::max(b.lat_max, v.lat);
      b.lon_min = std::min(b.lon_min, v.lon);
      b.lon_max = std::max(b.lon_max, v.lon);
    }
  }
  return b;
}

}  // namespace landsig
