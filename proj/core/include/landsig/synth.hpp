#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "landsig/types.hpp"

namespace landsig {

using HourlyWeights = std::array<double, kHoursPerDay>;

/// One synthetic zone: events arrive Poisson(daily_rate) per day, with local
/// hours drawn from hourly_weights and positions uniform inside `polygon`.
struct ZoneProfile {
  std::string zone_id;
  LandUseLabel label = LandUseLabel::Business;
  Polygon polygon;
  double daily_rate = 200.0;
  HourlyWeights hourly_weights{};
};

void validate_profile(const ZoneProfile& p);

/// Reference activity shapes: business peaks at 13h and 17h, residential
/// rises through the afternoon to 22h, education peaks at 10h and 12h then
/// declines, recreation peaks at 19h and drops sharply. Every hour keeps at
/// least 0.2% of the daily volume.
HourlyWeights default_hourly_weights(LandUseLabel label);

/// Activity only between 08:00 and 17:59 local; every other hour is zero.
HourlyWeights daytime_only_weights();

struct CityLayout {
  double origin_lat = -27.4698;  // Brisbane CBD
  double origin_lon = 153.0251;
  double zone_size_deg = 0.01;
  double zone_spacing_deg = 0.03;  // centre-to-centre
  double daily_rate = 200.0;
};

/// Four square zones on a 2x2 grid around the origin, one per label, in
/// Business, Residential, Education, Recreation order.
std::vector<ZoneProfile> default_profiles(const CityLayout& layout = {});

struct CityOptions {
  int days = 30;
  std::uint64_t seed = 7;
  std::int64_t start_utc = 1433116800;  // 2015-06-01; day 0 starts at local midnight of this date
  int tz_offset_minutes = 600;
  std::uint32_t users_per_zone = 400;
};

struct SyntheticCity {
  std::vector<GeoEvent> events;             // ordered by timestamp, then zone
  std::vector<HourlyCounts> ground_truth;   // per profile, by local hour
};

/// Deterministic for fixed (profiles, options); zones draw from independent
/// streams derived from the seed.
SyntheticCity generate_city(const std::vector<ZoneProfile>& profiles, const CityOptions& options);

std::vector<Zone> zones_of(const std::vector<ZoneProfile>& profiles);

/// `lat,lon,ts,user` CSV with round-trip exact coordinates.
std::string events_csv(const std::vector<GeoEvent>& events);
/// zone_id,label,hour,count rows.
std::string ground_truth_csv(const std::vector<ZoneProfile>& profiles, const SyntheticCity& city);

/// Small box at the centre of a profile's polygon bounds; a starting point
/// for cluster growth.
BoundingBox centre_seed(const ZoneProfile& p, double size_deg = 0.002);

}  // namespace landsig
