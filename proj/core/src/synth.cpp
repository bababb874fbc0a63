#include "landsig/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "landsig/geometry.hpp"
#include "landsig/ingest.hpp"

namespace landsig {

namespace {

HourlyWeights normalized(const HourlyWeights& raw) {
  const double sum = std::accumulate(raw.begin(), raw.end(), 0.0);
  HourlyWeights w{};
  for (std::size_t h = 0; h < kHoursPerDay; ++h) w[h] = raw[h] / sum;
  return w;
}

Polygon square(double centre_lat, double centre_lon, double size) {
  const double h = size / 2.0;
  return Polygon{rect_ring(BoundingBox{centre_lat - h, centre_lat + h, centre_lon - h, centre_lon + h}), {}};
}

std::string_view slug(LandUseLabel label) {
  switch (label) {
    case LandUseLabel::Business: return "business";
    case LandUseLabel::Residential: return "residential";
    case LandUseLabel::Education: return "education";
    case LandUseLabel::Recreation: return "recreation";
  }
  return "zone";
}

}  // namespace

void validate_profile(const ZoneProfile& p) {
  if (!(p.daily_rate > 0.0) || !std::isfinite(p.daily_rate)) {
    throw Error(ErrorCode::InvalidProfile,
                fmt::format("profile {}: daily rate {} must be > 0", p.zone_id, p.daily_rate));
  }
  double sum = 0.0;
  for (double w : p.hourly_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::InvalidProfile, fmt::format("profile {}: negative hourly weight", p.zone_id));
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidProfile,
                fmt::format("profile {}: hourly weights sum to {}, not 1", p.zone_id, sum));
  }
  try {
    const Ring outer = canonicalize_ring(p.polygon.outer);
    if (signed_area_deg2(outer) == 0.0 || !is_simple(outer)) {
      throw Error(ErrorCode::DegenerateRing, "polygon is degenerate or self-intersecting");
    }
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidProfile, fmt::format("profile {}: {}", p.zone_id, e.what()));
  }
}

HourlyWeights default_hourly_weights(LandUseLabel label) {
  // Relative activity per local hour 0..23.
  static constexpr HourlyWeights kBusiness = {
      0.6, 0.4, 0.3, 0.25, 0.25, 0.4, 0.8, 1.4, 2.0, 2.3, 2.4, 2.8,
      3.4, 3.8, 3.0, 2.8,  3.1,  3.5, 2.6, 2.0, 1.6, 1.3, 1.0, 0.8};
  static constexpr HourlyWeights kResidential = {
      2.2, 1.5, 0.9, 0.6, 0.5, 0.6, 0.9, 1.2, 1.2, 1.1, 1.1, 1.2,
      1.3, 1.4, 1.6, 1.8, 2.0, 2.3, 2.6, 2.9, 3.2, 3.5, 3.8, 3.0};
  static constexpr HourlyWeights kEducation = {
      0.3, 0.2, 0.15, 0.12, 0.12, 0.2, 0.6, 1.6, 3.0, 3.8, 4.6, 3.9,
      4.2, 3.5, 3.0,  2.6,  2.1,  1.6, 1.2, 0.9, 0.7, 0.6, 0.5, 0.4};
  static constexpr HourlyWeights kRecreation = {
      0.8, 0.5, 0.3, 0.2, 0.2, 0.25, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4,
      1.6, 1.7, 1.8, 2.0, 2.4, 3.0,  4.0, 5.5, 3.0, 2.0, 1.5, 1.1};
  switch (label) {
    case LandUseLabel::Business: return normalized(kBusiness);
    case LandUseLabel::Residential: return normalized(kResidential);
    case LandUseLabel::Education: return normalized(kEducation);
    case LandUseLabel::Recreation: return normalized(kRecreation);
  }
  return normalized(kBusiness);
}

HourlyWeights daytime_only_weights() {
  HourlyWeights raw{};
  for (std::size_t h = 8; h <= 17; ++h) raw[h] = 1.0;
  return normalized(raw);
}

std::vector<ZoneProfile> default_profiles(const CityLayout& layout) {
  const double d = layout.zone_spacing_deg / 2.0;
  const std::array<std::pair<double, double>, 4> offsets = {{{d, -d}, {d, d}, {-d, -d}, {-d, d}}};
  std::vector<ZoneProfile> out;
  for (std::size_t i = 0; i < kAllLabels.size(); ++i) {
    const auto label = kAllLabels[i];
    out.push_back(ZoneProfile{fmt::format("synthetic-{}", slug(label)), label,
                              square(layout.origin_lat + offsets[i].first,
                                     layout.origin_lon + offsets[i].second, layout.zone_size_deg),
                              layout.daily_rate, default_hourly_weights(label)});
  }
  return out;
}

SyntheticCity generate_city(const std::vector<ZoneProfile>& profiles, const CityOptions& options) {
  if (options.days < 1) {
    throw Error(ErrorCode::InvalidProfile, fmt::format("days must be >= 1, got {}", options.days));
  }
  if (options.users_per_zone == 0) throw Error(ErrorCode::InvalidProfile, "users_per_zone must be >= 1");
  if (profiles.empty()) throw Error(ErrorCode::InvalidProfile, "no zone profiles");
  for (const auto& p : profiles) validate_profile(p);

  struct Tagged {
    GeoEvent event;
    std::size_t zone;
  };
  std::vector<Tagged> tagged;
  SyntheticCity city;
  city.ground_truth.resize(profiles.size());

  for (std::size_t z = 0; z < profiles.size(); ++z) {
    const auto& p = profiles[z];
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                      static_cast<std::uint32_t>(options.seed >> 32), static_cast<std::uint32_t>(z)};
    std::mt19937_64 rng(seq);
    std::poisson_distribution<long> daily(p.daily_rate);
    std::discrete_distribution<int> hour(p.hourly_weights.begin(), p.hourly_weights.end());
    std::uniform_int_distribution<std::int64_t> second(0, 3599);
    std::uniform_int_distribution<std::uint32_t> user(0, options.users_per_zone - 1);

    const BoundingBox box = Zone{p.label, {p.polygon}, p.zone_id}.bounds();
    std::uniform_real_distribution<double> lat(box.lat_min, box.lat_max);
    std::uniform_real_distribution<double> lon(box.lon_min, box.lon_max);

    for (int day = 0; day < options.days; ++day) {
      const long n = daily(rng);
      for (long i = 0; i < n; ++i) {
        const int h = hour(rng);
        const std::int64_t ts = options.start_utc + std::int64_t{day} * 86400 + h * 3600 +
                                second(rng) - std::int64_t{options.tz_offset_minutes} * 60;
        LatLon pos{};
        for (int attempt = 0;; ++attempt) {
          if (attempt == 1'000'000) {
            throw Error(ErrorCode::InvalidProfile,
                        fmt::format("profile {}: polygon covers too little of its bounds", p.zone_id));
          }
          pos = LatLon{lat(rng), lon(rng)};
          if (locate_in_polygon(p.polygon, pos.lat, pos.lon) == PointLocation::Inside) break;
        }
        ++city.ground_truth[z][static_cast<std::size_t>(h)];
        tagged.push_back(Tagged{GeoEvent{pos.lat, pos.lon, ts, fmt::format("z{}-u{}", z, user(rng))}, z});
      }
    }
  }

  std::stable_sort(tagged.begin(), tagged.end(), [](const Tagged& a, const Tagged& b) {
    return a.event.timestamp_utc < b.event.timestamp_utc;
  });
  city.events.reserve(tagged.size());
  for (auto& t : tagged) city.events.push_back(std::move(t.event));
  return city;
}

std::vector<Zone> zones_of(const std::vector<ZoneProfile>& profiles) {
  std::vector<Zone> zones;
  for (const auto& p : profiles) zones.push_back(Zone{p.label, {p.polygon}, p.zone_id});
  return zones;
}

std::string events_csv(const std::vector<GeoEvent>& events) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& e : events) out += fmt::format("{},{},{},{}\n", e.lat, e.lon, e.timestamp_utc, e.user_id);
  return out;
}

std::string ground_truth_csv(const std::vector<ZoneProfile>& profiles, const SyntheticCity& city) {
  std::string out = "zone_id,label,hour,count\n";
  for (std::size_t z = 0; z < profiles.size(); ++z) {
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      out += fmt::format("{},{},{},{}\n", profiles[z].zone_id, to_string(profiles[z].label), h,
                         city.ground_truth[z][h]);
    }
  }
  return out;
}

BoundingBox centre_seed(const ZoneProfile& p, double size_deg) {
  const BoundingBox b = Zone{p.label, {p.polygon}, p.zone_id}.bounds();
  const double lat = 0.5 * (b.lat_min + b.lat_max);
  const double lon = 0.5 * (b.lon_min + b.lon_max);
  return BoundingBox{lat - size_deg / 2, lat + size_deg / 2, lon - size_deg / 2, lon + size_deg / 2};
}

}  // namespace landsig
