#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <unistd.h>

#include "landsig/event_store.hpp"
#include "landsig/types.hpp"

namespace landsig::testing {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            fmt::format("landsig-test-{}-{}", ::getpid(), counter.fetch_add(1));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::shared_ptr<const EventStore> make_store(const std::vector<GeoEvent>& events) {
  auto store = std::make_shared<EventStore>();
  for (const auto& e : events) store->push_back(e);
  return store;
}

/// Events scattered uniformly inside `area`, some snapped to a 0.001 lattice
/// so cell and box edges are hit exactly.
inline std::vector<GeoEvent> random_events(std::mt19937_64& rng, std::size_t n, const BoundingBox& area,
                                           std::int64_t t0 = 1433116800, std::int64_t span_s = 30 * 86400) {
  std::uniform_real_distribution<double> lat(area.lat_min, area.lat_max);
  std::uniform_real_distribution<double> lon(area.lon_min, area.lon_max);
  std::uniform_int_distribution<std::int64_t> ts(t0, t0 + span_s - 1);
  std::uniform_int_distribution<int> user(0, 499);
  std::bernoulli_distribution snap(0.2);
  std::vector<GeoEvent> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    GeoEvent e{lat(rng), lon(rng), ts(rng), fmt::format("u{}", user(rng))};
    if (snap(rng)) {
      e.lat = std::round(e.lat * 1000.0) / 1000.0;
      e.lon = std::round(e.lon * 1000.0) / 1000.0;
      if (!area.contains(e.lat, e.lon)) continue;
    }
    out.push_back(std::move(e));
  }
  return out;
}

/// Random valid box whose corners may fall outside `area`.
inline BoundingBox random_box(std::mt19937_64& rng, const BoundingBox& area, double max_span) {
  std::uniform_real_distribution<double> lat(area.lat_min - max_span, area.lat_max);
  std::uniform_real_distribution<double> lon(area.lon_min - max_span, area.lon_max);
  std::uniform_real_distribution<double> span(1e-4, max_span);
  std::bernoulli_distribution snap(0.25);
  BoundingBox b;
  b.lat_min = lat(rng);
  b.lon_min = lon(rng);
  if (snap(rng)) {
    b.lat_min = std::round(b.lat_min * 1000.0) / 1000.0;
    b.lon_min = std::round(b.lon_min * 1000.0) / 1000.0;
  }
  b.lat_max = b.lat_min + span(rng);
  b.lon_max = b.lon_min + span(rng);
  return b;
}

inline HourlyCounts counts_of(std::initializer_list<std::uint64_t> values) {
  HourlyCounts c;
  std::size_t h = 0;
  for (auto v : values) c[h++] = v;
  return c;
}

inline HourlyCounts uniform_counts(std::uint64_t v) {
  HourlyCounts c;
  c.counts.fill(v);
  return c;
}

}  // namespace landsig::testing
