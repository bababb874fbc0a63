#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "landsig/types.hpp"

namespace landsig::testing {

/// Even-odd crossing test written independently of the library.
inline bool inside_ring(const Ring& ring, double lat, double lon) {
  bool in = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const auto& a = ring[i];
    const auto& b = ring[j];
    if ((a.lat > lat) != (b.lat > lat)) {
      const double x = a.lon + (lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
      if (lon < x) in = !in;
    }
  }
  return in;
}

inline bool inside_polygon(const Polygon& p, double lat, double lon) {
  if (!inside_ring(p.outer, lat, lon)) return false;
  for (const auto& h : p.holes) {
    if (inside_ring(h, lat, lon)) return false;
  }
  return true;
}

/// Two 32-bit uniforms per 64-bit draw keep a million samples cheap.
class FastUniform {
 public:
  explicit FastUniform(std::uint64_t seed) : rng_(seed) {}
  std::pair<double, double> next() {
    const std::uint64_t r = rng_();
    constexpr double k = 1.0 / 4294967296.0;
    return {(static_cast<double>(r >> 32) + 0.5) * k, (static_cast<double>(r & 0xffffffffu) + 0.5) * k};
  }

 private:
  std::mt19937_64 rng_;
};

/// Fraction of `rect` covered by `poly`, by uniform point sampling.
inline double monte_carlo_fraction(const BoundingBox& rect, const Polygon& poly, std::size_t samples,
                                   std::uint64_t seed) {
  FastUniform u(seed);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const auto [a, b] = u.next();
    if (inside_polygon(poly, rect.lat_min + a * rect.lat_span(), rect.lon_min + b * rect.lon_span())) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

/// Exact equirectangular rectangle area at `anchor_lat`.
inline double rect_area_m2(const BoundingBox& b, double anchor_lat) {
  constexpr double kR = 6371008.8;
  constexpr double k = kR * std::numbers::pi / 180.0;
  return b.lat_span() * b.lon_span() * k * k * std::cos(anchor_lat * std::numbers::pi / 180.0);
}

/// Random polygon around (lat, lon): convex when `star` is false, otherwise
/// star-shaped with radii in [0.3, 1] of `radius`.
inline Polygon random_polygon(std::mt19937_64& rng, double lat, double lon, double radius, bool star) {
  std::uniform_int_distribution<int> count(3, star ? 14 : 9);
  std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
  std::uniform_real_distribution<double> rfrac(0.3, 1.0);
  // Every angular gap below pi keeps the centre strictly inside, so the
  // ring is simple and star-shaped around it.
  std::vector<double> angles;
  const auto max_gap = [&] {
    double gap = angles.front() + 2 * std::numbers::pi - angles.back();
    for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
    return gap;
  };
  do {
    angles.assign(static_cast<std::size_t>(count(rng)), 0.0);
    for (auto& a : angles) a = angle(rng);
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end()), angles.end());
  } while (angles.size() < 3 || max_gap() >= std::numbers::pi);
  Polygon p;
  for (double a : angles) {
    const double r = star ? radius * rfrac(rng) : radius;
    p.outer.push_back({lat + r * std::sin(a), lon + r * std::cos(a)});
  }
  p.outer.push_back(p.outer.front());
  return p;
}

}  // namespace landsig::testing
