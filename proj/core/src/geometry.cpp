#include "landsig/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include <fmt/format.h>

namespace landsig {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Vertex count without the closing duplicate.
std::size_t open_size(const Ring& r) noexcept {
  return r.size() > 1 && r.front() == r.back() ? r.size() - 1 : r.size();
}

// Cross product of (b - a) x (c - a) in the (lon, lat) plane.
double orient(const LatLon& a, const LatLon& b, const LatLon& c) noexcept {
  return (b.lon - a.lon) * (c.lat - a.lat) - (b.lat - a.lat) * (c.lon - a.lon);
}

int sign(double v) noexcept { return (v > 0) - (v < 0); }

bool on_segment(const LatLon& a, const LatLon& b, const LatLon& p) noexcept {
  return orient(a, b, p) == 0.0 && p.lon >= std::min(a.lon, b.lon) &&
         p.lon <= std::max(a.lon, b.lon) && p.lat >= std::min(a.lat, b.lat) &&
         p.lat <= std::max(a.lat, b.lat);
}

bool segments_touch(const LatLon& a, const LatLon& b, const LatLon& c, const LatLon& d) noexcept {
  const int o1 = sign(orient(a, b, c));
  const int o2 = sign(orient(a, b, d));
  const int o3 = sign(orient(c, d, a));
  const int o4 = sign(orient(c, d, b));
  if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
  return (o1 == 0 && on_segment(a, b, c)) || (o2 == 0 && on_segment(a, b, d)) ||
         (o3 == 0 && on_segment(c, d, a)) || (o4 == 0 && on_segment(c, d, b));
}

bool segments_cross_properly(const LatLon& a, const LatLon& b, const LatLon& c,
                             const LatLon& d) noexcept {
  const int o1 = sign(orient(a, b, c));
  const int o2 = sign(orient(a, b, d));
  const int o3 = sign(orient(c, d, a));
  const int o4 = sign(orient(c, d, b));
  return o1 * o2 < 0 && o3 * o4 < 0;
}

enum class Axis { Lat, Lon };

// Keeps the part of `in` where coord(axis) >= bound (keep_above) or <= bound.
std::vector<LatLon> clip_half_plane(const std::vector<LatLon>& in, Axis axis, double bound,
                                    bool keep_above) {
  std::vector<LatLon> out;
  if (in.empty()) return out;
  const auto coord = [axis](const LatLon& p) { return axis == Axis::Lat ? p.lat : p.lon; };
  const auto inside = [&](const LatLon& p) {
    return keep_above ? coord(p) >= bound : coord(p) <= bound;
  };
  const auto crossing = [&](const LatLon& a, const LatLon& b) {
    const double t = (bound - coord(a)) / (coord(b) - coord(a));
    if (axis == Axis::Lat) return LatLon{bound, a.lon + t * (b.lon - a.lon)};
    return LatLon{a.lat + t * (b.lat - a.lat), bound};
  };
  out.reserve(in.size() + 4);
  for (std::size_t i = 0; i < in.size(); ++i) {
    const LatLon& cur = in[i];
    const LatLon& prev = in[(i + in.size() - 1) % in.size()];
    const bool cur_in = inside(cur);
    const bool prev_in = inside(prev);
    if (cur_in) {
      if (!prev_in) out.push_back(crossing(prev, cur));
      out.push_back(cur);
    } else if (prev_in) {
      out.push_back(crossing(prev, cur));
    }
  }
  return out;
}

std::optional<Ring> clip_ring(const BoundingBox& rect, const Ring& ring) {
  std::vector<LatLon> pts(ring.begin(), ring.begin() + static_cast<std::ptrdiff_t>(open_size(ring)));
  pts = clip_half_plane(pts, Axis::Lon, rect.lon_min, true);
  pts = clip_half_plane(pts, Axis::Lon, rect.lon_max, false);
  pts = clip_half_plane(pts, Axis::Lat, rect.lat_min, true);
  pts = clip_half_plane(pts, Axis::Lat, rect.lat_max, false);
  if (pts.size() < 3 || signed_area_deg2(pts) == 0.0) return std::nullopt;
  pts.push_back(pts.front());
  return pts;
}

}  // namespace

Ring canonicalize_ring(Ring ring) {
  Ring out;
  out.reserve(ring.size() + 1);
  for (const auto& v : ring) {
    if (!std::isfinite(v.lat) || !std::isfinite(v.lon)) {
      throw Error(ErrorCode::DegenerateRing, "ring has a non-finite vertex");
    }
    if (out.empty() || !(out.back() == v)) out.push_back(v);
  }
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  std::vector<LatLon> distinct = out;
  std::sort(distinct.begin(), distinct.end(), [](const LatLon& a, const LatLon& b) {
    return a.lat < b.lat || (a.lat == b.lat && a.lon < b.lon);
  });
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) {
    throw Error(ErrorCode::DegenerateRing,
                fmt::format("ring has {} distinct vertices, need 3", distinct.size()));
  }
  out.push_back(out.front());
  return out;
}

double signed_area_deg2(const Ring& ring) noexcept {
  const std::size_t n = open_size(ring);
  if (n < 3) return 0.0;
  const LatLon o = ring[0];
  double twice = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double x0 = ring[i].lon - o.lon, y0 = ring[i].lat - o.lat;
    const double x1 = ring[i + 1].lon - o.lon, y1 = ring[i + 1].lat - o.lat;
    twice += x0 * y1 - x1 * y0;
  }
  return twice / 2.0;
}

double centroid_lat(const Ring& ring) {
  const std::size_t n = open_size(ring);
  const double area = signed_area_deg2(ring);
  if (n < 3 || area == 0.0) throw Error(ErrorCode::DegenerateRing, "ring has zero area");
  // Shift to the first vertex to keep the products small.
  const LatLon o = ring[0];
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = ring[i].lon - o.lon, y0 = ring[i].lat - o.lat;
    const double x1 = ring[(i + 1) % n].lon - o.lon, y1 = ring[(i + 1) % n].lat - o.lat;
    acc += (y0 + y1) * (x0 * y1 - x1 * y0);
  }
  return o.lat + acc / (6.0 * area);
}

double ring_area_m2(const Ring& ring, double anchor_lat_deg) noexcept {
  const double scale = kEarthRadiusM * kDegToRad;
  return std::abs(signed_area_deg2(ring)) * scale * scale * std::cos(anchor_lat_deg * kDegToRad);
}

double ring_area_m2(const Ring& ring) {
  const Ring canonical = canonicalize_ring(ring);
  return ring_area_m2(canonical, centroid_lat(canonical));
}

double polygon_area_m2(const Polygon& poly, double anchor_lat_deg) noexcept {
  double area = ring_area_m2(poly.outer, anchor_lat_deg);
  for (const auto& hole : poly.holes) area -= ring_area_m2(hole, anchor_lat_deg);
  return std::max(0.0, area);
}

bool is_simple(const Ring& ring) {
  const std::size_t n = open_size(ring);
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = ring[i];
    const auto& b = ring[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& c = ring[j];
      const auto& d = ring[(j + 1) % n];
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        // Shared vertex is fine; a fold back along the same line is not.
        const LatLon& shared = j == i + 1 ? b : a;
        const LatLon& p = j == i + 1 ? a : b;
        const LatLon& q = j == i + 1 ? d : c;
        if (orient(shared, p, q) == 0.0 &&
            ((p.lon - shared.lon) * (q.lon - shared.lon) + (p.lat - shared.lat) * (q.lat - shared.lat)) > 0.0) {
          return false;
        }
        continue;
      }
      if (segments_touch(a, b, c, d)) return false;
    }
  }
  return true;
}

Ring rect_ring(const BoundingBox& b) {
  return Ring{{b.lat_min, b.lon_min}, {b.lat_min, b.lon_max}, {b.lat_max, b.lon_max},
              {b.lat_max, b.lon_min}, {b.lat_min, b.lon_min}};
}

PointLocation locate_in_ring(const Ring& ring, double lat, double lon) noexcept {
  const std::size_t n = open_size(ring);
  const LatLon p{lat, lon};
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = ring[i];
    const auto& b = ring[j];
    if (on_segment(a, b, p)) return PointLocation::Boundary;
    if ((a.lat > lat) != (b.lat > lat)) {
      const double x = a.lon + (lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
      if (lon < x) inside = !inside;
    }
  }
  return inside ? PointLocation::Inside : PointLocation::Outside;
}

PointLocation locate_in_polygon(const Polygon& poly, double lat, double lon) noexcept {
  const auto outer = locate_in_ring(poly.outer, lat, lon);
  if (outer != PointLocation::Inside) return outer;
  for (const auto& hole : poly.holes) {
    const auto h = locate_in_ring(hole, lat, lon);
    if (h == PointLocation::Inside) return PointLocation::Outside;
    if (h == PointLocation::Boundary) return PointLocation::Boundary;
  }
  return PointLocation::Inside;
}

LatLon interior_point(const Polygon& poly) {
  std::vector<double> lats;
  const auto collect = [&](const Ring& r) {
    for (const auto& v : r) lats.push_back(v.lat);
  };
  collect(poly.outer);
  for (const auto& h : poly.holes) collect(h);
  std::sort(lats.begin(), lats.end());
  lats.erase(std::unique(lats.begin(), lats.end()), lats.end());
  if (lats.size() < 2) throw Error(ErrorCode::DegenerateRing, "polygon has no extent");

  // Try scan lines between consecutive vertex latitudes, widest gap first.
  std::vector<std::size_t> order(lats.size() - 1);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lats[a + 1] - lats[a] > lats[b + 1] - lats[b];
  });
  for (std::size_t k : order) {
    const double y = 0.5 * (lats[k] + lats[k + 1]);
    std::vector<double> xs;
    const auto cross = [&](const Ring& r) {
      const std::size_t n = open_size(r);
      for (std::size_t i = 0; i < n; ++i) {
        const auto& a = r[i];
        const auto& b = r[(i + 1) % n];
        if ((a.lat > y) != (b.lat > y)) xs.push_back(a.lon + (y - a.lat) * (b.lon - a.lon) / (b.lat - a.lat));
      }
    };
    cross(poly.outer);
    for (const auto& h : poly.holes) cross(h);
    std::sort(xs.begin(), xs.end());
    double best_width = 0.0;
    std::optional<LatLon> best;
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      if (xs[i + 1] - xs[i] > best_width) {
        best_width = xs[i + 1] - xs[i];
        best = LatLon{y, 0.5 * (xs[i] + xs[i + 1])};
      }
    }
    if (best && locate_in_polygon(poly, best->lat, best->lon) == PointLocation::Inside) return *best;
  }
  throw Error(ErrorCode::DegenerateRing, "could not find an interior point");
}

std::vector<ClippedRing> clip_rect_polygon(const BoundingBox& rect, const Polygon& poly) {
  validate_bbox(rect);
  std::vector<ClippedRing> out;
  auto outer = clip_ring(rect, poly.outer);
  if (!outer) return out;
  out.push_back(ClippedRing{std::move(*outer), false});
  for (const auto& hole : poly.holes) {
    if (auto piece = clip_ring(rect, hole)) out.push_back(ClippedRing{std::move(*piece), true});
  }
  return out;
}

double clipped_area_m2(const std::vector<ClippedRing>& pieces, double anchor_lat_deg) noexcept {
  double area = 0.0;
  for (const auto& p : pieces) {
    const double a = ring_area_m2(p.ring, anchor_lat_deg);
    area += p.hole ? -a : a;
  }
  return std::max(0.0, area);
}

bool polygons_overlap(const Polygon& a, const Polygon& b) {
  std::vector<const Ring*> rings_a{&a.outer};
  std::vector<const Ring*> rings_b{&b.outer};
  for (const auto& h : a.holes) rings_a.push_back(&h);
  for (const auto& h : b.holes) rings_b.push_back(&h);

  for (const Ring* ra : rings_a) {
    const std::size_t na = open_size(*ra);
    for (const Ring* rb : rings_b) {
      const std::size_t nb = open_size(*rb);
      for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
          if (segments_cross_properly((*ra)[i], (*ra)[(i + 1) % na], (*rb)[j], (*rb)[(j + 1) % nb])) {
            return true;
          }
        }
      }
    }
  }

  // No proper crossings: the boundaries only touch, so overlap shows up as a
  // vertex, an edge midpoint or an interior sample of one polygon lying
  // strictly inside the other.
  const auto probes_inside = [](const Polygon& p, const Polygon& q) {
    const std::size_t n = open_size(p.outer);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& v = p.outer[i];
      const auto& w = p.outer[(i + 1) % n];
      if (locate_in_polygon(q, v.lat, v.lon) == PointLocation::Inside) return true;
      if (locate_in_polygon(q, 0.5 * (v.lat + w.lat), 0.5 * (v.lon + w.lon)) == PointLocation::Inside) {
        return true;
      }
    }
    const LatLon c = interior_point(p);
    return locate_in_polygon(q, c.lat, c.lon) == PointLocation::Inside;
  };
  return probes_inside(a, b) || probes_inside(b, a);
}

}  // namespace landsig
