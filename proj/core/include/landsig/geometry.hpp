#pragma once

#include <vector>

#include "landsig/types.hpp"

namespace landsig {

inline constexpr double kEarthRadiusM = 6371008.8;

/// Drops consecutive duplicate vertices and closes the ring. Throws
/// DegenerateRing when fewer than three distinct vertices remain.
Ring canonicalize_ring(Ring ring);

/// Shoelace area in the (lon, lat) degree plane; positive for
/// counter-clockwise rings. Works on open or closed rings.
double signed_area_deg2(const Ring& ring) noexcept;

/// Area-weighted centroid latitude of a ring with non-zero area.
double centroid_lat(const Ring& ring);

/// Area in square metres after a local equirectangular projection anchored
/// at the ring's centroid latitude. Throws DegenerateRing for rings with
/// fewer than three distinct vertices or zero area.
double ring_area_m2(const Ring& ring);
/// Same projection anchored at `anchor_lat_deg`; zero-area rings give 0.
double ring_area_m2(const Ring& ring, double anchor_lat_deg) noexcept;

double polygon_area_m2(const Polygon& poly, double anchor_lat_deg) noexcept;

/// True when no two non-adjacent edges touch and adjacent edges do not fold
/// back over each other.
bool is_simple(const Ring& ring);

Ring rect_ring(const BoundingBox& b);

enum class PointLocation { Outside, Boundary, Inside };

PointLocation locate_in_ring(const Ring& ring, double lat, double lon) noexcept;
/// Inside = inside the outer ring and outside (or on) every hole boundary.
PointLocation locate_in_polygon(const Polygon& poly, double lat, double lon) noexcept;

/// A point strictly inside the polygon, found on a horizontal scan line that
/// avoids every vertex latitude.
LatLon interior_point(const Polygon& poly);

struct ClippedRing {
  Ring ring;  // closed
  bool hole = false;
};

/// Sutherland-Hodgman clip of the outer ring and each hole against the
/// rectangle. Pieces with zero area are dropped; an empty result means no
/// intersection.
std::vector<ClippedRing> clip_rect_polygon(const BoundingBox& rect, const Polygon& poly);

/// Outer pieces minus hole pieces.
double clipped_area_m2(const std::vector<ClippedRing>& pieces, double anchor_lat_deg) noexcept;

/// True when the interiors of the two polygons intersect. Shared edges and
/// touching vertices do not count as overlap.
bool polygons_overlap(const Polygon& a, const Polygon& b);

}  // namespace landsig
