#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "landsig/event_store.hpp"
#include "landsig/types.hpp"

namespace landsig {

inline constexpr double kDefaultCellSizeDeg = 0.005;

struct CellCoord {
  std::int64_t row = 0;
  std::int64_t col = 0;

  friend bool operator==(const CellCoord&, const CellCoord&) = default;
};

struct QueryResult {
  std::vector<std::uint32_t> refs;  // ascending indices into the store columns

  std::size_t count() const noexcept { return refs.size(); }
};

/// Uniform lat/lon grid over an immutable EventStore. Event e lives in cell
/// (floor(lat/cell), floor(lon/cell)); cells keep indices, never copies.
/// Queries are const and safe to run concurrently.
class SpatialIndex {
 public:
  static SpatialIndex build(std::shared_ptr<const EventStore> store,
                            double cell_size_deg = kDefaultCellSizeDeg);

  /// Reuses `<cache_dir>/index-<fingerprint>-<cell>.bin` when present and
  /// consistent, otherwise builds and writes it.
  static SpatialIndex load_or_build(std::shared_ptr<const EventStore> store, double cell_size_deg,
                                    const std::filesystem::path& cache_dir);

  const EventStore& store() const noexcept { return *store_; }
  double cell_size() const noexcept { return cell_size_; }
  /// Half-open box holding every indexed event.
  const BoundingBox& bounds() const noexcept { return bounds_; }
  std::size_t size() const noexcept { return refs_.size(); }
  std::size_t cell_count() const noexcept { return cell_keys_.size(); }

  CellCoord cell_of(double lat, double lon) const noexcept;
  /// Event indices stored under `cell` (empty when the cell has no events).
  std::span<const std::uint32_t> cell_events(CellCoord cell) const;

  /// Events with lat in [lat_min, lat_max) and lon in [lon_min, lon_max).
  QueryResult query_bbox(const BoundingBox& b) const;
  std::size_t count_bbox(const BoundingBox& b) const;
  HourlyCounts hourly_histogram(const BoundingBox& b, int tz_offset_minutes) const;

  void save_cache(const std::filesystem::path& path) const;
  static std::optional<SpatialIndex> load_cache(const std::filesystem::path& path,
                                                std::shared_ptr<const EventStore> store,
                                                double cell_size_deg);
  static std::filesystem::path cache_path(const std::filesystem::path& dir,
                                          const EventStore& store, double cell_size_deg);

 private:
  SpatialIndex() = default;

  template <typename Fn>
  void visit(const BoundingBox& b, Fn&& fn) const;

  std::shared_ptr<const EventStore> store_;
  double cell_size_ = kDefaultCellSizeDeg;
  BoundingBox bounds_;
  CellCoord min_cell_;
  CellCoord max_cell_;
  std::vector<std::uint64_t> cell_keys_;      // sorted, unique
  std::vector<std::uint32_t> cell_offsets_;   // cell_keys_.size() + 1 entries into refs_
  std::vector<std::uint32_t> refs_;           // grouped by cell, ascending within a cell
  std::unordered_map<std::uint64_t, std::uint32_t> cell_slot_;
};

}  // namespace landsig
