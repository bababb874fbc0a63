#include "landsig/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include <fmt/format.h>

#include "landsig/ingest.hpp"

namespace landsig {

namespace {

constexpr char kCacheMagic[8] = {'L', 'S', 'I', 'D', 'X', 'C', 'A', '1'};

std::uint64_t pack(CellCoord c) noexcept {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(static_cast<std::int32_t>(c.row)))
          << 32) |
         static_cast<std::uint32_t>(static_cast<std::int32_t>(c.col));
}

template <typename T>
void put(std::string& out, const T& v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void put_vec(std::string& out, const std::vector<T>& v) {
  put(out, static_cast<std::uint64_t>(v.size()));
  if (!v.empty()) out.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(T));
}

template <typename T>
bool get(std::string_view& in, T& v) {
  if (in.size() < sizeof(T)) return false;
  std::memcpy(&v, in.data(), sizeof(T));
  in.remove_prefix(sizeof(T));
  return true;
}

template <typename T>
bool get_vec(std::string_view& in, std::vector<T>& v) {
  std::uint64_t n = 0;
  if (!get(in, n) || n > in.size() / sizeof(T)) return false;
  v.resize(n);
  if (n) std::memcpy(v.data(), in.data(), n * sizeof(T));
  in.remove_prefix(n * sizeof(T));
  return true;
}

}  // namespace

SpatialIndex SpatialIndex::build(std::shared_ptr<const EventStore> store, double cell_size_deg) {
  if (!store) throw Error(ErrorCode::InvalidArgument, "null event store");
  if (!std::isfinite(cell_size_deg) || cell_size_deg < 1e-7 || cell_size_deg > 90.0) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("cell size {} deg outside (1e-7, 90]", cell_size_deg));
  }
  if (store->empty()) throw Error(ErrorCode::EmptyDataset, "cannot index an empty event store");
  if (store->size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::InvalidArgument, "event store exceeds 2^32 events");
  }

  SpatialIndex idx;
  idx.store_ = std::move(store);
  idx.cell_size_ = cell_size_deg;

  const auto lats = idx.store_->lats();
  const auto lons = idx.store_->lons();
  const std::size_t n = lats.size();

  std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(n);
  double lat_lo = lats[0], lat_hi = lats[0], lon_lo = lons[0], lon_hi = lons[0];
  for (std::size_t i = 0; i < n; ++i) {
    keyed[i] = {pack(idx.cell_of(lats[i], lons[i])), static_cast<std::uint32_t>(i)};
    lat_lo = std::min(lat_lo, lats[i]);
    lat_hi = std::max(lat_hi, lats[i]);
    lon_lo = std::min(lon_lo, lons[i]);
    lon_hi = std::max(lon_hi, lons[i]);
  }
  std::sort(keyed.begin(), keyed.end());

  idx.bounds_ = BoundingBox{lat_lo, std::nextafter(lat_hi, 1e9), lon_lo, std::nextafter(lon_hi, 1e9)};
  idx.min_cell_ = idx.cell_of(lat_lo, lon_lo);
  idx.max_cell_ = idx.cell_of(lat_hi, lon_hi);

  idx.refs_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || keyed[i].first != keyed[i - 1].first) {
      idx.cell_slot_.emplace(keyed[i].first, static_cast<std::uint32_t>(idx.cell_keys_.size()));
      idx.cell_keys_.push_back(keyed[i].first);
      idx.cell_offsets_.push_back(static_cast<std::uint32_t>(i));
    }
    idx.refs_.push_back(keyed[i].second);
  }
  idx.cell_offsets_.push_back(static_cast<std::uint32_t>(n));
  return idx;
}

SpatialIndex SpatialIndex::load_or_build(std::shared_ptr<const EventStore> store,
                                         double cell_size_deg,
                                         const std::filesystem::path& cache_dir) {
  const auto path = cache_path(cache_dir, *store, cell_size_deg);
  if (auto cached = load_cache(path, store, cell_size_deg)) return std::move(*cached);
  auto idx = build(std::move(store), cell_size_deg);
  std::error_code ec;
  std::filesystem::create_directories(cache_dir, ec);
  idx.save_cache(path);
  return idx;
}

CellCoord SpatialIndex::cell_of(double lat, double lon) const noexcept {
  return CellCoord{static_cast<std::int64_t>(std::floor(lat / cell_size_)),
                   static_cast<std::int64_t>(std::floor(lon / cell_size_))};
}

std::span<const std::uint32_t> SpatialIndex::cell_events(CellCoord cell) const {
  const auto it = cell_slot_.find(pack(cell));
  if (it == cell_slot_.end()) return {};
  return std::span<const std::uint32_t>(refs_).subspan(
      cell_offsets_[it->second], cell_offsets_[it->second + 1] - cell_offsets_[it->second]);
}

// Division by a positive cell size and floor are both monotone, so any event
// inside b falls in rows [r0, r1] x cols [c0, c1], and every event of a cell
// strictly between those limits is inside b without a per-point test.
template <typename Fn>
void SpatialIndex::visit(const BoundingBox& b, Fn&& fn) const {
  validate_bbox(b);
  if (!b.intersects(bounds_)) return;

  const CellCoord lo = cell_of(b.lat_min, b.lon_min);
  const CellCoord hi = cell_of(b.lat_max, b.lon_max);
  const auto lats = store_->lats();
  const auto lons = store_->lons();

  const auto scan_cell = [&](std::int64_t row, std::int64_t col, std::uint32_t slot) {
    const bool interior = row > lo.row && row < hi.row && col > lo.col && col < hi.col;
    for (std::uint32_t k = cell_offsets_[slot]; k < cell_offsets_[slot + 1]; ++k) {
      const std::uint32_t e = refs_[k];
      if (interior || b.contains(lats[e], lons[e])) fn(e);
    }
  };

  const std::int64_t r0 = std::max(lo.row, min_cell_.row);
  const std::int64_t r1 = std::min(hi.row, max_cell_.row);
  const std::int64_t c0 = std::max(lo.col, min_cell_.col);
  const std::int64_t c1 = std::min(hi.col, max_cell_.col);
  if (r0 > r1 || c0 > c1) return;

  const double candidate_cells = static_cast<double>(r1 - r0 + 1) * static_cast<double>(c1 - c0 + 1);
  if (candidate_cells > static_cast<double>(cell_keys_.size())) {
    for (std::uint32_t slot = 0; slot < cell_keys_.size(); ++slot) {
      const auto key = cell_keys_[slot];
      const std::int64_t row = static_cast<std::int32_t>(static_cast<std::uint32_t>(key >> 32));
      const std::int64_t col = static_cast<std::int32_t>(static_cast<std::uint32_t>(key));
      if (row >= r0 && row <= r1 && col >= c0 && col <= c1) scan_cell(row, col, slot);
    }
    return;
  }
  for (std::int64_t row = r0; row <= r1; ++row) {
    for (std::int64_t col = c0; col <= c1; ++col) {
      const auto it = cell_slot_.find(pack(CellCoord{row, col}));
      if (it != cell_slot_.end()) scan_cell(row, col, it->second);
    }
  }
}

QueryResult SpatialIndex::query_bbox(const BoundingBox& b) const {
  QueryResult out;
  visit(b, [&](std::uint32_t e) { out.refs.push_back(e); });
  std::sort(out.refs.begin(), out.refs.end());
  return out;
}

std::size_t SpatialIndex::count_bbox(const BoundingBox& b) const {
  std::size_t n = 0;
  visit(b, [&](std::uint32_t) { ++n; });
  return n;
}

HourlyCounts SpatialIndex::hourly_histogram(const BoundingBox& b, int tz_offset_minutes) const {
  HourlyCounts counts;
  const auto ts = store_->timestamps();
  visit(b, [&](std::uint32_t e) { ++counts[static_cast<std::size_t>(local_hour(ts[e], tz_offset_minutes))]; });
  return counts;
}

std::filesystem::path SpatialIndex::cache_path(const std::filesystem::path& dir,
                                               const EventStore& store, double cell_size_deg) {
  return dir / fmt::format("index-{:016x}-{}.bin", store.fingerprint(), cell_size_deg);
}

void SpatialIndex::save_cache(const std::filesystem::path& path) const {
  std::string out(kCacheMagic, sizeof(kCacheMagic));
  put(out, store_->fingerprint());
  put(out, cell_size_);
  put(out, bounds_);
  put(out, min_cell_);
  put(out, max_cell_);
  put_vec(out, cell_keys_);
  put_vec(out, cell_offsets_);
  put_vec(out, refs_);
  write_file_atomically(path, out);
}

std::optional<SpatialIndex> SpatialIndex::load_cache(const std::filesystem::path& path,
                                                     std::shared_ptr<const EventStore> store,
                                                     double cell_size_deg) {
  std::error_code ec;
  if (!store || !std::filesystem::exists(path, ec)) return std::nullopt;
  const std::string bytes = read_file(path);
  std::string_view in(bytes);
  if (in.size() < sizeof(kCacheMagic) || std::memcmp(in.data(), kCacheMagic, sizeof(kCacheMagic)) != 0) {
    return std::nullopt;
  }
  in.remove_prefix(sizeof(kCacheMagic));

  SpatialIndex idx;
  std::uint64_t fingerprint = 0;
  if (!get(in, fingerprint) || fingerprint != store->fingerprint()) return std::nullopt;
  if (!get(in, idx.cell_size_) || idx.cell_size_ != cell_size_deg) return std::nullopt;
  if (!get(in, idx.bounds_) || !get(in, idx.min_cell_) || !get(in, idx.max_cell_) ||
      !get_vec(in, idx.cell_keys_) || !get_vec(in, idx.cell_offsets_) || !get_vec(in, idx.refs_) ||
      !in.empty()) {
    return std::nullopt;
  }
  if (idx.refs_.size() != store->size() || idx.cell_offsets_.size() != idx.cell_keys_.size() + 1 ||
      idx.cell_offsets_.back() != idx.refs_.size()) {
    return std::nullopt;
  }
  for (auto r : idx.refs_) {
    if (r >= store->size()) return std::nullopt;
  }
  for (std::uint32_t slot = 0; slot < idx.cell_keys_.size(); ++slot) {
    idx.cell_slot_.emplace(idx.cell_keys_[slot], slot);
  }
  idx.store_ = std::move(store);
  return idx;
}

}  // namespace landsig
