#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "landsig/types.hpp"

namespace landsig {

/// Columnar, append-only container of GeoEvents. User ids are dictionary
/// encoded in first-seen order, so two stores built from the same input
/// sequence are byte-identical on disk.
class EventStore {
 public:
  void reserve(std::size_t n);
  void push_back(const GeoEvent& e);

  std::size_t size() const noexcept { return lat_.size(); }
  bool empty() const noexcept { return lat_.empty(); }

  std::span<const double> lats() const noexcept { return lat_; }
  std::span<const double> lons() const noexcept { return lon_; }
  std::span<const std::int64_t> timestamps() const noexcept { return ts_; }
  std::span<const std::uint32_t> user_indices() const noexcept { return user_idx_; }
  std::span<const std::string> user_dictionary() const noexcept { return users_; }

  std::size_t unique_users() const noexcept { return users_.size(); }
  GeoEvent event(std::size_t i) const;

  /// FNV-1a over all columns; identifies the store contents for caches.
  std::uint64_t fingerprint() const noexcept;

  void save(const std::filesystem::path& path) const;
  static EventStore load(const std::filesystem::path& path);

  friend bool operator==(const EventStore& a, const EventStore& b) {
    return a.lat_ == b.lat_ && a.lon_ == b.lon_ && a.ts_ == b.ts_ &&
           a.user_idx_ == b.user_idx_ && a.users_ == b.users_;
  }

 private:
  std::vector<double> lat_;
  std::vector<double> lon_;
  std::vector<std::int64_t> ts_;
  std::vector<std::uint32_t> user_idx_;
  std::vector<std::string> users_;
  std::unordered_map<std::string, std::uint32_t> user_lookup_;
};

/// Writes `bytes` to `path` through a sibling temporary file and a rename so
/// readers never observe a half-written artifact.
void write_file_atomically(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace landsig
