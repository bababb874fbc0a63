#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "landsig/event_store.hpp"
#include "landsig/types.hpp"

namespace landsig {

enum class SourceFormat { TweetJson, Csv };

std::string_view to_string(SourceFormat f);
/// Accepts "tweet-json", "tweet-json-ndjson", "ndjson" and "csv".
std::optional<SourceFormat> parse_source_format(std::string_view name);

inline constexpr int kMaxTzOffsetMinutes = 14 * 60;
inline constexpr std::string_view kCsvHeader = "lat,lon,ts,user";

struct DatasetManifest {
  std::string name;
  int tz_offset_minutes = 0;
  std::uint64_t record_count = 0;
  std::uint64_t unique_users = 0;
  std::int64_t time_min = 0;
  std::int64_t time_max = 0;
  SourceFormat source_format = SourceFormat::Csv;
  std::uint64_t skipped_records = 0;
  std::uint64_t malformed_records = 0;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

void validate_manifest(const DatasetManifest& m);

/// Sidecar manifest lives next to the store as `<store>.manifest`.
std::filesystem::path manifest_path_for(const std::filesystem::path& store_path);
void write_manifest(const DatasetManifest& m, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

struct SkippedRecord {};

struct RecordError {
  ErrorCode code = ErrorCode::MalformedRecord;
  std::string message;
};

using ParseResult = std::variant<GeoEvent, SkippedRecord, RecordError>;

/// Parses one NDJSON tweet object or one CSV data row (not the header).
/// Tweet objects carry their point as [lon, lat]; the result is swapped into
/// lat/lon. Records without a point geotag are skipped.
ParseResult parse_event_record(std::string_view line, SourceFormat format);

/// Parses the `created_at` layout of archived tweets, e.g.
/// "Mon Jun 01 03:30:00 +0000 2015". Returns epoch seconds.
std::optional<std::int64_t> parse_tweet_time(std::string_view text);

/// Local wall-clock hour under a fixed UTC offset (local = UTC + offset).
int local_hour(std::int64_t timestamp_utc, int tz_offset_minutes) noexcept;

struct LoadOptions {
  SourceFormat format = SourceFormat::Csv;
  int tz_offset_minutes = 0;
  std::optional<std::string> name;  // defaults to the input file stem
  unsigned threads = 0;             // 0 = hardware concurrency
};

struct LoadStats {
  std::uint64_t total_records = 0;  // non-blank lines, excluding a CSV header
  std::uint64_t accepted = 0;
  std::uint64_t skipped = 0;
  std::uint64_t malformed = 0;
  std::vector<std::string> sample_errors;  // first few, with line numbers
};

struct LoadedDataset {
  EventStore store;
  DatasetManifest manifest;
  LoadStats stats;
};

LoadedDataset load_dataset(const std::filesystem::path& path, const LoadOptions& options);

/// Persists the store and its sidecar manifest.
void save_dataset(const EventStore& store, const DatasetManifest& manifest,
                  const std::filesystem::path& store_path);

struct StoredDataset {
  EventStore store;
  DatasetManifest manifest;
};

StoredDataset open_dataset(const std::filesystem::path& store_path);

}  // namespace landsig
