#include "landsig/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "json.hpp"

namespace landsig {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

std::optional<std::int64_t> parse_epoch_seconds(std::string_view s) {
  if (auto v = parse_number<std::int64_t>(s)) return v;
  if (auto d = parse_number<double>(s); d && std::isfinite(*d) && std::abs(*d) < 9.0e18) {
    return static_cast<std::int64_t>(std::floor(*d));
  }
  return std::nullopt;
}

RecordError malformed(std::string message) {
  return RecordError{ErrorCode::MalformedRecord, std::move(message)};
}

ParseResult finish(GeoEvent e) {
  try {
    validate_event(e);
  } catch (const Error& err) {
    return RecordError{err.code(), err.what()};
  }
  return e;
}

std::optional<std::int64_t> tweet_timestamp(const json& j) {
  if (auto it = j.find("timestamp_ms"); it != j.end()) {
    std::optional<std::int64_t> ms;
    if (it->is_string()) ms = parse_number<std::int64_t>(it->get_ref<const std::string&>());
    else if (it->is_number_integer()) ms = it->get<std::int64_t>();
    if (ms) {
      // floor division so pre-epoch values round toward -inf
      return *ms >= 0 ? *ms / 1000 : -((-*ms + 999) / 1000);
    }
  }
  if (auto it = j.find("created_at"); it != j.end() && it->is_string()) {
    return parse_tweet_time(it->get_ref<const std::string&>());
  }
  return std::nullopt;
}

std::optional<std::string> id_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return v.dump();
  return std::nullopt;
}

std::optional<std::string> tweet_user(const json& j) {
  if (auto u = j.find("user"); u != j.end() && u->is_object()) {
    if (auto it = u->find("id_str"); it != u->end()) {
      if (auto s = id_text(*it)) return s;
    }
    if (auto it = u->find("id"); it != u->end()) {
      if (auto s = id_text(*it)) return s;
    }
  }
  if (auto it = j.find("user_id"); it != j.end()) return id_text(*it);
  return std::nullopt;
}

ParseResult parse_tweet(std::string_view line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return malformed("not a JSON object");

  const auto coords = j.find("coordinates");
  if (coords == j.end() || coords->is_null()) return SkippedRecord{};
  if (!coords->is_object()) return malformed("coordinates is not a GeoJSON point");
  const auto pair = coords->find("coordinates");
  if (pair == coords->end() || !pair->is_array() || pair->size() < 2 ||
      !(*pair)[0].is_number() || !(*pair)[1].is_number()) {
    return malformed("coordinates lacks a numeric [lon, lat] pair");
  }

  const auto ts = tweet_timestamp(j);
  if (!ts) return malformed("no usable timestamp_ms or created_at");
  auto user = tweet_user(j);
  if (!user) return malformed("no user id");

  return finish(GeoEvent{(*pair)[1].get<double>(), (*pair)[0].get<double>(), *ts,
                         std::move(*user)});
}

ParseResult parse_csv_row(std::string_view line) {
  std::array<std::string_view, 4> fields;
  std::size_t n = 0;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (n == fields.size()) return malformed("expected 4 fields");
    fields[n++] = line.substr(start, comma == std::string_view::npos ? comma : comma - start);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (n != fields.size()) return malformed("expected 4 fields");
  for (auto& f : fields) f = trim(f);

  if (fields[0].empty() || fields[1].empty()) return SkippedRecord{};
  const auto lat = parse_number<double>(fields[0]);
  const auto lon = parse_number<double>(fields[1]);
  if (!lat || !lon) return malformed("unparseable coordinate");
  const auto ts = parse_epoch_seconds(fields[2]);
  if (!ts) return malformed("unparseable timestamp");
  return finish(GeoEvent{*lat, *lon, *ts, std::string(fields[3])});
}

struct Line {
  std::string_view text;
  std::size_t number;  // 1-based
};

}  // namespace

std::string_view to_string(SourceFormat f) {
  return f == SourceFormat::TweetJson ? "tweet-json-ndjson" : "csv";
}

std::optional<SourceFormat> parse_source_format(std::string_view name) {
  if (name == "tweet-json" || name == "tweet-json-ndjson" || name == "ndjson") {
    return SourceFormat::TweetJson;
  }
  if (name == "csv") return SourceFormat::Csv;
  return std::nullopt;
}

void validate_manifest(const DatasetManifest& m) {
  if (std::abs(m.tz_offset_minutes) > kMaxTzOffsetMinutes) {
    throw Error(ErrorCode::OutOfRange,
                fmt::format("tz offset {} min exceeds +/-{}", m.tz_offset_minutes,
                            kMaxTzOffsetMinutes));
  }
  if (m.record_count > 0 && m.time_min > m.time_max) {
    throw Error(ErrorCode::InvalidArgument, "manifest time span is inverted");
  }
}

std::filesystem::path manifest_path_for(const std::filesystem::path& store_path) {
  auto p = store_path;
  p += ".manifest";
  return p;
}

void write_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  std::string out = "# landsig dataset manifest v1\n";
  out += fmt::format("name = {}\n", m.name);
  out += fmt::format("source_format = {}\n", to_string(m.source_format));
  out += fmt::format("tz_offset_minutes = {}\n", m.tz_offset_minutes);
  out += fmt::format("record_count = {}\n", m.record_count);
  out += fmt::format("unique_users = {}\n", m.unique_users);
  out += fmt::format("time_min = {}\n", m.time_min);
  out += fmt::format("time_max = {}\n", m.time_max);
  out += fmt::format("skipped_records = {}\n", m.skipped_records);
  out += fmt::format("malformed_records = {}\n", m.malformed_records);
  write_file_atomically(path, out);
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  DatasetManifest m;
  std::string raw;
  const auto bad = [&](std::string_view what) {
    return Error(ErrorCode::IoError, fmt::format("{}: {}", path.string(), what));
  };
  const auto integer = [&](std::string_view key, std::string_view v) {
    auto n = parse_number<std::int64_t>(v);
    if (!n) throw bad(fmt::format("bad value for {}", key));
    return *n;
  };
  while (std::getline(in, raw)) {
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw bad(fmt::format("bad manifest line '{}'", line));
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "name") m.name = std::string(value);
    else if (key == "source_format") {
      auto f = parse_source_format(value);
      if (!f) throw bad(fmt::format("unknown source_format '{}'", value));
      m.source_format = *f;
    } else if (key == "tz_offset_minutes") m.tz_offset_minutes = static_cast<int>(integer(key, value));
    else if (key == "record_count") m.record_count = static_cast<std::uint64_t>(integer(key, value));
    else if (key == "unique_users") m.unique_users = static_cast<std::uint64_t>(integer(key, value));
    else if (key == "time_min") m.time_min = integer(key, value);
    else if (key == "time_max") m.time_max = integer(key, value);
    else if (key == "skipped_records") m.skipped_records = static_cast<std::uint64_t>(integer(key, value));
    else if (key == "malformed_records") m.malformed_records = static_cast<std::uint64_t>(integer(key, value));
  }
  validate_manifest(m);
  return m;
}

ParseResult parse_event_record(std::string_view line, SourceFormat format) {
  line = trim(line);
  if (line.empty()) return malformed("empty record");
  return format == SourceFormat::TweetJson ? parse_tweet(line) : parse_csv_row(line);
}

std::optional<std::int64_t> parse_tweet_time(std::string_view text) {
  static constexpr std::array<std::string_view, 12> kMonths = {
      "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  const std::string s(trim(text));
  char weekday[4] = {};
  char month[4] = {};
  char offset[6] = {};
  int day = 0, hh = 0, mm = 0, ss = 0, year = 0;
  if (std::sscanf(s.c_str(), "%3s %3s %d %d:%d:%d %5s %d", weekday, month, &day, &hh, &mm, &ss,
                  offset, &year) != 8) {
    return std::nullopt;
  }
  const auto it = std::find(kMonths.begin(), kMonths.end(), std::string_view(month));
  if (it == kMonths.end()) return std::nullopt;
  const std::string_view off(offset);
  if (off.size() != 5 || (off[0] != '+' && off[0] != '-')) return std::nullopt;
  const auto off_h = parse_number<int>(off.substr(1, 2));
  const auto off_m = parse_number<int>(off.substr(3, 2));
  if (!off_h || !off_m) return std::nullopt;
  if (hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss > 60) return std::nullopt;

  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year},
                           std::chrono::month{static_cast<unsigned>(it - kMonths.begin() + 1)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) return std::nullopt;
  const std::int64_t days = sys_days{ymd}.time_since_epoch().count();
  const int sign = off[0] == '-' ? -1 : 1;
  return days * 86400 + hh * 3600 + mm * 60 + ss - sign * (*off_h * 3600 + *off_m * 60);
}

int local_hour(std::int64_t timestamp_utc, int tz_offset_minutes) noexcept {
  constexpr std::int64_t kDay = 86400;
  const std::int64_t local = timestamp_utc + std::int64_t{tz_offset_minutes} * 60;
  const std::int64_t second_of_day = ((local % kDay) + kDay) % kDay;
  return static_cast<int>(second_of_day / 3600);
}

LoadedDataset load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
  if (std::abs(options.tz_offset_minutes) > kMaxTzOffsetMinutes) {
    throw Error(ErrorCode::OutOfRange,
                fmt::format("tz offset {} min exceeds +/-{}", options.tz_offset_minutes,
                            kMaxTzOffsetMinutes));
  }
  const std::string content = read_file(path);

  std::vector<Line> lines;
  {
    std::size_t pos = 0;
    std::size_t number = 0;
    bool header_pending = options.format == SourceFormat::Csv;
    while (pos < content.size()) {
      auto end = content.find('\n', pos);
      if (end == std::string::npos) end = content.size();
      const std::string_view text = trim(std::string_view(content).substr(pos, end - pos));
      ++number;
      pos = end + 1;
      if (text.empty()) continue;
      if (header_pending) {
        header_pending = false;
        if (text != kCsvHeader) {
          throw Error(ErrorCode::MalformedRecord,
                      fmt::format("{}: expected CSV header '{}'", path.string(), kCsvHeader));
        }
        continue;
      }
      lines.push_back(Line{text, number});
    }
  }

  // Parse in contiguous chunks; merging in chunk order keeps the store
  // identical to a sequential parse.
  std::vector<ParseResult> parsed(lines.size());
  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, 64);
  const std::size_t chunk = std::max<std::size_t>(4096, (lines.size() + threads - 1) / threads);
  {
    std::vector<std::jthread> workers;
    for (std::size_t begin = 0; begin < lines.size(); begin += chunk) {
      const std::size_t end = std::min(lines.size(), begin + chunk);
      workers.emplace_back([&, begin, end] {
        for (std::size_t i = begin; i < end; ++i) {
          parsed[i] = parse_event_record(lines[i].text, options.format);
        }
      });
    }
  }

  LoadedDataset out;
  out.stats.total_records = lines.size();
  out.store.reserve(lines.size());
  std::int64_t tmin = std::numeric_limits<std::int64_t>::max();
  std::int64_t tmax = std::numeric_limits<std::int64_t>::min();
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    if (auto* e = std::get_if<GeoEvent>(&parsed[i])) {
      tmin = std::min(tmin, e->timestamp_utc);
      tmax = std::max(tmax, e->timestamp_utc);
      out.store.push_back(*e);
      ++out.stats.accepted;
    } else if (std::holds_alternative<SkippedRecord>(parsed[i])) {
      ++out.stats.skipped;
    } else {
      ++out.stats.malformed;
      if (out.stats.sample_errors.size() < 10) {
        const auto& err = std::get<RecordError>(parsed[i]);
        out.stats.sample_errors.push_back(
            fmt::format("line {}: {}: {}", lines[i].number, to_string(err.code), err.message));
      }
    }
  }
  if (out.stats.accepted == 0) {
    throw Error(ErrorCode::EmptyDataset,
                fmt::format("{}: no geo-located records accepted ({} skipped, {} malformed)",
                            path.string(), out.stats.skipped, out.stats.malformed));
  }

  auto& m = out.manifest;
  m.name = options.name.value_or(path.stem().string());
  m.tz_offset_minutes = options.tz_offset_minutes;
  m.record_count = out.stats.accepted;
  m.unique_users = out.store.unique_users();
  m.time_min = tmin;
  m.time_max = tmax;
  m.source_format = options.format;
  m.skipped_records = out.stats.skipped;
  m.malformed_records = out.stats.malformed;
  return out;
}

void save_dataset(const EventStore& store, const DatasetManifest& manifest,
                  const std::filesystem::path& store_path) {
  validate_manifest(manifest);
  store.save(store_path);
  write_manifest(manifest, manifest_path_for(store_path));
}

StoredDataset open_dataset(const std::filesystem::path& store_path) {
  StoredDataset ds{EventStore::load(store_path), read_manifest(manifest_path_for(store_path))};
  if (ds.manifest.record_count != ds.store.size()) {
    throw Error(ErrorCode::IoError,
                fmt::format("{}: manifest lists {} records but store holds {}",
                            store_path.string(), ds.manifest.record_count, ds.store.size()));
  }
  return ds;
}

}  // namespace landsig
