#include "landsig/event_store.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <fmt/format.h>

namespace landsig {

static_assert(std::endian::native == std::endian::little,
              "event store files are little-endian; big-endian hosts need byte swapping");

namespace {

constexpr char kMagic[8] = {'L', 'S', 'E', 'V', 'S', 'T', 'O', 'R'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void append_pod(std::string& out, const T& value) {
  const auto* p = reinterpret_cast<const char*>(&value);
  out.append(p, sizeof(T));
}

template <typename T>
void append_column(std::string& out, const std::vector<T>& column) {
  if (!column.empty()) {
    out.append(reinterpret_cast<const char*>(column.data()), column.size() * sizeof(T));
  }
}

class Reader {
 public:
  Reader(std::string_view bytes, const std::filesystem::path& path) : bytes_(bytes), path_(path) {}

  template <typename T>
  T pod() {
    T value;
    take(&value, sizeof(T));
    return value;
  }

  template <typename T>
  std::vector<T> column(std::size_t n) {
    if (n > (bytes_.size() - pos_) / sizeof(T)) truncated();
    std::vector<T> out(n);
    take(out.data(), n * sizeof(T));
    return out;
  }

  std::string string(std::size_t n) {
    if (n > bytes_.size() - pos_) truncated();
    std::string out(bytes_.substr(pos_, n));
    pos_ += n;
    return out;
  }

  bool at_end() const noexcept { return pos_ == bytes_.size(); }

 private:
  void take(void* dst, std::size_t n) {
    if (n > bytes_.size() - pos_) truncated();
    if (n > 0) std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }
  [[noreturn]] void truncated() const {
    throw Error(ErrorCode::IoError, fmt::format("event store {} is truncated", path_.string()));
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
  const std::filesystem::path& path_;
};

}  // namespace

void EventStore::reserve(std::size_t n) {
  lat_.reserve(n);
  lon_.reserve(n);
  ts_.reserve(n);
  user_idx_.reserve(n);
}

void EventStore::push_back(const GeoEvent& e) {
  auto [it, inserted] =
      user_lookup_.try_emplace(e.user_id, static_cast<std::uint32_t>(users_.size()));
  if (inserted) users_.push_back(e.user_id);
  lat_.push_back(e.lat);
  lon_.push_back(e.lon);
  ts_.push_back(e.timestamp_utc);
  user_idx_.push_back(it->second);
}

GeoEvent EventStore::event(std::size_t i) const {
  return GeoEvent{lat_.at(i), lon_.at(i), ts_.at(i), users_.at(user_idx_.at(i))};
}

std::uint64_t EventStore::fingerprint() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint64_t n = size();
  mix(&n, sizeof(n));
  mix(lat_.data(), lat_.size() * sizeof(double));
  mix(lon_.data(), lon_.size() * sizeof(double));
  mix(ts_.data(), ts_.size() * sizeof(std::int64_t));
  mix(user_idx_.data(), user_idx_.size() * sizeof(std::uint32_t));
  for (const auto& u : users_) {
    mix(u.data(), u.size());
    mix("\0", 1);
  }
  return h;
}

void EventStore::save(const std::filesystem::path& path) const {
  std::string out;
  out.reserve(32 + size() * 28);
  out.append(kMagic, sizeof(kMagic));
  append_pod(out, kVersion);
  append_pod(out, std::uint32_t{0});
  append_pod(out, static_cast<std::uint64_t>(size()));
  append_column(out, lat_);
  append_column(out, lon_);
  append_column(out, ts_);
  append_column(out, user_idx_);
  append_pod(out, static_cast<std::uint64_t>(users_.size()));
  for (const auto& u : users_) {
    append_pod(out, static_cast<std::uint32_t>(u.size()));
    out.append(u);
  }
  write_file_atomically(path, out);
}

EventStore EventStore::load(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  Reader in(bytes, path);
  char magic[sizeof(kMagic)];
  for (char& c : magic) c = in.pod<char>();
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::IoError, fmt::format("{} is not an event store", path.string()));
  }
  if (const auto version = in.pod<std::uint32_t>(); version != kVersion) {
    throw Error(ErrorCode::IoError,
                fmt::format("{}: unsupported event store version {}", path.string(), version));
  }
  in.pod<std::uint32_t>();
  const auto n = static_cast<std::size_t>(in.pod<std::uint64_t>());

  EventStore store;
  store.lat_ = in.column<double>(n);
  store.lon_ = in.column<double>(n);
  store.ts_ = in.column<std::int64_t>(n);
  store.user_idx_ = in.column<std::uint32_t>(n);
  const auto dict_size = static_cast<std::size_t>(in.pod<std::uint64_t>());
  for (std::size_t i = 0; i < dict_size; ++i) {
    const auto len = in.pod<std::uint32_t>();
    store.users_.push_back(in.string(len));
    store.user_lookup_.emplace(store.users_.back(), static_cast<std::uint32_t>(i));
  }
  if (!in.at_end()) {
    throw Error(ErrorCode::IoError, fmt::format("{}: trailing bytes in event store", path.string()));
  }
  for (auto idx : store.user_idx_) {
    if (idx >= dict_size) {
      throw Error(ErrorCode::IoError,
                  fmt::format("{}: user index {} outside dictionary", path.string(), idx));
    }
  }
  return store;
}

void write_file_atomically(const std::filesystem::path& path, std::string_view bytes) {
  auto tmp = path;
  tmp += fmt::format(".tmp.{}", ::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot open {} for writing", tmp.string()));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoError, fmt::format("write to {} failed", tmp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, fmt::format("cannot move output into {}", path.string()));
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, fmt::format("read of {} failed", path.string()));
  return std::move(ss).str();
}

}  // namespace landsig
