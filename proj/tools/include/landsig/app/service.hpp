#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "landsig/classify.hpp"
#include "landsig/cluster_builder.hpp"
#include "landsig/ingest.hpp"
#include "landsig/overlap.hpp"
#include "landsig/spatial_index.hpp"
#include "landsig/zones.hpp"

namespace httplib {
class Server;
}

namespace landsig::app {

struct DatasetConfig {
  std::optional<std::string> name;  // defaults to the manifest name
  std::filesystem::path store;
  std::optional<int> tz_offset_minutes;
  std::optional<std::filesystem::path> zones;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::vector<DatasetConfig> datasets;
  std::optional<std::filesystem::path> template_path;
  std::optional<std::filesystem::path> label_map;
  std::optional<std::filesystem::path> static_dir;  // served under /ui
  std::optional<std::filesystem::path> index_cache_dir;
  GrowthPolicy policy;
  double cell_size_deg = kDefaultCellSizeDeg;
  double near_miss_margin = kDefaultNearMissMargin;
  OverlapDefinition overlap_definition = OverlapDefinition::PctOfZone;
};

/// Relative paths in the config resolve against `data_dir` when given, else
/// against `base_dir`.
ServiceConfig parse_service_config(std::string_view json_text, const std::filesystem::path& base_dir);
ServiceConfig load_service_config(const std::filesystem::path& path);

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Pipeline state behind the HTTP endpoints. Stores, indexes, zones and the
/// template are loaded once at construction and never change; only the
/// session table mutates.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Transport-independent dispatch; `query` is the raw query string.
  ApiResponse handle(std::string_view method, std::string_view path, std::string_view query,
                     std::string_view body);

  /// Registers every endpoint (and the static UI mount) on `server`.
  void mount(httplib::Server& server);

  /// Blocks until stop() is called from another thread or a signal handler.
  void serve();
  void stop();
  /// Port actually bound (useful with port 0); -1 before serve() binds.
  int bound_port() const noexcept;
  bool wait_until_ready(int timeout_ms) const;

  const ServiceConfig& config() const noexcept { return config_; }

 private:
  struct Dataset {
    DatasetManifest manifest;
    int tz_offset_minutes = 0;
    std::shared_ptr<const EventStore> store;
    std::unique_ptr<SpatialIndex> index;
    std::optional<std::vector<Zone>> zones;
  };

  const Dataset& dataset(const std::string& name) const;
  const ReferenceTemplate& reference() const;

  ApiResponse get_datasets() const;
  ApiResponse get_template() const;
  ApiResponse get_zones(std::string_view query) const;
  ApiResponse post_signature(std::string_view body) const;
  ApiResponse post_classify(std::string_view body) const;
  ApiResponse post_overlap(std::string_view body) const;
  ApiResponse post_session(std::string_view body);
  ApiResponse get_session(const std::string& id) const;
  ApiResponse patch_session(const std::string& id, std::string_view body);
  ApiResponse finalize_session(const std::string& id, std::string_view body);

  ServiceConfig config_;
  std::map<std::string, Dataset> datasets_;
  std::optional<ReferenceTemplate> template_;
  SessionRegistry sessions_;
  std::unique_ptr<httplib::Server> server_;
  std::atomic<int> bound_port_{-1};
};

}  // namespace landsig::app
