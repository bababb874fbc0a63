#include "landsig/app/service.hpp"

#include <chrono>
#include <thread>

#include <fmt/format.h>

#include "httplib.h"
#include "landsig/app/api.hpp"
#include "landsig/event_store.hpp"
#include "landsig/signature.hpp"

namespace landsig::app {

namespace {

ApiResponse json_response(int status, const ojson& body) {
  return ApiResponse{status, body.dump(), "application/json"};
}

ApiResponse error_response(ApiCode code, std::string_view message, const ojson& detail = nullptr) {
  return json_response(http_status_for(code), error_body(code, message, detail));
}

ojson parse_body(std::string_view body) {
  ojson j = ojson::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
  }
  return j;
}

std::string string_field(const ojson& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("'{}' must be a string", key));
  }
  return it->get<std::string>();
}

const ojson& object_field(const ojson& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::InvalidArgument, fmt::format("missing '{}'", key));
  return *it;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::optional<OverlapDefinition> parse_definition(std::string_view s) {
  if (s == "pct_of_zone") return OverlapDefinition::PctOfZone;
  if (s == "pct_of_cluster") return OverlapDefinition::PctOfCluster;
  if (s == "iou") return OverlapDefinition::Iou;
  return std::nullopt;
}

}  // namespace

ServiceConfig parse_service_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  const ojson j = ojson::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::IoError, "config must be a JSON object");
  try {
    ServiceConfig c;
    std::filesystem::path base = base_dir;
    if (j.contains("data_dir")) base = resolve(base_dir, j.at("data_dir").get<std::string>());
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    c.cell_size_deg = j.value("cell_size_deg", c.cell_size_deg);
    c.near_miss_margin = j.value("near_miss_margin", c.near_miss_margin);
    if (j.contains("overlap_definition")) {
      auto d = parse_definition(j.at("overlap_definition").get<std::string>());
      if (!d) throw Error(ErrorCode::IoError, "overlap_definition must be pct_of_zone, pct_of_cluster or iou");
      c.overlap_definition = *d;
    }
    if (j.contains("policy")) {
      const auto& p = j.at("policy");
      c.policy.step_deg = p.value("step_deg", c.policy.step_deg);
      c.policy.max_span_deg = p.value("max_span_deg", c.policy.max_span_deg);
      c.policy.max_iterations = p.value("max_iterations", c.policy.max_iterations);
      validate_policy(c.policy);
    }
    const auto optional_path = [&](const char* key) -> std::optional<std::filesystem::path> {
      if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
      return resolve(base, j.at(key).get<std::string>());
    };
    c.template_path = optional_path("template");
    c.label_map = optional_path("label_map");
    c.static_dir = optional_path("static_dir");
    c.index_cache_dir = optional_path("index_cache_dir");
    for (const auto& d : j.value("datasets", ojson::array())) {
      DatasetConfig dc;
      dc.store = resolve(base, d.at("store").get<std::string>());
      if (d.contains("name")) dc.name = d.at("name").get<std::string>();
      if (d.contains("tz_offset_minutes")) dc.tz_offset_minutes = d.at("tz_offset_minutes").get<int>();
      if (d.contains("zones") && !d.at("zones").is_null()) dc.zones = resolve(base, d.at("zones").get<std::string>());
      c.datasets.push_back(std::move(dc));
    }
    return c;
  } catch (const ojson::exception& e) {
    throw Error(ErrorCode::IoError, fmt::format("config: {}", e.what()));
  }
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
  return parse_service_config(read_file(path), path.parent_path());
}

Service::Service(ServiceConfig config) : config_(std::move(config)) {
  if (config_.datasets.empty()) throw Error(ErrorCode::InvalidArgument, "service needs at least one dataset");
  LabelMap labels;
  if (config_.label_map) labels = load_label_map(*config_.label_map);
  for (const auto& dc : config_.datasets) {
    auto stored = open_dataset(dc.store);
    Dataset ds;
    ds.manifest = stored.manifest;
    if (dc.name) ds.manifest.name = *dc.name;
    ds.tz_offset_minutes = dc.tz_offset_minutes.value_or(stored.manifest.tz_offset_minutes);
    ds.store = std::make_shared<const EventStore>(std::move(stored.store));
    ds.index = std::make_unique<SpatialIndex>(
        config_.index_cache_dir
            ? SpatialIndex::load_or_build(ds.store, config_.cell_size_deg, *config_.index_cache_dir)
            : SpatialIndex::build(ds.store, config_.cell_size_deg));
    if (dc.zones) ds.zones = load_zones(*dc.zones, labels).zones;
    const std::string name = ds.manifest.name;
    if (!datasets_.emplace(name, std::move(ds)).second) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("dataset name {} configured twice", name));
    }
  }
  if (config_.template_path) template_ = load_template(*config_.template_path);
  server_ = std::make_unique<httplib::Server>();
}

Service::~Service() { stop(); }

const Service::Dataset& Service::dataset(const std::string& name) const {
  const auto it = datasets_.find(name);
  if (it == datasets_.end()) throw Error(ErrorCode::NotFound, fmt::format("unknown dataset '{}'", name));
  return it->second;
}

const ReferenceTemplate& Service::reference() const {
  if (!template_) throw Error(ErrorCode::NotFound, "no reference template configured");
  return *template_;
}

ApiResponse Service::handle(std::string_view method, std::string_view path, std::string_view query,
                            std::string_view body) {
  try {
    if (method == "GET" && path == "/datasets") return get_datasets();
    if (method == "GET" && path == "/template") return get_template();
    if (method == "GET" && path == "/zones") return get_zones(query);
    if (method == "POST" && path == "/signature") return post_signature(body);
    if (method == "POST" && path == "/classify") return post_classify(body);
    if (method == "POST" && path == "/overlap") return post_overlap(body);
    if (method == "POST" && path == "/sessions") return post_session(body);

    constexpr std::string_view kSessions = "/sessions/";
    if (path.substr(0, kSessions.size()) == kSessions) {
      std::string_view rest = path.substr(kSessions.size());
      constexpr std::string_view kFinalize = "/finalize";
      if (method == "POST" && rest.size() > kFinalize.size() &&
          rest.substr(rest.size() - kFinalize.size()) == kFinalize) {
        return finalize_session(std::string(rest.substr(0, rest.size() - kFinalize.size())), body);
      }
      if (!rest.empty() && rest.find('/') == std::string_view::npos) {
        if (method == "GET") return get_session(std::string(rest));
        if (method == "PATCH") return patch_session(std::string(rest), body);
      }
    }
    return error_response(ApiCode::NotFound, fmt::format("no endpoint {} {}", method, path));
  } catch (const Error& e) {
    return error_response(api_code_for(e.code()), e.what(), ojson{{"reason", to_string(e.code())}});
  } catch (const ojson::exception& e) {
    return error_response(ApiCode::BadRequest, fmt::format("malformed request: {}", e.what()));
  } catch (const std::exception&) {
    return error_response(ApiCode::IoError, "internal error");
  }
}

ApiResponse Service::get_datasets() const {
  ojson out = ojson::array();
  for (const auto& [name, ds] : datasets_) {
    ojson m = to_json(ds.manifest);
    m["tz_offset_minutes"] = ds.tz_offset_minutes;
    m["zones_loaded"] = ds.zones.has_value();
    out.push_back(std::move(m));
  }
  return json_response(200, out);
}

ApiResponse Service::get_template() const { return json_response(200, to_json(reference())); }

ApiResponse Service::get_zones(std::string_view query) const {
  httplib::Params params;
  httplib::detail::parse_query_text(std::string(query), params);
  const auto it = params.find("dataset");
  if (it == params.end()) throw Error(ErrorCode::InvalidArgument, "missing ?dataset=");
  const auto& ds = dataset(it->second);
  if (!ds.zones) throw Error(ErrorCode::NotFound, fmt::format("no zone file loaded for {}", it->second));
  return ApiResponse{200, zones_to_geojson(*ds.zones), "application/geo+json"};
}

ApiResponse Service::post_signature(std::string_view body) const {
  const ojson req = parse_body(body);
  const auto& ds = dataset(string_field(req, "dataset"));
  const BoundingBox box = bbox_from_json(object_field(req, "bbox"));
  const HourlyCounts counts = ds.index->hourly_histogram(box, ds.tz_offset_minutes);
  ojson sig = nullptr;
  if (counts.total() > 0) sig = to_json(normalize(counts));
  return json_response(200, ojson{{"dataset", ds.manifest.name},
                                  {"bbox", to_json(box)},
                                  {"counts", to_json(counts)},
                                  {"complete", is_complete(counts)},
                                  {"missing_hours", missing_hours(counts)},
                                  {"event_total", counts.total()},
                                  {"signature", std::move(sig)}});
}

ApiResponse Service::post_classify(std::string_view body) const {
  const ojson req = parse_body(body);
  const auto& ds = dataset(string_field(req, "dataset"));
  const BoundingBox box = bbox_from_json(object_field(req, "bbox"));
  const auto& tmpl = reference();
  const HourlyCounts counts = ds.index->hourly_histogram(box, ds.tz_offset_minutes);
  const TemporalSignature sig = normalize(counts);
  ojson out = to_json(assign_label(sig, tmpl, config_.near_miss_margin));
  out["complete"] = is_complete(counts);
  out["counts"] = to_json(counts);
  out["signature"] = to_json(sig);
  out["event_total"] = counts.total();
  return json_response(200, out);
}

ApiResponse Service::post_overlap(std::string_view body) const {
  const ojson req = parse_body(body);
  const auto& ds = dataset(string_field(req, "dataset"));
  const BoundingBox box = bbox_from_json(object_field(req, "bbox"));
  if (!ds.zones) throw Error(ErrorCode::NotFound, fmt::format("no zone file loaded for {}", ds.manifest.name));

  OverlapDefinition definition = config_.overlap_definition;
  if (req.contains("definition")) {
    auto d = parse_definition(string_field(req, "definition"));
    if (!d) throw Error(ErrorCode::InvalidArgument, "definition must be pct_of_zone, pct_of_cluster or iou");
    definition = *d;
  }
  LandUseLabel label;
  if (req.contains("label")) {
    auto parsed = parse_label(string_field(req, "label"));
    if (!parsed) throw Error(ErrorCode::InvalidArgument, "unknown label");
    label = *parsed;
  } else {
    const auto counts = ds.index->hourly_histogram(box, ds.tz_offset_minutes);
    label = assign_label(normalize(counts), reference(), config_.near_miss_margin).label;
  }
  std::string id = req.contains("cluster_id") ? string_field(req, "cluster_id") : "query";
  return json_response(200, to_json(overlap_report(std::move(id), box, label, *ds.zones, definition)));
}

ApiResponse Service::post_session(std::string_view body) {
  const ojson req = parse_body(body);
  const std::string name = string_field(req, "dataset");
  const auto& ds = dataset(name);
  const BoundingBox box = bbox_from_json(object_field(req, "bbox"));
  return json_response(201, to_json(sessions_.open(name, box, *ds.index, ds.tz_offset_minutes)));
}

ApiResponse Service::get_session(const std::string& id) const {
  return json_response(200, to_json(sessions_.get(id)));
}

ApiResponse Service::patch_session(const std::string& id, std::string_view body) {
  const ojson req = parse_body(body);
  const BoundingBox box = bbox_from_json(object_field(req, "bbox"));
  const auto& ds = dataset(sessions_.get(id).dataset);
  return json_response(200, to_json(sessions_.revise(id, box, *ds.index, ds.tz_offset_minutes)));
}

ApiResponse Service::finalize_session(const std::string& id, std::string_view body) {
  const ojson req = parse_body(body);
  const std::string decision = string_field(req, "decision");
  if (decision != "accept" && decision != "discard") {
    throw Error(ErrorCode::InvalidArgument, "decision must be 'accept' or 'discard'");
  }
  const auto outcome = sessions_.finalize(id, decision == "accept" ? Decision::Accept : Decision::Discard);
  ojson out{{"session", to_json(outcome.session)}, {"cluster", nullptr}, {"classification", nullptr},
            {"overlap", nullptr}};
  if (!outcome.cluster) return json_response(200, out);

  out["cluster"] = to_json(*outcome.cluster);
  if (!template_) return json_response(200, out);
  const auto result = assign_label(outcome.cluster->signature, *template_, config_.near_miss_margin);
  out["classification"] = to_json(result);
  const auto& ds = dataset(outcome.session.dataset);
  if (!ds.zones) return json_response(200, out);
  try {
    out["overlap"] = to_json(overlap_report(outcome.cluster->id, outcome.cluster->bbox, result.label,
                                            *ds.zones, config_.overlap_definition));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoZonesForLabel) throw;
    out["overlap"] = error_body(ApiCode::NoZonesForLabel, e.what());
  }
  return json_response(200, out);
}

void Service::mount(httplib::Server& server) {
  const auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    const auto r = handle(req.method, req.path, httplib::detail::params_to_query_str(req.params), req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.Get(".*", forward);
  server.Post(".*", forward);
  server.Patch(".*", forward);
  if (config_.static_dir) server.set_mount_point("/ui", config_.static_dir->string());
}

void Service::serve() {
  mount(*server_);
  const int port = config_.port == 0 ? server_->bind_to_any_port(config_.host)
                                     : (server_->bind_to_port(config_.host, config_.port) ? config_.port : -1);
  if (port < 0) {
    throw Error(ErrorCode::IoError, fmt::format("cannot bind {}:{}", config_.host, config_.port));
  }
  bound_port_ = port;
  server_->listen_after_bind();
}

void Service::stop() { server_->stop(); }

int Service::bound_port() const noexcept { return bound_port_.load(); }

bool Service::wait_until_ready(int timeout_ms) const {
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  while (std::chrono::steady_clock::now() < deadline) {
    if (bound_port_.load() > 0 && server_->is_running()) return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  return false;
}

}  // namespace landsig::app
