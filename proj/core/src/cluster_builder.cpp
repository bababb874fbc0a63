#include "landsig/cluster_builder.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "json.hpp"
#include "landsig/event_store.hpp"
#include "landsig/signature.hpp"

namespace landsig {

using nlohmann::json;

namespace {

SessionStatus status_for(const HourlyCounts& counts) {
  return is_complete(counts) ? SessionStatus::Complete : SessionStatus::Incomplete;
}

BoundingBox expand(const BoundingBox& b, double step) {
  return BoundingBox{std::max(-90.0, b.lat_min - step), std::min(90.0, b.lat_max + step),
                     std::max(-180.0, b.lon_min - step), std::min(180.0, b.lon_max + step)};
}

Cluster make_cluster(std::string id, const BoundingBox& bbox, const HourlyCounts& counts,
                     ClusterProvenance provenance) {
  return Cluster{std::move(id), bbox, counts, normalize(counts), counts.total(),
                 std::move(provenance)};
}

json bbox_json(const BoundingBox& b) {
  return json{{"lat_min", b.lat_min}, {"lat_max", b.lat_max}, {"lon_min", b.lon_min},
              {"lon_max", b.lon_max}};
}

BoundingBox bbox_from(const json& j) {
  return BoundingBox{j.at("lat_min").get<double>(), j.at("lat_max").get<double>(),
                     j.at("lon_min").get<double>(), j.at("lon_max").get<double>()};
}

}  // namespace

std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::Incomplete: return "incomplete";
    case SessionStatus::Complete: return "complete";
    case SessionStatus::Discarded: return "discarded";
    case SessionStatus::Accepted: return "accepted";
  }
  return "unknown";
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::Complete: return "complete";
    case StopReason::MaxSpan: return "max_span";
    case StopReason::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

void validate_policy(const GrowthPolicy& p) {
  if (!(p.step_deg > 0.0) || !std::isfinite(p.step_deg)) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("growth step {} must be > 0", p.step_deg));
  }
  if (!(p.max_span_deg > 0.0) || !std::isfinite(p.max_span_deg)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("max span {} must be > 0", p.max_span_deg));
  }
  if (p.max_iterations < 1) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("max iterations {} must be >= 1", p.max_iterations));
  }
}

ClusterSession open_session(std::string session_id, const BoundingBox& seed,
                            const SpatialIndex& index, int tz_offset_minutes, std::string dataset) {
  validate_bbox(seed);
  ClusterSession s;
  s.session_id = std::move(session_id);
  s.dataset = std::move(dataset);
  s.bbox = seed;
  s.counts = index.hourly_histogram(seed, tz_offset_minutes);
  s.event_total = s.counts.total();
  s.status = status_for(s.counts);
  return s;
}

ClusterSession revise_session(const ClusterSession& session, const BoundingBox& new_bbox,
                              const SpatialIndex& index, int tz_offset_minutes) {
  if (session.closed()) {
    throw Error(ErrorCode::SessionClosed,
                fmt::format("session {} is already {}", session.session_id, to_string(session.status)));
  }
  validate_bbox(new_bbox);
  ClusterSession next = session;
  next.history.push_back(session.bbox);
  next.bbox = new_bbox;
  next.counts = index.hourly_histogram(new_bbox, tz_offset_minutes);
  next.event_total = next.counts.total();
  next.status = status_for(next.counts);
  return next;
}

FinalizeOutcome finalize_session(const ClusterSession& session, Decision decision) {
  if (session.closed()) {
    throw Error(ErrorCode::SessionClosed,
                fmt::format("session {} is already {}", session.session_id, to_string(session.status)));
  }
  FinalizeOutcome out{session, std::nullopt};
  if (decision == Decision::Discard) {
    out.session.status = SessionStatus::Discarded;
    return out;
  }
  if (!is_complete(session.counts)) {
    throw Error(ErrorCode::IncompleteCluster,
                fmt::format("session {} has no events at hour(s) {}", session.session_id,
                            fmt::join(missing_hours(session.counts), ",")));
  }
  out.session.status = SessionStatus::Accepted;
  out.cluster = make_cluster(session.session_id, session.bbox, session.counts,
                             ClusterProvenance{session.dataset, std::nullopt, session.history});
  return out;
}

GrowthResult auto_grow(const BoundingBox& seed, const GrowthPolicy& policy,
                       const SpatialIndex& index, int tz_offset_minutes, std::string cluster_id,
                       std::string dataset) {
  validate_bbox(seed);
  validate_policy(policy);

  GrowthResult result;
  BoundingBox box = seed;
  for (int iteration = 1;; ++iteration) {
    result.trace.push_back(GrowthStep{box, index.hourly_histogram(box, tz_offset_minutes)});
    const auto& counts = result.trace.back().counts;
    if (is_complete(counts)) {
      std::vector<BoundingBox> history;
      for (std::size_t i = 0; i + 1 < result.trace.size(); ++i) history.push_back(result.trace[i].bbox);
      result.reason = StopReason::Complete;
      result.cluster = make_cluster(std::move(cluster_id), box, counts,
                                    ClusterProvenance{std::move(dataset), policy, std::move(history)});
      return result;
    }
    if (iteration >= policy.max_iterations) {
      result.reason = StopReason::MaxIterations;
      return result;
    }
    const BoundingBox next = expand(box, policy.step_deg);
    if (next.lat_span() > policy.max_span_deg || next.lon_span() > policy.max_span_deg) {
      result.reason = StopReason::MaxSpan;
      return result;
    }
    box = next;
  }
}

ClusterSession SessionRegistry::open(std::string dataset, const BoundingBox& seed,
                                     const SpatialIndex& index, int tz_offset_minutes) {
  std::string id;
  {
    std::unique_lock lock(mutex_);
    id = fmt::format("s{:06}", next_id_++);
  }
  auto slot = std::make_shared<Slot>();
  slot->session = open_session(id, seed, index, tz_offset_minutes, std::move(dataset));
  ClusterSession copy = slot->session;
  std::unique_lock lock(mutex_);
  slots_.emplace(id, std::move(slot));
  return copy;
}

std::shared_ptr<SessionRegistry::Slot> SessionRegistry::find(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const auto it = slots_.find(id);
  if (it == slots_.end()) throw Error(ErrorCode::NotFound, fmt::format("no session {}", id));
  return it->second;
}

ClusterSession SessionRegistry::get(const std::string& id) const {
  auto slot = find(id);
  std::lock_guard lock(slot->mutex);
  return slot->session;
}

ClusterSession SessionRegistry::revise(const std::string& id, const BoundingBox& new_bbox,
                                       const SpatialIndex& index, int tz_offset_minutes) {
  auto slot = find(id);
  std::lock_guard lock(slot->mutex);
  slot->session = revise_session(slot->session, new_bbox, index, tz_offset_minutes);
  return slot->session;
}

FinalizeOutcome SessionRegistry::finalize(const std::string& id, Decision decision) {
  auto slot = find(id);
  std::lock_guard lock(slot->mutex);
  auto outcome = finalize_session(slot->session, decision);
  slot->session = outcome.session;
  return outcome;
}

std::size_t SessionRegistry::size() const {
  std::shared_lock lock(mutex_);
  return slots_.size();
}

std::string clusters_to_json(const ClusterFile& file) {
  json clusters = json::array();
  for (const auto& c : file.clusters) {
    json history = json::array();
    for (const auto& b : c.provenance.history) history.push_back(bbox_json(b));
    json provenance{{"dataset", c.provenance.dataset}, {"history", std::move(history)}};
    if (c.provenance.policy) {
      provenance["policy"] = json{{"step_deg", c.provenance.policy->step_deg},
                                  {"max_span_deg", c.provenance.policy->max_span_deg},
                                  {"max_iterations", c.provenance.policy->max_iterations}};
    } else {
      provenance["policy"] = nullptr;
    }
    clusters.push_back(json{{"id", c.id},
                            {"bbox", bbox_json(c.bbox)},
                            {"counts", c.counts.counts},
                            {"signature", c.signature.values},
                            {"event_total", c.event_total},
                            {"provenance", std::move(provenance)}});
  }
  return json{{"format", "landsig-clusters"}, {"version", 1}, {"dataset", file.dataset},
              {"clusters", std::move(clusters)}}
             .dump(2) +
         "\n";
}

ClusterFile parse_clusters_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "landsig-clusters" || j.at("version") != 1) {
      throw Error(ErrorCode::IoError, "not a version-1 landsig cluster file");
    }
    ClusterFile file;
    file.dataset = j.at("dataset").get<std::string>();
    for (const auto& c : j.at("clusters")) {
      Cluster cl;
      cl.id = c.at("id").get<std::string>();
      cl.bbox = bbox_from(c.at("bbox"));
      cl.counts.counts = c.at("counts").get<std::array<std::uint64_t, kHoursPerDay>>();
      cl.signature.values = c.at("signature").get<std::array<double, kHoursPerDay>>();
      cl.event_total = c.at("event_total").get<std::uint64_t>();
      const auto& p = c.at("provenance");
      cl.provenance.dataset = p.at("dataset").get<std::string>();
      for (const auto& b : p.at("history")) cl.provenance.history.push_back(bbox_from(b));
      if (const auto& pol = p.at("policy"); !pol.is_null()) {
        cl.provenance.policy = GrowthPolicy{pol.at("step_deg").get<double>(),
                                            pol.at("max_span_deg").get<double>(),
                                            pol.at("max_iterations").get<int>()};
      }
      validate_bbox(cl.bbox);
      if (!is_complete(cl.counts) || cl.counts.total() != cl.event_total) {
        throw Error(ErrorCode::IoError,
                    fmt::format("cluster {} has inconsistent or incomplete counts", cl.id));
      }
      file.clusters.push_back(std::move(cl));
    }
    return file;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError, fmt::format("cluster file: {}", e.what()));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) throw;
    throw Error(ErrorCode::IoError, fmt::format("cluster file: {}", e.what()));
  }
}

void save_clusters(const ClusterFile& file, const std::filesystem::path& path) {
  write_file_atomically(path, clusters_to_json(file));
}

ClusterFile load_clusters(const std::filesystem::path& path) {
  return parse_clusters_json(read_file(path));
}

}  // namespace landsig
