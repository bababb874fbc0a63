#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "landsig/spatial_index.hpp"
#include "landsig/types.hpp"

namespace landsig {

enum class SessionStatus { Incomplete, Complete, Discarded, Accepted };

std::string_view to_string(SessionStatus s);

/// Expansion schedule for unattended cluster growth. Each iteration moves all
/// four edges outward by step_deg.
struct GrowthPolicy {
  double step_deg = 0.0025;
  double max_span_deg = 0.05;
  int max_iterations = 20;

  friend bool operator==(const GrowthPolicy&, const GrowthPolicy&) = default;
};

void validate_policy(const GrowthPolicy& p);

struct ClusterProvenance {
  std::string dataset;
  std::optional<GrowthPolicy> policy;  // set for auto-grown clusters
  std::vector<BoundingBox> history;    // boxes tried before the final one

  friend bool operator==(const ClusterProvenance&, const ClusterProvenance&) = default;
};

/// An accepted cluster. Every hour of `counts` is non-zero.
struct Cluster {
  std::string id;
  BoundingBox bbox;
  HourlyCounts counts;
  TemporalSignature signature;
  std::uint64_t event_total = 0;
  ClusterProvenance provenance;

  friend bool operator==(const Cluster&, const Cluster&) = default;
};

struct ClusterSession {
  std::string session_id;
  std::string dataset;
  BoundingBox bbox;
  std::vector<BoundingBox> history;
  HourlyCounts counts;
  SessionStatus status = SessionStatus::Incomplete;
  std::uint64_t event_total = 0;

  bool closed() const noexcept {
    return status == SessionStatus::Accepted || status == SessionStatus::Discarded;
  }
};

ClusterSession open_session(std::string session_id, const BoundingBox& seed,
                            const SpatialIndex& index, int tz_offset_minutes,
                            std::string dataset = {});

/// Replaces the box with any valid rectangle and recomputes counts; the old
/// box is appended to history. Throws SessionClosed after finalize.
ClusterSession revise_session(const ClusterSession& session, const BoundingBox& new_bbox,
                              const SpatialIndex& index, int tz_offset_minutes);

enum class Decision { Accept, Discard };

struct FinalizeOutcome {
  ClusterSession session;
  std::optional<Cluster> cluster;  // present only for an accepted session
};

/// Accept requires a complete curve (IncompleteCluster otherwise); discard is
/// always allowed on an open session.
FinalizeOutcome finalize_session(const ClusterSession& session, Decision decision);

enum class StopReason { Complete, MaxSpan, MaxIterations };

std::string_view to_string(StopReason r);

struct GrowthStep {
  BoundingBox bbox;
  HourlyCounts counts;

  friend bool operator==(const GrowthStep&, const GrowthStep&) = default;
};

struct GrowthResult {
  std::optional<Cluster> cluster;  // empty when discarded
  std::vector<GrowthStep> trace;   // one entry per evaluated box, seed first
  StopReason reason = StopReason::MaxIterations;
};

/// Grows `seed` symmetrically until its hourly curve is complete, the next
/// box would exceed max_span_deg on either axis, or max_iterations boxes have
/// been evaluated.
GrowthResult auto_grow(const BoundingBox& seed, const GrowthPolicy& policy,
                       const SpatialIndex& index, int tz_offset_minutes, std::string cluster_id = {},
                       std::string dataset = {});

/// Server-side session table. Sessions are independent; calls touching the
/// same id are serialized.
class SessionRegistry {
 public:
  ClusterSession open(std::string dataset, const BoundingBox& seed, const SpatialIndex& index,
                      int tz_offset_minutes);
  ClusterSession get(const std::string& id) const;
  ClusterSession revise(const std::string& id, const BoundingBox& new_bbox,
                        const SpatialIndex& index, int tz_offset_minutes);
  FinalizeOutcome finalize(const std::string& id, Decision decision);
  std::size_t size() const;

 private:
  struct Slot {
    std::mutex mutex;
    ClusterSession session;
  };
  std::shared_ptr<Slot> find(const std::string& id) const;

  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Slot>> slots_;
  std::uint64_t next_id_ = 1;
};

/// Collection of clusters exchanged between CLI steps as JSON.
struct ClusterFile {
  std::string dataset;
  std::vector<Cluster> clusters;

  friend bool operator==(const ClusterFile&, const ClusterFile&) = default;
};

std::string clusters_to_json(const ClusterFile& file);
ClusterFile parse_clusters_json(std::string_view text);
void save_clusters(const ClusterFile& file, const std::filesystem::path& path);
ClusterFile load_clusters(const std::filesystem::path& path);

}  // namespace landsig
