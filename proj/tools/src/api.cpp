#include "landsig/app/api.hpp"

#include "landsig/signature.hpp"

namespace landsig::app {

std::string_view to_string(ApiCode code) {
  switch (code) {
    case ApiCode::BadRequest: return "BadRequest";
    case ApiCode::NotFound: return "NotFound";
    case ApiCode::SessionClosed: return "SessionClosed";
    case ApiCode::IncompleteCluster: return "IncompleteCluster";
    case ApiCode::EmptySignature: return "EmptySignature";
    case ApiCode::NoZonesForLabel: return "NoZonesForLabel";
    case ApiCode::IoError: return "IoError";
  }
  return "IoError";
}

ApiCode api_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return ApiCode::NotFound;
    case ErrorCode::SessionClosed: return ApiCode::SessionClosed;
    case ErrorCode::IncompleteCluster: return ApiCode::IncompleteCluster;
    case ErrorCode::EmptySignature: return ApiCode::EmptySignature;
    case ErrorCode::NoZonesForLabel: return ApiCode::NoZonesForLabel;
    case ErrorCode::IoError: return ApiCode::IoError;
    case ErrorCode::DegenerateBox:
    case ErrorCode::OutOfRange:
    case ErrorCode::MalformedRecord:
    case ErrorCode::EmptyDataset:
    case ErrorCode::IncompleteZone:
    case ErrorCode::DegenerateRing:
    case ErrorCode::InvalidZone:
    case ErrorCode::InvalidProfile:
    case ErrorCode::InvalidArgument: return ApiCode::BadRequest;
  }
  return ApiCode::IoError;
}

int http_status_for(ApiCode code) {
  switch (code) {
    case ApiCode::BadRequest: return 400;
    case ApiCode::NotFound: return 404;
    case ApiCode::SessionClosed:
    case ApiCode::IncompleteCluster: return 409;
    case ApiCode::EmptySignature:
    case ApiCode::NoZonesForLabel: return 422;
    case ApiCode::IoError: return 500;
  }
  return 500;
}

ojson error_body(ApiCode code, std::string_view message, const ojson& detail) {
  ojson err{{"code", to_string(code)}, {"message", message}};
  if (!detail.is_null()) err["detail"] = detail;
  return ojson{{"error", std::move(err)}};
}

ojson to_json(const BoundingBox& b) {
  return ojson{{"lat_min", b.lat_min}, {"lat_max", b.lat_max}, {"lon_min", b.lon_min},
               {"lon_max", b.lon_max}};
}

BoundingBox bbox_from_json(const ojson& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "bbox must be an object");
  const auto field = [&](const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_number()) {
      throw Error(ErrorCode::InvalidArgument, std::string("bbox.") + key + " must be a number");
    }
    return it->get<double>();
  };
  return BoundingBox{field("lat_min"), field("lat_max"), field("lon_min"), field("lon_max")};
}

ojson to_json(const HourlyCounts& c) { return ojson(c.counts); }
ojson to_json(const TemporalSignature& s) { return ojson(s.values); }

ojson to_json(const DatasetManifest& m) {
  return ojson{{"name", m.name},
               {"tz_offset_minutes", m.tz_offset_minutes},
               {"record_count", m.record_count},
               {"unique_users", m.unique_users},
               {"time_span", {m.time_min, m.time_max}},
               {"source_format", to_string(m.source_format)},
               {"skipped_records", m.skipped_records},
               {"malformed_records", m.malformed_records}};
}

ojson to_json(const ReferenceTemplate& t) {
  ojson entries = ojson::array();
  for (const auto& e : t.entries) {
    entries.push_back(ojson{{"label", to_string(e.label)}, {"signature", to_json(e.signature)}});
  }
  ojson zones = ojson::array();
  for (const auto& z : t.zones) {
    ojson boxes = ojson::array();
    for (const auto& b : z.boxes) boxes.push_back(to_json(b));
    zones.push_back(ojson{{"label", to_string(z.label)}, {"boxes", std::move(boxes)}});
  }
  return ojson{{"source", t.source},
               {"tz_offset_minutes", t.tz_offset_minutes},
               {"entries", std::move(entries)},
               {"zones", std::move(zones)}};
}

ojson to_json(const ClassificationResult& r) {
  ojson row = ojson::object();
  for (const auto& e : r.mse_row) row[std::string(to_string(e.label))] = e.mse;
  return ojson{{"label", to_string(r.label)},
               {"mse_row", std::move(row)},
               {"margin", r.margin},
               {"near_miss", r.near_miss}};
}

ojson to_json(const ClusterSession& s) {
  ojson history = ojson::array();
  for (const auto& b : s.history) history.push_back(to_json(b));
  ojson sig = nullptr;
  if (s.event_total > 0) sig = to_json(normalize(s.counts));
  return ojson{{"session_id", s.session_id},
               {"dataset", s.dataset},
               {"bbox", to_json(s.bbox)},
               {"history", std::move(history)},
               {"counts", to_json(s.counts)},
               {"signature", std::move(sig)},
               {"status", to_string(s.status)},
               {"complete", is_complete(s.counts)},
               {"event_total", s.event_total}};
}

ojson to_json(const Cluster& c) {
  ojson history = ojson::array();
  for (const auto& b : c.provenance.history) history.push_back(to_json(b));
  ojson policy = nullptr;
  if (c.provenance.policy) {
    policy = ojson{{"step_deg", c.provenance.policy->step_deg},
                   {"max_span_deg", c.provenance.policy->max_span_deg},
                   {"max_iterations", c.provenance.policy->max_iterations}};
  }
  return ojson{{"id", c.id},
               {"bbox", to_json(c.bbox)},
               {"counts", to_json(c.counts)},
               {"signature", to_json(c.signature)},
               {"event_total", c.event_total},
               {"provenance",
                {{"dataset", c.provenance.dataset}, {"policy", std::move(policy)}, {"history", std::move(history)}}}};
}

ojson to_json(const OverlapReport& r) {
  ojson rows = ojson::array();
  for (const auto& z : r.rows) {
    rows.push_back(ojson{{"zone_id", z.zone_id},
                         {"zone_label", to_string(z.zone_label)},
                         {"intersection_area_m2", z.intersection_area_m2},
                         {"zone_area_m2", z.zone_area_m2},
                         {"pct_of_cluster", z.pct_of_cluster},
                         {"pct_of_zone", z.pct_of_zone},
                         {"iou", z.iou}});
  }
  return ojson{{"cluster_id", r.cluster_id},
               {"predicted_label", to_string(r.predicted_label)},
               {"cluster_area_m2", r.cluster_area_m2},
               {"intersection_area_m2", r.intersection_area_m2},
               {"touched_zone_area_m2", r.touched_zone_area_m2},
               {"pct_of_cluster", r.pct_of_cluster},
               {"pct_of_zone", r.pct_of_zone},
               {"iou", r.iou},
               {"headline_definition", to_string(r.headline_definition)},
               {"headline_pct", r.headline_pct},
               {"rows", std::move(rows)}};
}

}  // namespace landsig::app
