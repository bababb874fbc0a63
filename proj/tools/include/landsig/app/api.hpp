#pragma once

#include <string>
#include <string_view>

#include "json.hpp"
#include "landsig/classify.hpp"
#include "landsig/cluster_builder.hpp"
#include "landsig/error.hpp"
#include "landsig/ingest.hpp"
#include "landsig/overlap.hpp"

namespace landsig::app {

using ojson = nlohmann::ordered_json;

/// Public error vocabulary of the service and CLI.
enum class ApiCode {
  BadRequest,
  NotFound,
  SessionClosed,
  IncompleteCluster,
  EmptySignature,
  NoZonesForLabel,
  IoError,
};

std::string_view to_string(ApiCode code);
ApiCode api_code_for(ErrorCode code);
int http_status_for(ApiCode code);

/// {"error": {"code", "message", "detail"?}}
ojson error_body(ApiCode code, std::string_view message, const ojson& detail = nullptr);

ojson to_json(const BoundingBox& b);
/// Throws Error(InvalidArgument) when a field is missing or not a number.
BoundingBox bbox_from_json(const ojson& j);

ojson to_json(const HourlyCounts& c);
ojson to_json(const TemporalSignature& s);
ojson to_json(const DatasetManifest& m);
ojson to_json(const ReferenceTemplate& t);
ojson to_json(const ClassificationResult& r);
ojson to_json(const ClusterSession& s);
ojson to_json(const Cluster& c);
ojson to_json(const OverlapReport& r);

}  // namespace landsig::app
