#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "landsig/spatial_index.hpp"
#include "landsig/types.hpp"

namespace landsig {

inline constexpr double kDefaultNearMissMargin = 0.05;

/// Mean squared error over the 24 hourly values.
double mse(const TemporalSignature& x, const TemporalSignature& y) noexcept;

struct TemplateEntry {
  LandUseLabel label = LandUseLabel::Business;
  TemporalSignature signature;

  friend bool operator==(const TemplateEntry&, const TemplateEntry&) = default;
};

/// Boxes of the baseline city known to carry one land use.
struct TemplateZone {
  LandUseLabel label = LandUseLabel::Business;
  std::vector<BoundingBox> boxes;

  friend bool operator==(const TemplateZone&, const TemplateZone&) = default;
};

/// Labeled signatures from the baseline city. Entry order is significant: it
/// breaks exact MSE ties.
struct ReferenceTemplate {
  std::vector<TemplateEntry> entries;
  std::string source;
  int tz_offset_minutes = 0;
  std::vector<TemplateZone> zones;

  friend bool operator==(const ReferenceTemplate&, const ReferenceTemplate&) = default;
};

void validate_template(const ReferenceTemplate& t);

/// One mean-1 signature per label from the summed counts of all its boxes.
/// Labels keep their first-appearance order. Throws IncompleteZone naming the
/// label when some hour has no events.
ReferenceTemplate build_template(const std::vector<TemplateZone>& zones, const SpatialIndex& index,
                                 int tz_offset_minutes, std::string source);

struct MseEntry {
  LandUseLabel label = LandUseLabel::Business;
  double mse = 0.0;

  friend bool operator==(const MseEntry&, const MseEntry&) = default;
};

struct ClassificationResult {
  LandUseLabel label = LandUseLabel::Business;
  std::vector<MseEntry> mse_row;  // template order
  double margin = 0.0;            // second-smallest minus smallest
  bool near_miss = false;         // margin below the configured warning threshold
};

/// Argmin over an already computed MSE row; the first entry wins ties.
ClassificationResult assign_from_mse_row(std::vector<MseEntry> row,
                                         double near_miss_margin = kDefaultNearMissMargin);

ClassificationResult assign_label(const TemporalSignature& sig, const ReferenceTemplate& t,
                                  double near_miss_margin = kDefaultNearMissMargin);

std::string serialize_template(const ReferenceTemplate& t);
ReferenceTemplate parse_template(std::string_view text);
void save_template(const ReferenceTemplate& t, const std::filesystem::path& path);
ReferenceTemplate load_template(const std::filesystem::path& path);

}  // namespace landsig
