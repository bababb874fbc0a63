#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "landsig/types.hpp"

namespace landsig {

/// Mean-1 normalization: each hour divided by the average hourly count, so
/// the 24 values average to 1. Throws EmptySignature for all-zero counts.
TemporalSignature normalize(const HourlyCounts& counts);

/// Share-of-total normalization (values sum to 1). Equals normalize()/24
/// elementwise; kept for cross-checking that label assignment does not depend
/// on the convention.
TemporalSignature normalize_sum_one(const HourlyCounts& counts);

/// True iff every hour has at least one event.
bool is_complete(const HourlyCounts& counts) noexcept;

/// Hours with zero events, ascending.
std::vector<int> missing_hours(const HourlyCounts& counts);

/// `hour,value` header plus 24 rows.
std::string signature_csv(const TemporalSignature& sig);

struct SignatureSeries {
  std::string name;
  TemporalSignature signature;
};

/// Line chart of one or more signatures over hours 0..23 with a dashed guide
/// at 1.0 (the mean of every normalized curve).
std::string signature_svg(const std::vector<SignatureSeries>& series, std::string_view title);

}  // namespace landsig
