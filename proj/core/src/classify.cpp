#include "landsig/classify.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "landsig/event_store.hpp"
#include "landsig/signature.hpp"

namespace landsig {

namespace {

constexpr std::string_view kTemplateMagic = "landsig-template";
constexpr int kTemplateVersion = 1;

[[noreturn]] void bad_template(std::size_t line, std::string_view what) {
  throw Error(ErrorCode::IoError, fmt::format("template line {}: {}", line, what));
}

double to_double(std::string_view token, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    bad_template(line, fmt::format("'{}' is not a number", token));
  }
  return v;
}

LandUseLabel to_label(std::string_view token, std::size_t line) {
  auto label = parse_label(token);
  if (!label) bad_template(line, fmt::format("unknown land-use label '{}'", token));
  return *label;
}

}  // namespace

double mse(const TemporalSignature& x, const TemporalSignature& y) noexcept {
  double sum = 0.0;
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    const double d = x[h] - y[h];
    sum += d * d;
  }
  return sum / static_cast<double>(kHoursPerDay);
}

void validate_template(const ReferenceTemplate& t) {
  if (t.entries.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "reference template needs at least two entries");
  }
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (t.entries[i].label == t.entries[j].label) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("duplicate template label {}", to_string(t.entries[i].label)));
      }
    }
    for (double v : t.entries[i].signature.values) {
      if (!std::isfinite(v) || v < 0.0) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("template signature for {} has a negative or non-finite value",
                                to_string(t.entries[i].label)));
      }
    }
  }
}

ReferenceTemplate build_template(const std::vector<TemplateZone>& zones, const SpatialIndex& index,
                                 int tz_offset_minutes, std::string source) {
  ReferenceTemplate t;
  t.source = std::move(source);
  t.tz_offset_minutes = tz_offset_minutes;

  std::vector<HourlyCounts> counts;
  for (const auto& zone : zones) {
    auto it = std::find_if(t.zones.begin(), t.zones.end(),
                           [&](const TemplateZone& z) { return z.label == zone.label; });
    if (it == t.zones.end()) {
      t.zones.push_back(TemplateZone{zone.label, {}});
      counts.emplace_back();
      it = std::prev(t.zones.end());
    }
    auto& total = counts[static_cast<std::size_t>(it - t.zones.begin())];
    for (const auto& box : zone.boxes) {
      total += index.hourly_histogram(box, tz_offset_minutes);
      it->boxes.push_back(box);
    }
  }

  for (std::size_t i = 0; i < t.zones.size(); ++i) {
    if (!is_complete(counts[i])) {
      const auto missing = missing_hours(counts[i]);
      throw Error(ErrorCode::IncompleteZone,
                  fmt::format("zone {} has no events at hour(s) {}", to_string(t.zones[i].label),
                              fmt::join(missing, ",")));
    }
    t.entries.push_back(TemplateEntry{t.zones[i].label, normalize(counts[i])});
  }
  validate_template(t);
  return t;
}

ClassificationResult assign_from_mse_row(std::vector<MseEntry> row, double near_miss_margin) {
  if (row.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "label assignment needs at least two candidates");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < row.size(); ++i) {
    if (row[i].mse < row[best].mse) best = i;
  }
  double runner_up = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i != best) runner_up = std::min(runner_up, row[i].mse);
  }
  ClassificationResult r;
  r.label = row[best].label;
  r.margin = runner_up - row[best].mse;
  r.near_miss = r.margin < near_miss_margin;
  r.mse_row = std::move(row);
  return r;
}

ClassificationResult assign_label(const TemporalSignature& sig, const ReferenceTemplate& t,
                                  double near_miss_margin) {
  validate_template(t);
  std::vector<MseEntry> row;
  row.reserve(t.entries.size());
  for (const auto& e : t.entries) row.push_back(MseEntry{e.label, mse(sig, e.signature)});
  return assign_from_mse_row(std::move(row), near_miss_margin);
}

std::string serialize_template(const ReferenceTemplate& t) {
  validate_template(t);
  std::string out = fmt::format("{} {}\n", kTemplateMagic, kTemplateVersion);
  out += fmt::format("source {}\n", t.source.empty() ? "-" : t.source);
  out += fmt::format("tz_offset_minutes {}\n", t.tz_offset_minutes);
  for (const auto& e : t.entries) {
    out += fmt::format("entry {} {}\n", to_string(e.label), fmt::join(e.signature.values, " "));
  }
  for (const auto& z : t.zones) {
    for (const auto& b : z.boxes) {
      out += fmt::format("box {} {} {} {} {}\n", to_string(z.label), b.lat_min, b.lat_max,
                         b.lon_min, b.lon_max);
    }
  }
  return out;
}

ReferenceTemplate parse_template(std::string_view text) {
  ReferenceTemplate t;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::istringstream fields(raw);
    std::vector<std::string> tok;
    for (std::string s; fields >> s;) tok.push_back(std::move(s));
    if (tok.empty() || tok[0].front() == '#') continue;

    if (!saw_header) {
      if (tok.size() != 2 || tok[0] != kTemplateMagic) bad_template(line_no, "missing header");
      if (tok[1] != std::to_string(kTemplateVersion)) {
        bad_template(line_no, fmt::format("unsupported template version {}", tok[1]));
      }
      saw_header = true;
      continue;
    }
    const auto& kind = tok[0];
    if (kind == "source" && tok.size() == 2) {
      t.source = tok[1] == "-" ? "" : tok[1];
    } else if (kind == "tz_offset_minutes" && tok.size() == 2) {
      t.tz_offset_minutes = static_cast<int>(to_double(tok[1], line_no));
    } else if (kind == "entry" && tok.size() == 2 + kHoursPerDay) {
      TemplateEntry e{to_label(tok[1], line_no), {}};
      for (std::size_t h = 0; h < kHoursPerDay; ++h) e.signature.values[h] = to_double(tok[2 + h], line_no);
      t.entries.push_back(e);
    } else if (kind == "box" && tok.size() == 6) {
      const auto label = to_label(tok[1], line_no);
      BoundingBox b{to_double(tok[2], line_no), to_double(tok[3], line_no),
                    to_double(tok[4], line_no), to_double(tok[5], line_no)};
      auto it = std::find_if(t.zones.begin(), t.zones.end(),
                             [&](const TemplateZone& z) { return z.label == label; });
      if (it == t.zones.end()) {
        t.zones.push_back(TemplateZone{label, {}});
        it = std::prev(t.zones.end());
      }
      it->boxes.push_back(b);
    } else {
      bad_template(line_no, fmt::format("unrecognised record '{}'", kind));
    }
  }
  if (!saw_header) throw Error(ErrorCode::IoError, "template is empty");
  try {
    validate_template(t);
  } catch (const Error& e) {
    throw Error(ErrorCode::IoError, fmt::format("invalid template: {}", e.what()));
  }
  return t;
}

void save_template(const ReferenceTemplate& t, const std::filesystem::path& path) {
  write_file_atomically(path, serialize_template(t));
}

ReferenceTemplate load_template(const std::filesystem::path& path) {
  return parse_template(read_file(path));
}

}  // namespace landsig
