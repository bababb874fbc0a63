// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "geometry_oracle.hpp"
#include "landsig/classify.hpp"
#include "landsig/cluster_builder.hpp"
#include "landsig/event_store.hpp"
#include "landsig/geometry.hpp"
#include "landsig/overlap.hpp"
#include "landsig/signature.hpp"
#include "landsig/spatial_index.hpp"
#include "landsig/synth.hpp"
#include "landsig/zones.hpp"
#include "pipeline.hpp"
#include "support.hpp"

namespace landsig {
namespace {

using L = LandUseLabel;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// -- 1 ------------------------------------------------------------------------

Outcome reference_rows() {
  const auto t0 = Clock::now();
  struct Row {
    const char* name;
    double b, r, e, c;
    L expected;
  };
  const std::vector<Row> rows = {
      {"Melbourne 1", 0.045, 0.156, 0.419, 0.387, L::Business},
      {"Melbourne 2", 0.206, 0.204, 0.611, 0.607, L::Residential},
      {"Melbourne 3", 0.098, 0.613, 0.184, 0.90, L::Business},
      {"Melbourne 4", 0.239, 0.190, 0.834, 0.117, L::Recreation},
      {"Sydney 1", 0.030, 0.238, 0.267, 0.536, L::Business},
      {"Sydney 2", 0.266, 0.114, 0.691, 0.355, L::Residential},
      {"Sydney 3", 0.398, 1.204, 0.198, 1.613, L::Education},
      {"Sydney 4", 0.397, 0.321, 1.190, 0.149, L::Recreation},
  };
  int matched = 0;
  std::string misses;
  for (const auto& row : rows) {
    const auto r = assign_from_mse_row(
        {{L::Business, row.b}, {L::Residential, row.r}, {L::Education, row.e}, {L::Recreation, row.c}});
    if (r.label == row.expected) {
      ++matched;
    } else {
      misses += fmt::format(" {}->{}", row.name, to_string(r.label));
    }
  }
  const double elapsed = seconds_since(t0);
  return {matched == 8 && elapsed < 1.0, fmt::format("{}/8 rows exact{}, {:.4f} s", matched, misses, elapsed)};
}

// -- 2 ------------------------------------------------------------------------

Outcome synthetic_end_to_end() {
  const auto t0 = Clock::now();
  const auto profiles = default_profiles();
  const auto template_zones = template_zones_from(zones_of(profiles));
  int perfect = 0;
  std::string worst;
  for (std::uint64_t pair = 0; pair < 20; ++pair) {
    const auto base = generate_city(profiles, {.days = 30, .seed = 1000 + 2 * pair});
    const auto city = generate_city(profiles, {.days = 30, .seed = 1001 + 2 * pair});
    const auto base_index = SpatialIndex::build(testing::make_store(base.events));
    const auto city_index = SpatialIndex::build(testing::make_store(city.events));
    const auto tmpl = build_template(template_zones, base_index, 600, "baseline");
    int correct = 0;
    for (const auto& p : profiles) {
      const auto grown = auto_grow(centre_seed(p), GrowthPolicy{}, city_index, 600, p.zone_id, "city");
      if (grown.cluster && assign_label(grown.cluster->signature, tmpl).label == p.label) ++correct;
    }
    if (correct == 4) {
      ++perfect;
    } else {
      worst += fmt::format(" pair{}={}/4", pair, correct);
    }
  }
  const double elapsed = seconds_since(t0);
  return {perfect >= 19 && elapsed < 30.0,
          fmt::format("{}/20 seed pairs at 4/4{}, {:.2f} s", perfect, worst, elapsed)};
}

// -- 3 ------------------------------------------------------------------------

HourlyCounts random_counts(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> shape(0, 3);
  std::uniform_int_distribution<std::uint64_t> small(0, 9);
  std::uniform_int_distribution<std::uint64_t> large(0, 1'000'000);
  std::bernoulli_distribution sparse(0.7);
  HourlyCounts c;
  const int s = shape(rng);
  for (auto& v : c.counts) {
    switch (s) {
      case 0: v = small(rng); break;
      case 1: v = large(rng); break;
      case 2: v = sparse(rng) ? 0 : large(rng); break;
      default: v = 1 + small(rng) * 1000; break;
    }
  }
  if (c.total() == 0) c[std::uniform_int_distribution<std::size_t>(0, 23)(rng)] = 1 + small(rng);
  return c;
}

Outcome normalization_invariants() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::uint64_t> scale(2, 100000);
  double worst_mean = 0.0;
  double worst_scale = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto c = random_counts(rng);
    const auto s = normalize(c);
    worst_mean = std::max(worst_mean, std::abs(s.mean() - 1.0));
    HourlyCounts k = c;
    const auto factor = scale(rng);
    for (auto& v : k.counts) v *= factor;
    const auto t = normalize(k);
    for (std::size_t h = 0; h < kHoursPerDay; ++h) worst_scale = std::max(worst_scale, std::abs(t[h] - s[h]));
  }

  int label_changes = 0;
  for (int i = 0; i < 1000; ++i) {
    ReferenceTemplate mean_one, sum_one;
    for (auto label : kAllLabels) {
      const auto c = random_counts(rng);
      mean_one.entries.push_back({label, normalize(c)});
      sum_one.entries.push_back({label, normalize_sum_one(c)});
    }
    const auto cluster = random_counts(rng);
    if (assign_label(normalize(cluster), mean_one).label != assign_label(normalize_sum_one(cluster), sum_one).label) {
      ++label_changes;
    }
  }
  const double elapsed = seconds_since(t0);
  return {worst_mean <= 1e-9 && worst_scale <= 1e-12 && label_changes == 0,
          fmt::format("max |mean-1| {:.1e}, max scale drift {:.1e}, {} label changes in 1000 draws, {:.2f} s",
                      worst_mean, worst_scale, label_changes, elapsed)};
}

// -- 4 ------------------------------------------------------------------------

Outcome spatial_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(77);
  const BoundingBox area{-27.52, -27.42, 152.98, 153.08};
  auto events = testing::random_events(rng, 110000, area);
  events.resize(100000);
  const auto store = testing::make_store(events);
  const auto index = SpatialIndex::build(store);
  int set_mismatches = 0;
  int histogram_mismatches = 0;
  std::size_t nonempty = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto box = testing::random_box(rng, area, 0.05);
    std::vector<std::uint32_t> scan;
    for (std::size_t k = 0; k < store->size(); ++k) {
      if (box.contains(store->lats()[k], store->lons()[k])) scan.push_back(static_cast<std::uint32_t>(k));
    }
    const auto got = index.query_bbox(box);
    if (got.refs != scan) ++set_mismatches;
    if (index.hourly_histogram(box, 600).total() != got.count()) ++histogram_mismatches;
    if (!scan.empty()) ++nonempty;
  }
  const double elapsed = seconds_since(t0);
  return {set_mismatches == 0 && histogram_mismatches == 0 && elapsed < 10.0,
          fmt::format("{} set / {} histogram mismatches over 1000 boxes ({} non-empty), {} events, {:.2f} s",
                      set_mismatches, histogram_mismatches, nonempty, store->size(), elapsed)};
}

// -- 5 ------------------------------------------------------------------------

Outcome geometry_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(5150);
  const std::vector<std::pair<double, double>> centres = {
      {-27.47, 153.02}, {-37.81, 144.96}, {-33.87, 151.21}, {0.0, 0.0}, {59.9, 10.75}};
  std::uniform_real_distribution<double> offset(-0.005, 0.005);
  std::uniform_real_distribution<double> span(0.001, 0.01);
  double worst = 0.0;
  int failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto [clat, clon] = centres[static_cast<std::size_t>(i) % centres.size()];
    const auto poly = testing::random_polygon(rng, clat, clon, 0.004, i % 2 == 1);
    const double lat = clat + offset(rng) - 0.003;
    const double lon = clon + offset(rng) - 0.003;
    const BoundingBox rect{lat, lat + span(rng), lon, lon + span(rng)};
    const double anchor = (rect.lat_min + rect.lat_max) / 2;
    const double rect_area = testing::rect_area_m2(rect, anchor);
    const double clipped = clipped_area_m2(clip_rect_polygon(rect, poly), anchor);
    const double oracle = testing::monte_carlo_fraction(rect, poly, 1'000'000, 9000 + i) * rect_area;
    const double err = std::abs(clipped - oracle) / rect_area;
    worst = std::max(worst, err);
    if (err > 0.005) ++failures;
  }

  double worst_containment = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto [clat, clon] = centres[static_cast<std::size_t>(i) % centres.size()];
    std::uniform_int_distribution<int> sides(5, 12);
    const int n = sides(rng);
    Polygon poly;
    for (int k = 0; k <= n; ++k) {
      const double a = 2 * std::numbers::pi * (k % n) / n;
      poly.outer.push_back({clat + 0.004 * std::sin(a), clon + 0.004 * std::cos(a)});
    }
    const double inner = 0.004 * std::cos(std::numbers::pi / n) / std::numbers::sqrt2 * 0.95;
    std::uniform_real_distribution<double> half(0.1 * inner, inner);
    const double h = half(rng);
    const std::vector<Zone> zones = {Zone{L::Education, {poly}, "zone"}};
    const auto r = overlap_report("c", {clat - h, clat + h, clon - h, clon + h}, L::Education, zones);
    worst_containment = std::max(worst_containment, std::abs(r.pct_of_cluster - 100.0));
  }

  const Ring square = {{0, 0}, {0, 0.001}, {0.001, 0.001}, {0.001, 0}, {0, 0}};
  const double equator = ring_area_m2(square);
  const double equator_err = std::abs(equator - 12364.0) / 12364.0;

  const double elapsed = seconds_since(t0);
  return {failures == 0 && worst_containment <= 0.1 && equator_err <= 0.005 && elapsed < 60.0,
          fmt::format("{} of 1000 pairs beyond 0.5% (worst {:.3f}%), containment worst |pct-100| {:.2e}, "
                      "equatorial square {:.1f} m2, {:.1f} s",
                      failures, 100 * worst, worst_containment, equator, elapsed)};
}

// -- 6 ------------------------------------------------------------------------

Outcome completeness_gate() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(66);
  const BoundingBox area{0, 0.05, 0, 0.05};
  int accepted = 0;
  int violations = 0;
  int rejected = 0;
  for (int round = 0; round < 150; ++round) {
    std::uniform_int_distribution<std::size_t> size(1, 600);
    const auto events = testing::random_events(rng, size(rng), area, 0, 86400);
    const auto index = SpatialIndex::build(testing::make_store(events), 0.005);
    for (int i = 0; i < 20; ++i) {
      GrowthPolicy p;
      p.step_deg = std::uniform_real_distribution<double>(0.001, 0.01)(rng);
      p.max_span_deg = std::uniform_real_distribution<double>(0.005, 0.08)(rng);
      p.max_iterations = std::uniform_int_distribution<int>(1, 30)(rng);
      const auto seed = testing::random_box(rng, area, 0.01);
      const auto grown = auto_grow(seed, p, index, 0);
      if (grown.cluster) {
        ++accepted;
        if (!is_complete(grown.cluster->counts)) ++violations;
      }
      auto session = open_session("s", seed, index, 0);
      for (int k = 0; k < 3; ++k) session = revise_session(session, testing::random_box(rng, area, 0.05), index, 0);
      try {
        const auto out = finalize_session(session, Decision::Accept);
        ++accepted;
        if (!out.cluster || !is_complete(out.cluster->counts)) ++violations;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::IncompleteCluster) ++violations;
        ++rejected;
      }
    }
  }

  int daytime_kept = 0;
  int daytime_runs = 0;
  auto daytime = default_profiles();
  for (auto& p : daytime) p.hourly_weights = daytime_only_weights();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto city = generate_city(daytime, {.days = 30, .seed = seed});
    const auto index = SpatialIndex::build(testing::make_store(city.events));
    for (const auto& p : daytime) {
      ++daytime_runs;
      const auto grown = auto_grow(centre_seed(p), GrowthPolicy{}, index, 600);
      if (grown.cluster || grown.reason != StopReason::MaxSpan) ++daytime_kept;
    }
  }
  const double elapsed = seconds_since(t0);
  return {violations == 0 && daytime_kept == 0 && accepted > 0 && rejected > 0,
          fmt::format("{} accepted / {} refused, {} zero-hour clusters; daytime-only {}/{} discarded at max_span, "
                      "{:.2f} s",
                      accepted, rejected, violations, daytime_runs - daytime_kept, daytime_runs, elapsed)};
}

// -- 7 ------------------------------------------------------------------------

std::vector<std::pair<std::string, std::string>> tree_bytes(const std::filesystem::path& root) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) {
      out.emplace_back(std::filesystem::relative(entry.path(), root).string(), read_file(entry.path()));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void run_pipeline(const std::filesystem::path& dir) {
  testing::build_demo(dir, 11, 12, 30);
  const auto p = [&](const char* name) { return (dir / name).string(); };
  const auto seeds = read_file(dir / "city" / "seeds.csv");
  std::size_t pos = seeds.find('\n') + 1;
  while (pos < seeds.size()) {
    const auto end = seeds.find('\n', pos);
    std::vector<std::string> f;
    std::size_t s = pos;
    for (std::size_t c = seeds.find(',', s); s <= end; c = seeds.find(',', s)) {
      const auto stop = std::min(c, end);
      f.push_back(seeds.substr(s, stop - s));
      s = stop + 1;
    }
    testing::cli_ok({"auto-grow", "--store", p("city.store"), "--seed", f[2], f[3], f[4], f[5], "--id", f[1], "--out",
                     p("clusters.json"), "--append"});
    pos = end + 1;
  }
  testing::cli_ok({"validate", "--clusters", p("clusters.json"), "--zones", p("city/zones.geojson"), "--template",
                   p("template.txt"), "--out", p("validation.csv"), "--details", p("validation_details.csv")});
  testing::cli_ok({"report", "--clusters", p("clusters.json"), "--template", p("template.txt"), "--out-dir",
                   p("report"), "--zones", p("city/zones.geojson")});
}

Outcome determinism() {
  const auto t0 = Clock::now();
  const auto profiles = default_profiles();
  const auto a = generate_city(profiles, {.days = 30, .seed = 99});
  const auto b = generate_city(profiles, {.days = 30, .seed = 99});
  const bool synth_same = a.events == b.events && events_csv(a.events) == events_csv(b.events) &&
                          ground_truth_csv(profiles, a) == ground_truth_csv(profiles, b);

  const auto index_a = SpatialIndex::build(testing::make_store(a.events));
  const auto index_b = SpatialIndex::build(testing::make_store(b.events));
  bool grow_same = true;
  for (const auto& p : profiles) {
    const auto ga = auto_grow(centre_seed(p), GrowthPolicy{}, index_a, 600, p.zone_id, "x");
    const auto gb = auto_grow(centre_seed(p), GrowthPolicy{}, index_b, 600, p.zone_id, "x");
    grow_same = grow_same && ga.trace == gb.trace && ga.cluster == gb.cluster && ga.reason == gb.reason;
  }

  testing::TempDir first, second;
  run_pipeline(first.path());
  run_pipeline(second.path());
  const auto fa = tree_bytes(first.path());
  const auto fb = tree_bytes(second.path());
  std::size_t differing = 0;
  if (fa.size() == fb.size()) {
    for (std::size_t i = 0; i < fa.size(); ++i) differing += fa[i] != fb[i];
  } else {
    differing = std::max(fa.size(), fb.size());
  }
  const double elapsed = seconds_since(t0);
  return {synth_same && grow_same && differing == 0 && fa.size() >= 20,
          fmt::format("synth {}, auto_grow {}, CLI pipeline {} artifacts with {} differing, {:.2f} s",
                      synth_same ? "identical" : "DIFFERENT", grow_same ? "identical" : "DIFFERENT", fa.size(),
                      differing, elapsed)};
}

}  // namespace
}  // namespace landsig

int main() {
  using landsig::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"AC1 argmin on reference MSE rows", landsig::reference_rows},
      {"AC2 synthetic end-to-end accuracy", landsig::synthetic_end_to_end},
      {"AC3 normalization invariants", landsig::normalization_invariants},
      {"AC4 spatial index vs linear scan", landsig::spatial_oracle},
      {"AC5 clipped area vs Monte Carlo", landsig::geometry_oracle},
      {"AC6 completeness gate", landsig::completeness_gate},
      {"AC7 determinism", landsig::determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    if (!o.pass) ++failed;
    std::printf("%s %-36s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
