#include "landsig/app/cli.hpp"

#include <algorithm>
#include <csignal>
#include <filesystem>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "landsig/app/api.hpp"
#include "landsig/app/service.hpp"
#include "landsig/classify.hpp"
#include "landsig/cluster_builder.hpp"
#include "landsig/event_store.hpp"
#include "landsig/ingest.hpp"
#include "landsig/overlap.hpp"
#include "landsig/signature.hpp"
#include "landsig/spatial_index.hpp"
#include "landsig/synth.hpp"
#include "landsig/zones.hpp"

namespace fs = std::filesystem;

namespace landsig::app {

namespace {

BoundingBox box_from(const std::vector<double>& v) {
  if (v.size() != 4) throw Error(ErrorCode::InvalidArgument, "a box needs lat_min lat_max lon_min lon_max");
  BoundingBox b{v[0], v[1], v[2], v[3]};
  validate_bbox(b);
  return b;
}

struct IndexedDataset {
  DatasetManifest manifest;
  std::shared_ptr<const EventStore> store;
  SpatialIndex index;
};

IndexedDataset open_indexed(const fs::path& store_path, double cell_size) {
  auto stored = open_dataset(store_path);
  auto store = std::make_shared<const EventStore>(std::move(stored.store));
  auto index = SpatialIndex::build(store, cell_size);
  return IndexedDataset{std::move(stored.manifest), std::move(store), std::move(index)};
}

LabelMap label_map_from(const std::optional<fs::path>& path) {
  return path ? load_label_map(*path) : LabelMap{};
}

OverlapDefinition definition_from(const std::string& name) {
  if (name == "pct_of_zone") return OverlapDefinition::PctOfZone;
  if (name == "pct_of_cluster") return OverlapDefinition::PctOfCluster;
  if (name == "iou") return OverlapDefinition::Iou;
  throw Error(ErrorCode::InvalidArgument, "definition must be pct_of_zone, pct_of_cluster or iou");
}

void write_or_print(const std::optional<fs::path>& path, const std::string& text, std::ostream& out) {
  if (path) {
    if (path->has_parent_path()) fs::create_directories(path->parent_path());
    write_file_atomically(*path, text);
  } else {
    out << text;
  }
}

std::string box_text(const BoundingBox& b) {
  return fmt::format("[{}, {}) x [{}, {})", b.lat_min, b.lat_max, b.lon_min, b.lon_max);
}

Service* g_running_service = nullptr;

extern "C" void stop_running_service(int) {
  if (g_running_service != nullptr) g_running_service->stop();
}

// -- subcommands ------------------------------------------------------------

struct IngestArgs {
  fs::path in;
  std::string format = "csv";
  int tz_offset = 0;
  fs::path out;
  std::optional<std::string> name;
  unsigned threads = 0;
};

int run_ingest(const IngestArgs& a, std::ostream& out) {
  const auto format = parse_source_format(a.format);
  if (!format) throw Error(ErrorCode::InvalidArgument, fmt::format("unknown format '{}'", a.format));
  LoadOptions options{*format, a.tz_offset, a.name, a.threads};
  auto loaded = load_dataset(a.in, options);
  save_dataset(loaded.store, loaded.manifest, a.out);
  out << fmt::format("dataset {}: {} accepted, {} skipped, {} malformed of {} records\n",
                     loaded.manifest.name, loaded.stats.accepted, loaded.stats.skipped,
                     loaded.stats.malformed, loaded.stats.total_records);
  for (const auto& e : loaded.stats.sample_errors) out << "  " << e << '\n';
  return 0;
}

struct TemplateArgs {
  fs::path store;
  fs::path zones;
  std::optional<fs::path> label_map;
  std::string property = "landuse";
  fs::path out;
  double cell_size = kDefaultCellSizeDeg;
};

int run_template(const TemplateArgs& a, std::ostream& out) {
  const auto ds = open_indexed(a.store, a.cell_size);
  const auto zones = load_zones(a.zones, label_map_from(a.label_map), a.property);
  const auto tmpl = build_template(template_zones_from(zones.zones), ds.index,
                                   ds.manifest.tz_offset_minutes, ds.manifest.name);
  save_template(tmpl, a.out);
  out << fmt::format("template from {}: {} labels\n", ds.manifest.name, tmpl.entries.size());
  return 0;
}

struct ClassifyArgs {
  fs::path template_path;
  fs::path store;
  std::vector<double> bbox;
  bool json = false;
  double margin_warning = kDefaultNearMissMargin;
  double cell_size = kDefaultCellSizeDeg;
};

int run_classify(const ClassifyArgs& a, std::ostream& out, std::ostream& err) {
  const auto tmpl = load_template(a.template_path);
  const BoundingBox box = box_from(a.bbox);
  const auto ds = open_indexed(a.store, a.cell_size);
  const auto counts = ds.index.hourly_histogram(box, ds.manifest.tz_offset_minutes);
  const auto result = assign_label(normalize(counts), tmpl, a.margin_warning);
  if (a.json) {
    ojson j = to_json(result);
    j["dataset"] = ds.manifest.name;
    j["bbox"] = to_json(box);
    j["complete"] = is_complete(counts);
    j["event_total"] = counts.total();
    out << j.dump(2) << '\n';
  } else {
    out << fmt::format("label {}\n", to_string(result.label));
    for (const auto& e : result.mse_row) out << fmt::format("  {:<12} {:.4f}\n", to_string(e.label), e.mse);
    out << fmt::format("margin {:.4f}\n", result.margin);
  }
  if (!is_complete(counts)) err << "warning: the box has hours without events\n";
  if (result.near_miss) err << fmt::format("warning: near miss, margin {:.4f}\n", result.margin);
  return 0;
}

struct AutoGrowArgs {
  fs::path store;
  std::vector<double> seed;
  std::string id = "c1";
  GrowthPolicy policy;
  fs::path out;
  bool append = false;
  double cell_size = kDefaultCellSizeDeg;
};

int run_auto_grow(const AutoGrowArgs& a, std::ostream& out) {
  validate_policy(a.policy);
  const BoundingBox seed = box_from(a.seed);
  const auto ds = open_indexed(a.store, a.cell_size);
  const auto grown = auto_grow(seed, a.policy, ds.index, ds.manifest.tz_offset_minutes, a.id, ds.manifest.name);

  ClusterFile file{ds.manifest.name, {}};
  if (a.append && fs::exists(a.out)) {
    file = load_clusters(a.out);
    if (file.dataset != ds.manifest.name) {
      throw Error(ErrorCode::InvalidArgument,
                  fmt::format("{} holds clusters of {}, not {}", a.out.string(), file.dataset, ds.manifest.name));
    }
  }
  if (grown.cluster) {
    const auto same_id = [&](const Cluster& c) { return c.id == grown.cluster->id; };
    std::erase_if(file.clusters, same_id);
    file.clusters.push_back(*grown.cluster);
    out << fmt::format("cluster {}: {} after {} boxes, {} events, {}\n", a.id, to_string(grown.reason),
                       grown.trace.size(), grown.cluster->event_total, box_text(grown.cluster->bbox));
  } else {
    out << fmt::format("cluster {}: discarded ({}) after {} boxes\n", a.id, to_string(grown.reason),
                       grown.trace.size());
  }
  save_clusters(file, a.out);
  return 0;
}

struct ValidateArgs {
  fs::path clusters;
  fs::path zones;
  std::optional<fs::path> label_map;
  std::string property = "landuse";
  fs::path template_path;
  std::optional<fs::path> out;
  std::optional<fs::path> details;
  std::string definition = "pct_of_zone";
  double margin_warning = kDefaultNearMissMargin;
};

int run_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err) {
  const auto definition = definition_from(a.definition);
  const auto tmpl = load_template(a.template_path);
  const auto file = load_clusters(a.clusters);
  const auto zones = load_zones(a.zones, label_map_from(a.label_map), a.property);
  std::vector<ValidationRow> rows;
  for (const auto& c : file.clusters) {
    const auto result = assign_label(c.signature, tmpl, a.margin_warning);
    if (result.near_miss) {
      err << fmt::format("warning: cluster {} is a near miss, margin {:.4f}\n", c.id, result.margin);
    }
    rows.push_back(ValidationRow{file.dataset, overlap_report(c.id, c.bbox, result.label, zones.zones, definition)});
  }
  write_or_print(a.out, overlap_table_csv(rows), out);
  if (a.details) write_or_print(a.details, overlap_details_csv(rows), out);
  if (a.out) out << overlap_table_text(rows);
  return 0;
}

struct SynthArgs {
  int days = 30;
  std::uint64_t seed = 7;
  fs::path out_dir;
  CityLayout layout;
  int tz_offset = 600;
  bool daytime_only = false;
  std::uint32_t users_per_zone = 400;
};

int run_synth(const SynthArgs& a, std::ostream& out) {
  auto profiles = default_profiles(a.layout);
  if (a.daytime_only) {
    for (auto& p : profiles) p.hourly_weights = daytime_only_weights();
  }
  CityOptions options;
  options.days = a.days;
  options.seed = a.seed;
  options.tz_offset_minutes = a.tz_offset;
  options.users_per_zone = a.users_per_zone;
  const auto city = generate_city(profiles, options);

  fs::create_directories(a.out_dir);
  write_file_atomically(a.out_dir / "events.csv", events_csv(city.events));
  write_file_atomically(a.out_dir / "zones.geojson", zones_to_geojson(zones_of(profiles)));
  write_file_atomically(a.out_dir / "ground_truth.csv", ground_truth_csv(profiles, city));
  std::string seeds = "zone_id,label,lat_min,lat_max,lon_min,lon_max\n";
  for (const auto& p : profiles) {
    const auto b = centre_seed(p);
    seeds += fmt::format("{},{},{},{},{},{}\n", p.zone_id, to_string(p.label), b.lat_min, b.lat_max,
                         b.lon_min, b.lon_max);
  }
  write_file_atomically(a.out_dir / "seeds.csv", seeds);
  out << fmt::format("{} events over {} days in {} zones -> {}\n", city.events.size(), a.days,
                     profiles.size(), a.out_dir.string());
  return 0;
}

struct ServeArgs {
  fs::path config;
  std::optional<int> port;
  std::optional<std::string> host;
};

int run_serve(const ServeArgs& a, std::ostream& out) {
  auto config = load_service_config(a.config);
  if (a.port) config.port = *a.port;
  if (a.host) config.host = *a.host;
  Service service(std::move(config));
  g_running_service = &service;
  std::signal(SIGINT, stop_running_service);
  std::signal(SIGTERM, stop_running_service);
  out << fmt::format("serving on {}:{}\n", service.config().host, service.config().port) << std::flush;
  service.serve();
  g_running_service = nullptr;
  return 0;
}

struct ReportArgs {
  fs::path clusters;
  fs::path template_path;
  fs::path out_dir;
  std::optional<fs::path> zones;
  std::optional<fs::path> label_map;
  std::string property = "landuse";
  std::string definition = "pct_of_zone";
};

int run_report(const ReportArgs& a, std::ostream& out) {
  const auto tmpl = load_template(a.template_path);
  const auto file = load_clusters(a.clusters);
  fs::create_directories(a.out_dir);

  std::vector<SignatureSeries> template_series;
  for (const auto& e : tmpl.entries) {
    template_series.push_back({std::string(to_string(e.label)), e.signature});
    write_file_atomically(a.out_dir / fmt::format("template_{}.csv", to_string(e.label)),
                          signature_csv(e.signature));
  }
  write_file_atomically(a.out_dir / "template.svg",
                        signature_svg(template_series, fmt::format("Reference signatures ({})", tmpl.source)));

  std::vector<SignatureSeries> cluster_series;
  std::string mse_table = "dataset,cluster";
  for (const auto& e : tmpl.entries) mse_table += fmt::format(",{}", to_string(e.label));
  mse_table += ",assigned,margin\n";
  std::vector<std::pair<const Cluster*, LandUseLabel>> assigned;
  for (const auto& c : file.clusters) {
    cluster_series.push_back({c.id, c.signature});
    write_file_atomically(a.out_dir / fmt::format("cluster_{}.csv", c.id), signature_csv(c.signature));
    const auto result = assign_label(c.signature, tmpl);
    mse_table += fmt::format("{},{}", file.dataset, c.id);
    for (const auto& e : tmpl.entries) {
      const auto it = std::find_if(result.mse_row.begin(), result.mse_row.end(),
                                   [&](const MseEntry& m) { return m.label == e.label; });
      mse_table += fmt::format(",{:.3f}", it->mse);
    }
    mse_table += fmt::format(",{},{:.3f}\n", to_string(result.label), result.margin);
    assigned.emplace_back(&c, result.label);
  }
  write_file_atomically(a.out_dir / "clusters.svg",
                        signature_svg(cluster_series, fmt::format("Clusters ({})", file.dataset)));
  write_file_atomically(a.out_dir / "classification.csv", mse_table);

  if (a.zones) {
    const auto zones = load_zones(*a.zones, label_map_from(a.label_map), a.property);
    const auto definition = definition_from(a.definition);
    std::vector<ValidationRow> rows;
    for (const auto& [c, label] : assigned) {
      rows.push_back(ValidationRow{file.dataset, overlap_report(c->id, c->bbox, label, zones.zones, definition)});
    }
    write_file_atomically(a.out_dir / "overlap.csv", overlap_table_csv(rows));
    write_file_atomically(a.out_dir / "overlap_details.csv", overlap_details_csv(rows));
  }
  out << fmt::format("report for {} clusters -> {}\n", file.clusters.size(), a.out_dir.string());
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Land-use inference from geotagged activity", "landsig"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse raw records into an event store");
  ingest_cmd->add_option("--in", ingest.in, "Input file")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--format", ingest.format, "tweet-json or csv")->capture_default_str();
  ingest_cmd->add_option("--tz-offset", ingest.tz_offset, "Local UTC offset in minutes")->capture_default_str();
  ingest_cmd->add_option("--out", ingest.out, "Event store path")->required();
  ingest_cmd->add_option("--name", ingest.name, "Dataset name (default: input stem)");
  ingest_cmd->add_option("--threads", ingest.threads, "Parser threads (0 = all cores)");

  TemplateArgs tmpl;
  auto* template_cmd = app.add_subcommand("template", "Build reference signatures from a baseline city");
  template_cmd->add_option("--store", tmpl.store, "Baseline event store")->required();
  template_cmd->add_option("--zones", tmpl.zones, "GeoJSON land-use zones")->required();
  template_cmd->add_option("--label-map", tmpl.label_map, "JSON map of zone codes to labels");
  template_cmd->add_option("--property", tmpl.property, "Feature property holding the land use")
      ->capture_default_str();
  template_cmd->add_option("--out", tmpl.out, "Template path")->required();
  template_cmd->add_option("--cell-size", tmpl.cell_size, "Index cell size in degrees")->capture_default_str();

  ClassifyArgs classify;
  auto* classify_cmd = app.add_subcommand("classify", "Assign a land use to one box");
  classify_cmd->add_option("--template", classify.template_path, "Reference template")->required();
  classify_cmd->add_option("--store", classify.store, "Event store")->required();
  classify_cmd->add_option("--bbox", classify.bbox, "lat_min lat_max lon_min lon_max")->required()->expected(4);
  classify_cmd->add_flag("--json", classify.json, "Print JSON");
  classify_cmd->add_option("--margin-warning", classify.margin_warning, "Near-miss threshold")
      ->capture_default_str();
  classify_cmd->add_option("--cell-size", classify.cell_size, "Index cell size in degrees")->capture_default_str();

  AutoGrowArgs grow;
  auto* grow_cmd = app.add_subcommand("auto-grow", "Grow a seed box until its curve is complete");
  grow_cmd->add_option("--store", grow.store, "Event store")->required();
  grow_cmd->add_option("--seed", grow.seed, "lat_min lat_max lon_min lon_max")->required()->expected(4);
  grow_cmd->add_option("--id", grow.id, "Cluster id")->capture_default_str();
  grow_cmd->add_option("--step", grow.policy.step_deg, "Expansion per side in degrees")->capture_default_str();
  grow_cmd->add_option("--max-span", grow.policy.max_span_deg, "Largest allowed span in degrees")
      ->capture_default_str();
  grow_cmd->add_option("--max-iterations", grow.policy.max_iterations, "Largest number of boxes tried")
      ->capture_default_str();
  grow_cmd->add_option("--out", grow.out, "Cluster JSON path")->required();
  grow_cmd->add_flag("--append", grow.append, "Add to an existing cluster file");
  grow_cmd->add_option("--cell-size", grow.cell_size, "Index cell size in degrees")->capture_default_str();

  ValidateArgs validate;
  auto* validate_cmd = app.add_subcommand("validate", "Overlap of classified clusters with official zones");
  validate_cmd->add_option("--clusters", validate.clusters, "Cluster JSON")->required();
  validate_cmd->add_option("--zones", validate.zones, "GeoJSON land-use zones")->required();
  validate_cmd->add_option("--label-map", validate.label_map, "JSON map of zone codes to labels");
  validate_cmd->add_option("--property", validate.property, "Feature property holding the land use")
      ->capture_default_str();
  validate_cmd->add_option("--template", validate.template_path, "Reference template")->required();
  validate_cmd->add_option("--out", validate.out, "CSV path (default: stdout)");
  validate_cmd->add_option("--details", validate.details, "Per-zone CSV path");
  validate_cmd->add_option("--definition", validate.definition, "pct_of_zone, pct_of_cluster or iou")
      ->capture_default_str();
  validate_cmd->add_option("--margin-warning", validate.margin_warning, "Near-miss threshold")
      ->capture_default_str();

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic city with known land use");
  synth_cmd->add_option("--days", synth.days, "Days of activity")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")->required();
  synth_cmd->add_option("--rate", synth.layout.daily_rate, "Mean events per zone per day")->capture_default_str();
  synth_cmd->add_option("--tz-offset", synth.tz_offset, "Local UTC offset in minutes")->capture_default_str();
  synth_cmd->add_option("--origin-lat", synth.layout.origin_lat, "Grid centre latitude")->capture_default_str();
  synth_cmd->add_option("--origin-lon", synth.layout.origin_lon, "Grid centre longitude")->capture_default_str();
  synth_cmd->add_flag("--daytime-only", synth.daytime_only, "Emit events only from 08:00 to 17:59");
  synth_cmd->add_option("--users-per-zone", synth.users_per_zone, "Distinct users per zone")->capture_default_str();

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--config", serve.config, "Service config JSON")->required();
  serve_cmd->add_option("--port", serve.port, "Override the configured port");
  serve_cmd->add_option("--host", serve.host, "Override the configured host");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Signature plots and tables for a cluster file");
  report_cmd->add_option("--clusters", report.clusters, "Cluster JSON")->required();
  report_cmd->add_option("--template", report.template_path, "Reference template")->required();
  report_cmd->add_option("--out-dir", report.out_dir, "Output directory")->required();
  report_cmd->add_option("--zones", report.zones, "GeoJSON land-use zones for the overlap table");
  report_cmd->add_option("--label-map", report.label_map, "JSON map of zone codes to labels");
  report_cmd->add_option("--property", report.property, "Feature property holding the land use")
      ->capture_default_str();
  report_cmd->add_option("--definition", report.definition, "pct_of_zone, pct_of_cluster or iou")
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << fmt::format("error: {}: {}\n", to_string(ApiCode::BadRequest), e.what());
    return 2;
  }

  try {
    if (*ingest_cmd) return run_ingest(ingest, out);
    if (*template_cmd) return run_template(tmpl, out);
    if (*classify_cmd) return run_classify(classify, out, err);
    if (*grow_cmd) return run_auto_grow(grow, out);
    if (*validate_cmd) return run_validate(validate, out, err);
    if (*synth_cmd) return run_synth(synth, out);
    if (*serve_cmd) return run_serve(serve, out);
    if (*report_cmd) return run_report(report, out);
  } catch (const Error& e) {
    err << fmt::format("error: {}: {}\n", to_string(api_code_for(e.code())), e.what());
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << fmt::format("error: {}: {}\n", to_string(ApiCode::IoError), e.what());
    return 1;
  } catch (const std::exception& e) {
    err << fmt::format("error: {}: {}\n", to_string(ApiCode::IoError), e.what());
    return 1;
  }
  return 1;
}

}  // namespace landsig::app
