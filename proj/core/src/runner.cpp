#include "stig/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include "json.hpp"
#include "stig/behavior.hpp"
#include "stig/calendar.hpp"
#include "stig/exports.hpp"
#include "stig/synthetic.hpp"
#include "stig/trail.hpp"

namespace stig {

namespace fs = std::filesystem;
namespace chrono = std::chrono;

namespace {

class StageTimer {
 public:
  void start(const std::string& stage) {
    stage_ = stage;
    begin_ = chrono::steady_clock::now();
  }

  void stop() {
    const auto end = chrono::steady_clock::now();
    ms_[stage_] += chrono::duration<double, std::milli>(end - begin_).count();
  }

  // Thread count lives here, not in the manifest: everything outside
  // timings.json must be byte-identical across worker counts.
  void write(const fs::path& path, int threads) const {
    nlohmann::ordered_json j;
    j["threads"] = threads;
    for (const auto& [stage, ms] : ms_) j["stage_ms"][stage] = ms;
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << '\n';
  }

 private:
  std::map<std::string, double> ms_;
  std::string stage_;
  chrono::steady_clock::time_point begin_;
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

int resolved_pad(const RunConfig& rc) {
  return rc.grid_pad_cells >= 0 ? rc.grid_pad_cells
                                : static_cast<int>(std::ceil(rc.eps_cells));
}

/// Grid from the configured box, or from the data extent when absent.
GridSpec resolve_grid(const RunConfig& rc, const std::vector<Event>& events,
                      std::vector<std::string>& warnings) {
  if (rc.bbox) return grid_from_bbox(*rc.bbox, rc.cell_size_m, rc.time_step_s, resolved_pad(rc));
  if (events.empty()) {
    warnings.push_back("no events and no bbox; using a degenerate 1x1 grid");
    return grid_from_bbox(BoundingBox{0.0, 0.0, 0.0, 0.0}, rc.cell_size_m, rc.time_step_s, 0);
  }
  BoundingBox box{events.front().lat, events.front().lon, events.front().lat,
                  events.front().lon};
  for (const Event& ev : events) {
    box.min_lat = std::min(box.min_lat, ev.lat);
    box.max_lat = std::max(box.max_lat, ev.lat);
    box.min_lon = std::min(box.min_lon, ev.lon);
    box.max_lon = std::max(box.max_lon, ev.lon);
  }
  return grid_from_bbox(box, rc.cell_size_m, rc.time_step_s, resolved_pad(rc));
}

AnalysisConfig make_analysis_config(const RunConfig& rc, const GridSpec& grid, int threads) {
  AnalysisConfig cfg;
  cfg.grid = grid;
  cfg.mark = MarkSpec{rc.eps_cells, rc.intensity, rc.top_radius_frac};
  cfg.evap_permanent = EvaporationSpec{rc.delta_permanent};
  cfg.evap_intermittent = EvaporationSpec{rc.delta_intermittent};
  cfg.tau_permanent = ThresholdSpec{rc.tau_permanent, rc.min_area};
  cfg.tau_intermittent = ThresholdSpec{rc.tau_intermittent, rc.min_area};
  cfg.period_start = rc.period.first;
  cfg.period_end = rc.period.last + chrono::days{1};
  cfg.tz_offset_s = rc.timezone_offset_s;
  cfg.threads = threads;
  cfg.matrix_pre_removal = rc.matrix_pre_removal;
  cfg.objective_contrast = rc.objective_contrast;
  cfg.validate();
  return cfg;
}

nlohmann::ordered_json grid_json(const GridSpec& g) {
  return {{"origin_lat", g.origin_lat}, {"origin_lon", g.origin_lon},
          {"cell_size_m", g.cell_size_m}, {"n_rows", g.n_rows},
          {"n_cols", g.n_cols},          {"time_step_s", g.time_step_s},
          {"row_offset", g.row_offset},  {"col_offset", g.col_offset}};
}

nlohmann::ordered_json ingest_json(const IngestReport& r) {
  return {{"rows_read", r.rows_read},
          {"rows_kept", r.rows_kept},
          {"bad_row", r.bad_row},
          {"bad_timestamp", r.bad_timestamp},
          {"bad_coordinate", r.bad_coordinate},
          {"out_of_area", r.out_of_area},
          {"online_excluded", r.online_excluded}};
}

nlohmann::ordered_json config_echo(const FlatConfig& cfg) {
  nlohmann::ordered_json j;
  for (const auto& [key, value] : cfg.raw()) j[key] = value;
  return j;
}

struct LoadedEvents {
  std::vector<Event> events;
  IngestReport report;
};

LoadedEvents load_events(const RunConfig& rc) {
  LoadedEvents loaded;
  loaded.events = ingest_events(rc.events_path, rc.event_schema, rc.bbox, loaded.report);
  return loaded;
}

}  // namespace

RunArtifacts run_pipeline(const FlatConfig& cfg, const std::string& out_dir,
                          int threads_override) {
  const RunConfig rc = parse_run_config(cfg);
  const int threads = threads_override > 0 ? threads_override : rc.threads;
  fs::create_directories(out_dir);
  const fs::path out(out_dir);
  StageTimer timer;
  RunArtifacts art;

  timer.start("ingest");
  LoadedEvents loaded = load_events(rc);
  art.ingest = loaded.report;
  if (loaded.events.empty()) {
    art.warnings.push_back("no usable events; all outputs are empty");
  }
  art.grid = resolve_grid(rc, loaded.events, art.warnings);
  const AnalysisConfig acfg = make_analysis_config(rc, art.grid, threads);

  std::vector<GridEvent> grid_events;
  std::vector<BehaviorEvent> behavior_events;
  grid_events.reserve(loaded.events.size());
  behavior_events.reserve(loaded.events.size());
  for (const Event& ev : loaded.events) {
    const std::optional<CellIndex> cell = locate(ev.lat, ev.lon, art.grid);
    if (!cell) {
      ++art.events_outside_grid;
      continue;
    }
    grid_events.push_back(GridEvent{ev.ts, *cell, -1});
    behavior_events.push_back(BehaviorEvent{ev.ts, *cell, ev.customer_id,
                                            LatLon{ev.lat, ev.lon}});
  }
  timer.stop();

  timer.start("permanent");
  const PermanentResult permanent = detect_permanent(grid_events, acfg);
  art.events_used = permanent.events_used;
  art.events_outside_period = permanent.events_outside_period;
  art.permanent_regions = static_cast<int>(permanent.hotspots.regions.size());
  for (const std::string& w : permanent.warnings) art.warnings.push_back(w);
  timer.stop();

  timer.start("removal");
  const std::vector<GridEvent> residual =
      remove_in_mask(grid_events, permanent.hotspots.mask, &art.events_removed_in_permanent);
  timer.stop();

  timer.start("intermittent");
  const std::vector<Occurrence> occurrences = detect_intermittent(residual, acfg);
  art.occurrences = static_cast<std::int64_t>(occurrences.size());
  for (const Occurrence& occ : occurrences) {
    if (!occ.hotspots.mask.empty()) ++art.nonempty_occurrences;
  }
  timer.stop();

  timer.start("matrix");
  SimilarityMatrix matrix;
  if (rc.matrix_pre_removal) {
    const std::vector<Occurrence> pre = detect_intermittent(grid_events, acfg);
    matrix = similarity_matrix(pre);
  } else {
    matrix = similarity_matrix(occurrences);
  }
  timer.stop();

  timer.start("summary");
  const IntermittentSummary summary =
      summarize_intermittent(occurrences, rc.min_area, art.grid.n_rows, art.grid.n_cols);
  art.intermittent_regions = static_cast<int>(summary.regions.size());
  timer.stop();

  timer.start("exports");
  {
    auto f = open_out(out / "permanent_mask.csv");
    write_mask_csv(f, permanent.hotspots.regions);
  }
  {
    auto f = open_out(out / "permanent_mask.geojson");
    write_mask_geojson(f, permanent.hotspots.regions, art.grid);
  }
  {
    auto f = open_out(out / "intermittent_regions.csv");
    write_mask_csv(f, summary.regions);
  }
  {
    auto f = open_out(out / "intermittent_regions.geojson");
    write_mask_geojson(f, summary.regions, art.grid);
  }
  {
    auto f = open_out(out / "matrix.csv");
    write_matrix_csv(f, matrix);
  }
  {
    auto f = open_out(out / "occurrences.csv");
    f << "date,slot,day_type,regions,cells\n";
    for (const Occurrence& occ : occurrences) {
      f << format_date(occ.key.date) << ',' << occ.key.slot << ','
        << day_type_name(occ.tuple.day_type) << ',' << occ.hotspots.regions.size() << ','
        << occ.hotspots.mask.count() << '\n';
    }
  }
  if (rc.export_occurrence_masks) {
    const fs::path occ_dir = out / "occurrence_masks";
    fs::create_directories(occ_dir);
    for (const Occurrence& occ : occurrences) {
      if (occ.hotspots.mask.empty()) continue;
      char name[32];
      std::snprintf(name, sizeof(name), "occ_%s_%02d", format_date(occ.key.date).c_str(),
                    occ.key.slot);
      auto f = open_out(occ_dir / (std::string(name) + ".geojson"));
      write_mask_geojson(f, occ.hotspots.regions, art.grid);
    }
  }
  if (rc.export_daily_heatmaps) {
    const fs::path day_dir = out / "daily_trails";
    fs::create_directories(day_dir);
    const int spd = acfg.steps_per_day();
    std::vector<std::vector<DepositEvent>> per_day(permanent.dates.size());
    for (const GridEvent& ev : grid_events) {
      const std::int64_t step = acfg.step_of(ev.ts);
      if (step < 0 || step >= static_cast<std::int64_t>(per_day.size()) * spd) continue;
      per_day[static_cast<std::size_t>(step / spd)].push_back({TimeIndex{step}, ev.cell});
    }
    for (std::size_t d = 0; d < per_day.size(); ++d) {
      const TimeIndex begin{static_cast<std::int64_t>(d) * spd};
      const TrailField trail = run_trail(per_day[d], begin, TimeIndex{begin.step + spd},
                                         art.grid, acfg.mark, acfg.evap_permanent);
      const std::string stem = "trail_" + format_date(permanent.dates[d]);
      {
        auto f = open_out(day_dir / (stem + ".csv"));
        write_heatmap_csv(f, trail);
      }
      if (rc.heatmap_pgm) {
        auto f = open_out(day_dir / (stem + ".pgm"));
        write_heatmap_pgm(f, trail);
      }
    }
  }

  if (!rc.profiles_path.empty()) {
    const std::vector<CustomerProfile> profiles =
        ingest_profiles(rc.profiles_path, rc.profile_schema, art.profile_ingest);
    const PopulationReport report = hotspot_population_report(
        behavior_events, profiles, permanent.hotspots.mask, occurrences, rc.timezone_offset_s);
    auto f = open_out(out / "report.json");
    write_population_report_json(f, report);
  }
  timer.stop();

  nlohmann::ordered_json manifest;
  manifest["kind"] = "run";
  manifest["config"] = config_echo(cfg);
  manifest["grid"] = grid_json(art.grid);
  manifest["ingest"] = ingest_json(art.ingest);
  if (!rc.profiles_path.empty()) manifest["profile_ingest"] = ingest_json(art.profile_ingest);
  manifest["events"] = {{"used", art.events_used},
                        {"outside_period", art.events_outside_period},
                        {"outside_grid", art.events_outside_grid},
                        {"removed_in_permanent", art.events_removed_in_permanent}};
  nlohmann::ordered_json permanent_regions = nlohmann::ordered_json::array();
  for (const Region& region : permanent.hotspots.regions) {
    permanent_regions.push_back(
        {{"label", region.label}, {"area_cells", static_cast<int>(region.cells.size())}});
  }
  manifest["permanent"] = {{"regions", art.permanent_regions},
                           {"region_list", std::move(permanent_regions)}};
  nlohmann::ordered_json intermittent_regions = nlohmann::ordered_json::array();
  for (const Region& region : summary.regions) {
    intermittent_regions.push_back(
        {{"label", region.label}, {"area_cells", static_cast<int>(region.cells.size())}});
  }
  manifest["intermittent"] = {{"occurrences", art.occurrences},
                              {"nonempty_occurrences", art.nonempty_occurrences},
                              {"distinct_regions", art.intermittent_regions},
                              {"region_list", std::move(intermittent_regions)}};
  manifest["warnings"] = art.warnings;
  {
    auto f = open_out(out / "manifest.json");
    f << manifest.dump(2) << '\n';
  }
  timer.write(out / "timings.json", threads);
  return art;
}

TuneResult run_tune(const FlatConfig& cfg, const std::string& out_dir, int threads_override) {
  const RunConfig rc = parse_run_config(cfg);
  const int threads = threads_override > 0 ? threads_override : rc.threads;
  fs::create_directories(out_dir);
  const fs::path out(out_dir);

  LoadedEvents loaded = load_events(rc);
  std::vector<std::string> warnings;
  const GridSpec grid = resolve_grid(rc, loaded.events, warnings);
  const AnalysisConfig acfg = make_analysis_config(rc, grid, threads);

  std::vector<GridEvent> grid_events;
  grid_events.reserve(loaded.events.size());
  for (const Event& ev : loaded.events) {
    if (const std::optional<CellIndex> cell = locate(ev.lat, ev.lon, grid)) {
      grid_events.push_back(GridEvent{ev.ts, *cell, -1});
    }
  }

  static const double kDefaultTaus[] = {0.05, 0.3, 0.5, 0.7, 0.95};
  std::vector<double> taus_p = rc.tune_tau_permanent;
  std::vector<double> taus_i = rc.tune_tau_intermittent;
  if (taus_p.empty()) taus_p.assign(std::begin(kDefaultTaus), std::end(kDefaultTaus));
  if (taus_i.empty()) taus_i.assign(std::begin(kDefaultTaus), std::end(kDefaultTaus));
  std::vector<TuneCandidate> candidates;
  for (const double tp : taus_p) {
    for (const double ti : taus_i) candidates.push_back(TuneCandidate{tp, ti});
  }

  const TuneResult result = tune_thresholds(grid_events, acfg, candidates);

  {
    auto f = open_out(out / "tuning.csv");
    f << "tau_permanent,tau_intermittent,objective,permanent_regions,intermittent_regions\n";
    char buf[64];
    for (const TuneEntry& e : result.table) {
      std::snprintf(buf, sizeof(buf), "%g,%g,%.9f,%d,%d\n", e.candidate.tau_permanent,
                    e.candidate.tau_intermittent, e.objective, e.permanent_regions,
                    e.intermittent_regions);
      f << buf;
    }
  }
  nlohmann::ordered_json manifest;
  manifest["kind"] = "tune";
  manifest["config"] = config_echo(cfg);
  manifest["grid"] = grid_json(grid);
  manifest["ingest"] = ingest_json(loaded.report);
  manifest["best"] = {{"tau_permanent", result.best.tau_permanent},
                      {"tau_intermittent", result.best.tau_intermittent}};
  manifest["warnings"] = warnings;
  {
    auto f = open_out(out / "manifest.json");
    f << manifest.dump(2) << '\n';
  }
  return result;
}

void run_generate(const FlatConfig& cfg, std::uint64_t seed, const std::string& out_dir) {
  const SyntheticScenario scenario = parse_scenario(cfg);
  const GeneratedData data = generate_synthetic(scenario, seed);
  fs::create_directories(out_dir);
  const fs::path out(out_dir);

  {
    auto f = open_out(out / "events.csv");
    write_events_csv(f, data.events, EventSchema{});
  }
  {
    auto f = open_out(out / "profiles.csv");
    write_profiles_csv(f, data.profiles, ProfileSchema{});
  }
  {
    auto f = open_out(out / "ground_truth.json");
    write_ground_truth_json(f, data.truth);
  }
  {
    // Analysis keys only, rewired to the generated files; ready for `run`.
    auto f = open_out(out / "run.cfg");
    f << "# generated scenario '" << scenario.name << "', seed " << seed << "\n";
    for (const auto& [key, value] : cfg.raw()) {
      if (is_scenario_key(key) || key == "events" || key == "profiles") continue;
      f << key << " = " << value << "\n";
    }
    f << "events = events.csv\nprofiles = profiles.csv\n";
  }
  nlohmann::ordered_json manifest;
  manifest["kind"] = "generate";
  manifest["scenario"] = scenario.name;
  manifest["seed"] = seed;
  manifest["config"] = config_echo(cfg);
  manifest["grid"] = grid_json(data.truth.grid);
  manifest["users"] = static_cast<std::int64_t>(data.profiles.size());
  manifest["events"] = {{"total", static_cast<std::int64_t>(data.events.size())},
                        {"cluster", data.cluster_events},
                        {"background", data.background_events},
                        {"online", data.online_events}};
  {
    auto f = open_out(out / "manifest.json");
    f << manifest.dump(2) << '\n';
  }
}

IngestReport run_ingest(const FlatConfig& cfg, const std::string& out_dir) {
  const RunConfig rc = parse_run_config(cfg);
  IngestReport report;
  ingest_events(rc.events_path, rc.event_schema, rc.bbox, report);
  IngestReport profile_report;
  if (!rc.profiles_path.empty()) {
    ingest_profiles(rc.profiles_path, rc.profile_schema, profile_report);
  }
  fs::create_directories(out_dir);
  nlohmann::ordered_json j;
  j["kind"] = "ingest";
  j["config"] = config_echo(cfg);
  j["ingest"] = ingest_json(report);
  if (!rc.profiles_path.empty()) j["profile_ingest"] = ingest_json(profile_report);
  auto f = open_out(fs::path(out_dir) / "ingest_report.json");
  f << j.dump(2) << '\n';
  return report;
}

void run_export(const FlatConfig& cfg, const std::string& out_dir) {
  const RunConfig rc = parse_run_config(cfg);
  fs::create_directories(out_dir);
  const fs::path out(out_dir);

  LoadedEvents loaded = load_events(rc);
  std::vector<std::string> warnings;
  const GridSpec grid = resolve_grid(rc, loaded.events, warnings);
  const AnalysisConfig acfg = make_analysis_config(rc, grid, 1);

  std::vector<DepositEvent> deposits;
  deposits.reserve(loaded.events.size());
  const std::int64_t total_steps =
      static_cast<std::int64_t>(acfg.n_days()) * acfg.steps_per_day();
  for (const Event& ev : loaded.events) {
    const std::optional<CellIndex> cell = locate(ev.lat, ev.lon, grid);
    if (!cell) continue;
    const std::int64_t step = acfg.step_of(ev.ts);
    if (step < 0 || step >= total_steps) continue;
    deposits.push_back(DepositEvent{TimeIndex{step}, *cell});
  }
  const TrailField trail = run_trail(deposits, TimeIndex{0}, TimeIndex{total_steps}, grid,
                                     acfg.mark, acfg.evap_permanent);
  {
    auto f = open_out(out / "heatmap.csv");
    write_heatmap_csv(f, trail);
  }
  if (rc.heatmap_pgm) {
    auto f = open_out(out / "heatmap.pgm");
    write_heatmap_pgm(f, trail);
  }
  nlohmann::ordered_json manifest;
  manifest["kind"] = "export";
  manifest["config"] = config_echo(cfg);
  manifest["grid"] = grid_json(grid);
  manifest["ingest"] = ingest_json(loaded.report);
  manifest["warnings"] = warnings;
  auto f = open_out(out / "manifest.json");
  f << manifest.dump(2) << '\n';
}

}  // namespace stig
