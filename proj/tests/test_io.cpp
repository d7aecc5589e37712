#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "stig/config.hpp"
#include "stig/csv.hpp"
#include "stig/exports.hpp"
#include "stig/synthetic.hpp"

using namespace stig;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
  const fs::path dir = fs::temp_directory_path() / "stig_io_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& content) {
  const fs::path path = tmp_dir() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

const char* kEventHeader =
    "customer_id,timestamp,amount,shop_id,online,expense_type,currency,lat,lon\n";

std::chrono::sys_days date(int y, unsigned m, unsigned d) {
  return std::chrono::sys_days{std::chrono::year{y} / m / d};
}

SyntheticScenario tiny_scenario() {
  SyntheticScenario sc;
  sc.name = "tiny";
  sc.bbox = BoundingBox{41.0, 29.0, 41.027, 29.0358};  // roughly 30 x 30 cells
  sc.cell_size_m = 100.0;
  sc.time_step_s = 1200;
  sc.period = DateRange{date(2014, 9, 1), date(2014, 9, 2)};  // two days
  sc.tz_offset_s = 10800;
  sc.mark = MarkSpec{2.0, 1.0, 0.5};
  sc.clusters.push_back(ClusterSpec{1, CellIndex{17, 17}, 2, 10.0, true, {}, 3000.0, 200.0});
  sc.background_rate = 0.5;
  sc.online_rate = 0.3;
  return sc;
}

double ring_shoelace(const nlohmann::json& ring) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const double x0 = ring[i][0].get<double>();
    const double y0 = ring[i][1].get<double>();
    const double x1 = ring[i + 1][0].get<double>();
    const double y1 = ring[i + 1][1].get<double>();
    sum += x0 * y1 - x1 * y0;
  }
  return sum;
}

GridSpec plain_grid(int rows, int cols) {
  GridSpec spec;
  spec.origin_lat = 41.0;
  spec.origin_lon = 29.0;
  spec.cell_size_m = 100.0;
  spec.time_step_s = 1200;
  spec.n_rows = rows;
  spec.n_cols = cols;
  return spec;
}

}  // namespace

TEST_CASE("csv records read quoted fields, CRLF, and embedded newlines") {
  std::istringstream in(
      "a,b,c\r\n"
      "1,\"x,y\",3\n"
      "\"he said \"\"hi\"\"\",\"two\nlines\",\n");
  std::vector<std::string> fields;

  REQUIRE(read_csv_record(in, fields));
  CHECK(fields == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(read_csv_record(in, fields));
  CHECK(fields == std::vector<std::string>{"1", "x,y", "3"});
  REQUIRE(read_csv_record(in, fields));
  CHECK(fields == std::vector<std::string>{"he said \"hi\"", "two\nlines", ""});
  CHECK_FALSE(read_csv_record(in, fields));
}

TEST_CASE("csv escaping quotes only when needed") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
  std::ostringstream out;
  write_csv_record(out, {"a", "b,c", ""});
  CHECK(out.str() == "a,\"b,c\",\n");
}

TEST_CASE("event ingest keeps parseable in-area rows") {
  const fs::path path = write_file(
      "events_ok.csv",
      std::string(kEventHeader) +
          "c1,2014-09-01T10:00:00Z,25.50,s1,false,market,TRY,41.01,29.01\n"
          "c2,2014-09-01T11:00:00Z,60.00,s2,false,clothes,TRY,41.02,29.02\n"
          "c3,2014-09-01T12:00:00+03:00,10.00,s3,false,food,TRY,41.03,29.03\n");
  IngestReport report;
  const auto events = ingest_events(path.string(), EventSchema{},
                                    BoundingBox{40.9, 28.9, 41.1, 29.1}, report);
  REQUIRE(events.size() == 3);
  CHECK(report.rows_read == 3);
  CHECK(report.rows_kept == 3);
  CHECK(report.rejected() == 0);
  CHECK(events[0].customer_id == "c1");
  CHECK(events[0].ts == 1409565600);
  CHECK(events[0].amount == doctest::Approx(25.5));
  CHECK(events[2].ts == 1409562000);  // +03:00 offset applied
  CHECK_FALSE(events[0].online);
}

TEST_CASE("event ingest counts each rejection reason") {
  const fs::path path = write_file(
      "events_bad.csv",
      std::string(kEventHeader) +
          "good,2014-09-01T10:00:00Z,9.99,s1,false,market,TRY,41.01,29.01\n"
          "short,2014-09-01T10:00:00Z,5.0\n"
          "web,2014-09-01T10:05:00Z,5.00,online,true,online,TRY,,\n"
          "when,yesterday,5.00,s1,false,market,TRY,41.01,29.01\n"
          "where,2014-09-01T10:00:00Z,5.00,s1,false,market,TRY,abc,29.01\n"
          "range,2014-09-01T10:00:00Z,5.00,s1,false,market,TRY,95.0,29.01\n"
          "cost,2014-09-01T10:00:00Z,free,s1,false,market,TRY,41.01,29.01\n"
          "far,2014-09-01T10:00:00Z,5.00,s1,false,market,TRY,45.0,29.01\n");
  IngestReport report;
  const auto events = ingest_events(path.string(), EventSchema{},
                                    BoundingBox{40.9, 28.9, 41.1, 29.1}, report);
  CHECK(events.size() == 1);
  CHECK(report.rows_read == 8);
  CHECK(report.rows_kept == 1);
  CHECK(report.bad_row == 2);          // field count, unparseable amount
  CHECK(report.online_excluded == 1);  // online wins over its empty coordinates
  CHECK(report.bad_timestamp == 1);
  CHECK(report.bad_coordinate == 2);   // non-numeric and out-of-range latitude
  CHECK(report.out_of_area == 1);
  CHECK(report.rows_read == report.rows_kept + report.rejected());
}

TEST_CASE("event ingest fails loudly on structural problems") {
  IngestReport report;
  CHECK_THROWS_AS(ingest_events((tmp_dir() / "missing.csv").string(), EventSchema{},
                                std::nullopt, report),
                  std::runtime_error);
  const fs::path path = write_file("events_nohdr.csv",
                                   "customer_id,timestamp,amount\nc1,2014-09-01T10:00:00Z,5\n");
  CHECK_THROWS_AS(ingest_events(path.string(), EventSchema{}, std::nullopt, report),
                  std::runtime_error);
}

TEST_CASE("event serialization is a fixed point after one cycle") {
  const fs::path path = write_file(
      "events_rt.csv",
      std::string(kEventHeader) +
          "c1,2014-09-01T10:00:00Z,25.50,s1,false,market,TRY,41.012345678,29.017654321\n"
          "c2,2014-09-01T11:30:45Z,0.99,s2,false,food,TRY,41.02,29.02\n");
  IngestReport r1;
  const auto events1 = ingest_events(path.string(), EventSchema{}, std::nullopt, r1);
  REQUIRE(events1.size() == 2);

  std::ostringstream s1;
  write_events_csv(s1, events1, EventSchema{});
  const fs::path again = write_file("events_rt2.csv", s1.str());
  IngestReport r2;
  const auto events2 = ingest_events(again.string(), EventSchema{}, std::nullopt, r2);
  REQUIRE(events2.size() == 2);
  std::ostringstream s2;
  write_events_csv(s2, events2, EventSchema{});
  CHECK(s1.str() == s2.str());

  for (std::size_t i = 0; i < events1.size(); ++i) {
    CHECK(events1[i].customer_id == events2[i].customer_id);
    CHECK(events1[i].ts == events2[i].ts);
    CHECK(events1[i].amount == events2[i].amount);
    CHECK(events1[i].lat == events2[i].lat);
    CHECK(events1[i].lon == events2[i].lon);
  }
}

TEST_CASE("profile ingest handles optional fields and rejects bad rows") {
  const fs::path path = write_file(
      "profiles.csv",
      "customer_id,income,age,education,home_lat,home_lon,work_lat,work_lon\n"
      "c1,2500.00,34.0,4,41.01,29.01,41.02,29.02\n"
      "c2,,,0,,,,\n"
      "c3,1000,25,3,41.0,,,\n"
      "c1,900,20,2,,,,\n"
      "c5,900,20,9,,,,\n");
  IngestReport report;
  const auto profiles = ingest_profiles(path.string(), ProfileSchema{}, report);
  REQUIRE(profiles.size() == 2);
  CHECK(report.rows_read == 5);
  CHECK(report.rows_kept == 2);
  CHECK(report.bad_coordinate == 1);  // half an anchor
  CHECK(report.bad_row == 2);         // duplicate id, education out of range

  CHECK(profiles[0].customer_id == "c1");
  REQUIRE(profiles[0].income.has_value());
  CHECK(*profiles[0].income == doctest::Approx(2500.0));
  CHECK(profiles[0].education == 4);
  REQUIRE(profiles[0].home.has_value());
  REQUIRE(profiles[0].work.has_value());

  CHECK(profiles[1].customer_id == "c2");
  CHECK_FALSE(profiles[1].income.has_value());
  CHECK_FALSE(profiles[1].age.has_value());
  CHECK_FALSE(profiles[1].home.has_value());
  CHECK_FALSE(profiles[1].work.has_value());

  std::ostringstream s1;
  write_profiles_csv(s1, profiles, ProfileSchema{});
  const fs::path again = write_file("profiles_rt.csv", s1.str());
  IngestReport r2;
  const auto profiles2 = ingest_profiles(again.string(), ProfileSchema{}, r2);
  REQUIRE(profiles2.size() == 2);
  std::ostringstream s2;
  write_profiles_csv(s2, profiles2, ProfileSchema{});
  CHECK(s1.str() == s2.str());
}

TEST_CASE("flat config parses pairs and rejects unknown or duplicate keys") {
  const FlatConfig cfg = FlatConfig::from_string(
      "# a comment\n"
      "cell_size_m = 100\n"
      "\n"
      "tau_permanent = 0.5\n"
      "tune_tau_permanent = 0.05, 0.5 ,0.95\n"
      "cluster3_rate = 2.5\n"
      "events = data.csv\n");
  CHECK(cfg.has("cell_size_m"));
  CHECK(cfg.get_double("cell_size_m", 0.0) == 100.0);
  CHECK(cfg.get_double("tau_permanent", 0.0) == 0.5);
  CHECK(cfg.get_double_list("tune_tau_permanent") ==
        std::vector<double>{0.05, 0.5, 0.95});
  CHECK(cfg.get_double_list("tune_tau_intermittent").empty());
  CHECK(cfg.get_double("cluster3_rate", 0.0) == 2.5);
  CHECK(cfg.get_string("missing", "fallback") == "fallback");
  CHECK_THROWS_AS(cfg.require_string("missing"), std::invalid_argument);

  CHECK_THROWS_AS(FlatConfig::from_string("not_a_key = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(FlatConfig::from_string("events = a\nevents = b\n"), std::invalid_argument);
  CHECK_THROWS_AS(FlatConfig::from_string("just some text\n"), std::invalid_argument);
}

TEST_CASE("run config applies defaults, validation, and path resolution") {
  const FlatConfig minimal = FlatConfig::from_string(
      "events = events.csv\n"
      "period = 2014-09-01..2014-09-30\n",
      "/data/set1/run.cfg");
  const RunConfig rc = parse_run_config(minimal);
  CHECK(rc.cell_size_m == 100.0);
  CHECK(rc.time_step_s == 1200);
  CHECK(rc.eps_cells == 10.0);
  CHECK(rc.delta_permanent == 0.01);
  CHECK(rc.delta_intermittent == 0.15);
  CHECK(rc.tau_permanent == 0.5);
  CHECK(rc.min_area == 1);
  CHECK(rc.timezone_offset_s == 0);
  CHECK(rc.period.first == date(2014, 9, 1));
  CHECK(rc.period.last == date(2014, 9, 30));
  // Relative paths resolve against the config file's directory.
  CHECK(rc.events_path == "/data/set1/events.csv");
  CHECK(rc.profiles_path.empty());

  const FlatConfig full = FlatConfig::from_string(
      "events = /abs/events.csv\n"
      "profiles = p.csv\n"
      "period = 2014-09-01..2014-09-30\n"
      "timezone_offset = +03:00\n"
      "bbox = 40.8,28.5,41.2,29.5\n"
      "col_lat = latitude\n",
      "/data/set1/run.cfg");
  const RunConfig rc2 = parse_run_config(full);
  CHECK(rc2.events_path == "/abs/events.csv");
  CHECK(rc2.profiles_path == "/data/set1/p.csv");
  CHECK(rc2.timezone_offset_s == 10800);
  REQUIRE(rc2.bbox.has_value());
  CHECK(rc2.bbox->min_lat == 40.8);
  CHECK(rc2.event_schema.lat == "latitude");

  CHECK_THROWS_AS(parse_run_config(FlatConfig::from_string(
                      "events = e.csv\nperiod = 2014-09-01..2014-09-30\ntau_permanent = 1.2\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_run_config(FlatConfig::from_string(
                      "events = e.csv\nperiod = 2014-09-30..2014-09-01\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_run_config(FlatConfig::from_string(
                      "period = 2014-09-01..2014-09-30\n")),
                  std::invalid_argument);
}

TEST_CASE("timezone, bbox, and period parse and format") {
  CHECK(parse_tz_offset("+03:00") == 10800);
  CHECK(parse_tz_offset("-05:30") == -19800);
  CHECK(parse_tz_offset("3600") == 3600);
  CHECK(format_tz_offset(10800) == "+03:00");
  CHECK(format_tz_offset(-19800) == "-05:30");
  CHECK_THROWS_AS(parse_tz_offset("+15:00"), std::invalid_argument);
  CHECK_THROWS_AS(parse_tz_offset("noon"), std::invalid_argument);

  const BoundingBox box = parse_bbox("40.8,28.5,41.2,29.5");
  CHECK(box.min_lat == 40.8);
  CHECK(box.max_lon == 29.5);
  CHECK_THROWS_AS(parse_bbox("40.8,28.5,41.2"), std::invalid_argument);
  CHECK(parse_bbox(format_bbox(box)).min_lon == box.min_lon);

  const DateRange range = parse_period("2014-09-01..2014-09-30");
  CHECK(range.first == date(2014, 9, 1));
  CHECK(range.last == date(2014, 9, 30));
  CHECK(format_period(range) == "2014-09-01..2014-09-30");
  CHECK_THROWS_AS(parse_period("2014-09-01"), std::invalid_argument);
}

TEST_CASE("schedules parse and format canonically") {
  const auto tuples = parse_schedule("weekday:0-5,7;weekend:11");
  CHECK(tuples.size() == 8);
  CHECK(std::count_if(tuples.begin(), tuples.end(), [](const TemporalTuple& t) {
          return t.day_type == DayType::kWeekend;
        }) == 1);

  const std::string text = format_schedule(false, tuples);
  CHECK(parse_schedule(text) == tuples);
  CHECK(format_schedule(true, {}) == "always");
  CHECK_THROWS_AS(parse_schedule("monday:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_schedule("weekday:12"), std::invalid_argument);
}

TEST_CASE("scenario parsing maps cluster coordinates onto the padded grid") {
  const FlatConfig cfg = FlatConfig::from_string(
      "scenario = demo\n"
      "bbox = 41.0,29.0,41.027,29.0358\n"
      "period = 2014-09-01..2014-09-02\n"
      "eps_cells = 2\n"
      "cluster1_row = 15\n"
      "cluster1_col = 14\n"
      "cluster1_radius_cells = 2\n"
      "cluster1_rate = 10\n"
      "cluster2_row = 5\n"
      "cluster2_col = 20\n"
      "cluster2_radius_cells = 1\n"
      "cluster2_rate = 4\n"
      "cluster2_schedule = weekend:10-11\n"
      "background_rate = 0.5\n");
  const SyntheticScenario sc = parse_scenario(cfg);
  REQUIRE(sc.clusters.size() == 2);
  // eps 2 pads the grid by 2 cells; scenario coordinates are box-relative.
  CHECK(sc.clusters[0].center == CellIndex{17, 16});
  CHECK(sc.clusters[0].always_on);
  CHECK_FALSE(sc.clusters[1].always_on);
  CHECK(sc.clusters[1].schedule.size() == 2);
  CHECK(sc.grid().n_rows >= 30);

  // A cluster leaking outside the box must be rejected.
  const FlatConfig outside = FlatConfig::from_string(
      "scenario = demo\n"
      "bbox = 41.0,29.0,41.027,29.0358\n"
      "period = 2014-09-01..2014-09-02\n"
      "eps_cells = 2\n"
      "cluster1_row = 0\n"
      "cluster1_col = 14\n"
      "cluster1_radius_cells = 2\n"
      "cluster1_rate = 10\n");
  CHECK_THROWS_AS(parse_scenario(outside), std::invalid_argument);
}

TEST_CASE("generator is deterministic for a fixed seed") {
  const SyntheticScenario sc = tiny_scenario();
  const GeneratedData a = generate_synthetic(sc, 7);
  const GeneratedData b = generate_synthetic(sc, 7);

  std::ostringstream ea, eb, pa, pb, ga, gb;
  write_events_csv(ea, a.events, EventSchema{});
  write_events_csv(eb, b.events, EventSchema{});
  write_profiles_csv(pa, a.profiles, ProfileSchema{});
  write_profiles_csv(pb, b.profiles, ProfileSchema{});
  write_ground_truth_json(ga, a.truth);
  write_ground_truth_json(gb, b.truth);
  CHECK(ea.str() == eb.str());
  CHECK(pa.str() == pb.str());
  CHECK(ga.str() == gb.str());

  // Timestamps ascend and the per-source counters reconcile.
  for (std::size_t i = 1; i < a.events.size(); ++i) {
    CHECK(a.events[i - 1].ts <= a.events[i].ts);
  }
  CHECK(a.cluster_events + a.background_events + a.online_events ==
        static_cast<std::int64_t>(a.events.size()));
  CHECK_FALSE(a.profiles.empty());
}

TEST_CASE("generated event volumes stay within three sigma of the rates") {
  const SyntheticScenario sc = tiny_scenario();
  const GeneratedData data = generate_synthetic(sc, 99);
  const double steps = 2.0 * 72.0;

  const double cluster_mean = 10.0 * steps;
  CHECK(std::abs(data.cluster_events - cluster_mean) <= 3.0 * std::sqrt(cluster_mean));
  const double bg_mean = 0.5 * steps;
  CHECK(std::abs(data.background_events - bg_mean) <= 3.0 * std::sqrt(bg_mean));
  const double online_mean = 0.3 * steps;
  CHECK(std::abs(data.online_events - online_mean) <= 3.0 * std::sqrt(online_mean));

  // Online rows carry no usable coordinates and are flagged.
  for (const Event& ev : data.events) {
    if (ev.online) {
      CHECK(ev.shop_id == "online");
    }
  }
}

TEST_CASE("zero rates generate no events") {
  SyntheticScenario sc = tiny_scenario();
  sc.clusters.clear();
  sc.background_rate = 0.0;
  sc.online_rate = 0.0;
  const GeneratedData data = generate_synthetic(sc, 1);
  CHECK(data.events.empty());
}

TEST_CASE("ground truth serializes and parses losslessly") {
  const SyntheticScenario sc = tiny_scenario();
  const GeneratedData data = generate_synthetic(sc, 3);
  REQUIRE(data.truth.clusters.size() == 1);
  const GroundTruthCluster& cl = data.truth.clusters[0];
  CHECK(cl.always_on);
  CHECK_FALSE(cl.cells.empty());
  CHECK(std::find(cl.cells.begin(), cl.cells.end(), cl.center) != cl.cells.end());

  std::ostringstream out;
  write_ground_truth_json(out, data.truth);
  std::istringstream in(out.str());
  const GroundTruth back = read_ground_truth_json(in);
  CHECK(back.grid.n_rows == data.truth.grid.n_rows);
  CHECK(back.grid.origin_lat == data.truth.grid.origin_lat);
  CHECK(back.tau_permanent == data.truth.tau_permanent);
  REQUIRE(back.clusters.size() == 1);
  CHECK(back.clusters[0].center == cl.center);
  CHECK(back.clusters[0].cells == cl.cells);
  CHECK(back.clusters[0].always_on == cl.always_on);
}

TEST_CASE("empty region list exports an empty feature collection") {
  std::ostringstream out;
  write_mask_geojson(out, {}, plain_grid(8, 8));
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["type"] == "FeatureCollection");
  CHECK(j["features"].empty());
}

TEST_CASE("single cell exports one closed counterclockwise square") {
  const GridSpec grid = plain_grid(8, 8);
  std::vector<Region> regions;
  regions.push_back(Region{1, {CellIndex{2, 3}}});

  std::ostringstream out;
  write_mask_geojson(out, regions, grid);
  const auto j = nlohmann::json::parse(out.str());
  REQUIRE(j["features"].size() == 1);
  const auto& feature = j["features"][0];
  CHECK(feature["properties"]["region"] == 1);
  CHECK(feature["properties"]["area_cells"] == 1);
  CHECK(feature["geometry"]["type"] == "Polygon");
  const auto& rings = feature["geometry"]["coordinates"];
  REQUIRE(rings.size() == 1);
  const auto& ring = rings[0];
  REQUIRE(ring.size() == 5);
  CHECK(ring[0] == ring[4]);
  CHECK(ring_shoelace(ring) > 0.0);  // counterclockwise shell

  // The four distinct corners are the back-projected cell corners.
  for (const auto cr : {std::pair{0, 0}, {0, 1}, {1, 0}, {1, 1}}) {
    const XY corner = cell_corner(CellIndex{2, 3}, cr.first, cr.second, grid);
    const LatLon p = unproject(corner.x, corner.y, grid);
    bool found = false;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
      if (std::abs(ring[i][0].get<double>() - p.lon) < 1e-9 &&
          std::abs(ring[i][1].get<double>() - p.lat) < 1e-9) {
        found = true;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("a ring of cells exports a shell with a clockwise hole") {
  std::vector<CellIndex> cells;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (!(r == 1 && c == 1)) cells.push_back({r, c});
    }
  }
  std::vector<Region> regions;
  regions.push_back(Region{1, cells});

  std::ostringstream out;
  write_mask_geojson(out, regions, plain_grid(8, 8));
  const auto j = nlohmann::json::parse(out.str());
  REQUIRE(j["features"].size() == 1);
  const auto& geometry = j["features"][0]["geometry"];
  CHECK(geometry["type"] == "Polygon");
  REQUIRE(geometry["coordinates"].size() == 2);
  // Cell edges are not merged when collinear: 12 unit edges around the 3x3
  // outline plus the closing point, 4 plus closing around the 1x1 hole.
  CHECK(geometry["coordinates"][0].size() == 13);
  CHECK(geometry["coordinates"][1].size() == 5);
  CHECK(ring_shoelace(geometry["coordinates"][0]) > 0.0);
  CHECK(ring_shoelace(geometry["coordinates"][1]) < 0.0);
}

TEST_CASE("cells touching only at a corner become a multipolygon") {
  std::vector<Region> regions;
  regions.push_back(Region{1, {CellIndex{0, 0}, CellIndex{1, 1}}});
  std::ostringstream out;
  write_mask_geojson(out, regions, plain_grid(8, 8));
  const auto j = nlohmann::json::parse(out.str());
  const auto& geometry = j["features"][0]["geometry"];
  CHECK(geometry["type"] == "MultiPolygon");
  REQUIRE(geometry["coordinates"].size() == 2);
  for (const auto& polygon : geometry["coordinates"]) {
    REQUIRE(polygon.size() == 1);
    CHECK(polygon[0].size() == 5);
    CHECK(ring_shoelace(polygon[0]) > 0.0);
  }
}

TEST_CASE("mask csv lists region, row, col per cell") {
  std::vector<Region> regions;
  regions.push_back(Region{1, {CellIndex{0, 1}, CellIndex{0, 2}}});
  regions.push_back(Region{2, {CellIndex{4, 4}}});
  std::ostringstream out;
  write_mask_csv(out, regions);
  CHECK(out.str() == "region,row,col\n1,0,1\n1,0,2\n2,4,4\n");
}

TEST_CASE("similarity matrix csv round-trips exactly") {
  SimilarityMatrix m;
  m.labels.push_back(OccurrenceKey{date(2014, 9, 1), 0});
  m.labels.push_back(OccurrenceKey{date(2014, 9, 1), 11});
  m.labels.push_back(OccurrenceKey{date(2014, 9, 14), 3});
  const double third = 1.0 / 3.0;
  m.values = {1.0, third, 0.0, third, 1.0, 0.1234567890123, 0.0, 0.1234567890123, 1.0};

  std::ostringstream out;
  write_matrix_csv(out, m);
  const std::string text = out.str();
  CHECK(text.substr(0, text.find('\n')) ==
        "label,2014-09-01#00,2014-09-01#11,2014-09-14#03");

  std::istringstream in(text);
  const SimilarityMatrix back = read_matrix_csv(in);
  REQUIRE(back.size() == 3);
  CHECK(back.labels == m.labels);
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    CHECK(back.values[i] == m.values[i]);  // bit-exact via shortest round-trip
  }

  std::istringstream junk("label,x\nno\n");
  CHECK_THROWS(read_matrix_csv(junk));
}

TEST_CASE("occurrence labels format and parse") {
  const OccurrenceKey key{date(2014, 9, 6), 3};
  CHECK(occurrence_label(key) == "2014-09-06#03");
  CHECK(parse_occurrence_label("2014-09-06#03") == key);
  CHECK(occurrence_label(OccurrenceKey{date(2014, 9, 6), 11}) == "2014-09-06#11");
  CHECK_THROWS_AS(parse_occurrence_label("2014-09-06"), std::invalid_argument);
  CHECK_THROWS_AS(parse_occurrence_label("2014-09-06#striped"), std::invalid_argument);
}

TEST_CASE("heatmap csv lists nonzero cells with exact decimals") {
  TrailField trail(plain_grid(2, 3));
  trail.at(0, 0) = to_trail_units(1.0);
  trail.at(1, 2) = to_trail_units(0.29);
  std::ostringstream out;
  write_heatmap_csv(out, trail);
  CHECK(out.str() == "row,col,value\n0,0,1\n1,2,0.29\n");
}

TEST_CASE("pgm heatmap scales to the snapshot maximum") {
  TrailField trail(plain_grid(2, 3));
  trail.at(0, 0) = to_trail_units(1.0);
  trail.at(1, 2) = to_trail_units(0.5);
  std::ostringstream out;
  write_heatmap_pgm(out, trail);
  const std::string bytes = out.str();

  const std::string header = "P5\n3 2\n65535\n";
  REQUIRE(bytes.substr(0, header.size()) == header);
  REQUIRE(bytes.size() == header.size() + 12);
  const auto sample = [&](int image_row, int col) {
    const std::size_t off = header.size() + (static_cast<std::size_t>(image_row) * 3 + col) * 2;
    return (static_cast<unsigned>(static_cast<unsigned char>(bytes[off])) << 8) |
           static_cast<unsigned>(static_cast<unsigned char>(bytes[off + 1]));
  };
  // Image row 0 is the northernmost grid row (grid row 1).
  CHECK(sample(0, 2) == 32768);
  CHECK(sample(1, 0) == 65535);
  CHECK(sample(0, 0) == 0);
  CHECK(sample(1, 1) == 0);

  // All-zero field: all-zero samples.
  TrailField zero(plain_grid(2, 3));
  std::ostringstream zout;
  write_heatmap_pgm(zout, zero);
  const std::string zbytes = zout.str();
  REQUIRE(zbytes.size() == header.size() + 12);
  for (std::size_t i = header.size(); i < zbytes.size(); ++i) {
    CHECK(zbytes[i] == '\0');
  }
}
