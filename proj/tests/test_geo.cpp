#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "stig/geo.hpp"

using namespace stig;

namespace {

// Reference great-circle distance, written independently of the library:
// atan2 form in long double instead of the asin form in double.
double oracle_haversine_m(double lat1, double lon1, double lat2, double lon2) {
  const long double rad = 0.01745329251994329576923690768488612L;
  const long double p1 = lat1 * rad;
  const long double p2 = lat2 * rad;
  const long double dp = (lat2 - lat1) * rad;
  const long double dl = (lon2 - lon1) * rad;
  const long double a = std::sin(dp / 2) * std::sin(dp / 2) +
                        std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
  const long double c = 2 * std::atan2(std::sqrt(a), std::sqrt(1 - a));
  return static_cast<double>(6371000.0L * c);
}

GridSpec istanbul_spec() {
  GridSpec spec;
  spec.origin_lat = 41.0;
  spec.origin_lon = 29.0;
  spec.cell_size_m = 100.0;
  spec.time_step_s = 1200;
  spec.n_rows = 200;
  spec.n_cols = 200;
  spec.row_offset = -100;
  spec.col_offset = -100;
  return spec;
}

}  // namespace

TEST_CASE("projection maps the origin to zero") {
  const GridSpec spec = istanbul_spec();
  const XY p = project(41.0, 29.0, spec);
  CHECK(p.x == 0.0);
  CHECK(p.y == 0.0);
}

TEST_CASE("projection matches hand-computed spans near the origin") {
  const GridSpec spec = istanbul_spec();

  const XY east = project(41.0, 29.0012, spec);
  CHECK(east.x == doctest::Approx(100.7038).epsilon(1e-4));
  CHECK(east.y == 0.0);
  // The flat projection must sit within 0.1% of the great-circle distance
  // over a ~100 m span.
  const double d_east = oracle_haversine_m(41.0, 29.0, 41.0, 29.0012);
  CHECK(std::abs(east.x - d_east) / d_east < 1e-3);

  const XY north = project(41.0009, 29.0, spec);
  CHECK(north.x == 0.0);
  CHECK(north.y == doctest::Approx(100.0754).epsilon(1e-4));
  const double d_north = oracle_haversine_m(41.0, 29.0, 41.0009, 29.0);
  CHECK(std::abs(north.y - d_north) / d_north < 1e-3);
}

TEST_CASE("projection error stays below 0.5% within metropolitan range") {
  const GridSpec spec = istanbul_spec();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dlat(-0.3, 0.3);
  std::uniform_real_distribution<double> dlon(-0.4, 0.4);
  for (int i = 0; i < 2000; ++i) {
    const double lat = 41.0 + dlat(rng);
    const double lon = 29.0 + dlon(rng);
    const double d = oracle_haversine_m(41.0, 29.0, lat, lon);
    if (d < 1.0 || d > 50000.0) continue;
    const XY p = project(lat, lon, spec);
    const double flat = std::hypot(p.x, p.y);
    CHECK(std::abs(flat - d) / d < 0.005);
  }
}

TEST_CASE("library haversine agrees with the reference formulation") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lat(-60.0, 60.0);
  std::uniform_real_distribution<double> lon(-180.0, 180.0);
  for (int i = 0; i < 2000; ++i) {
    const LatLon a{lat(rng), lon(rng)};
    const LatLon b{a.lat + lat(rng) / 100.0, a.lon + lon(rng) / 100.0};
    const double got = haversine_m(a, b);
    const double want = oracle_haversine_m(a.lat, a.lon, b.lat, b.lon);
    if (want < 1.0) continue;
    CHECK(std::abs(got - want) / want < 1e-9);
  }
}

TEST_CASE("project and unproject round-trip") {
  const GridSpec spec = istanbul_spec();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dlat(-0.1, 0.1);
  std::uniform_real_distribution<double> dlon(-0.1, 0.1);
  for (int i = 0; i < 500; ++i) {
    const double lat = 41.0 + dlat(rng);
    const double lon = 29.0 + dlon(rng);
    const XY p = project(lat, lon, spec);
    const LatLon back = unproject(p.x, p.y, spec);
    CHECK(back.lat == doctest::Approx(lat).epsilon(1e-12));
    CHECK(back.lon == doctest::Approx(lon).epsilon(1e-12));
  }
}

TEST_CASE("projection rejects bad coordinates") {
  const GridSpec spec = istanbul_spec();
  CHECK_THROWS_AS(project(91.0, 0.0, spec), std::invalid_argument);
  CHECK_THROWS_AS(project(0.0, 181.0, spec), std::invalid_argument);
  CHECK_THROWS_AS(project(std::nan(""), 0.0, spec), std::invalid_argument);
}

TEST_CASE("cell binning uses floor semantics") {
  GridSpec spec = istanbul_spec();
  spec.row_offset = 0;
  spec.col_offset = 0;

  CHECK(to_cell(0.0, 0.0, spec) == CellIndex{0, 0});
  CHECK(to_cell(99.999, 0.0, spec) == CellIndex{0, 0});
  // A point exactly on the boundary belongs to the higher cell.
  CHECK(to_cell(100.0, 0.0, spec) == CellIndex{0, 1});
  CHECK(to_cell(0.0, 100.0, spec) == CellIndex{1, 0});
  CHECK_FALSE(to_cell(-50.0, 0.0, spec).has_value());
  CHECK_FALSE(to_cell(0.0, -0.001, spec).has_value());
  CHECK_FALSE(to_cell(spec.n_cols * 100.0, 0.0, spec).has_value());
}

TEST_CASE("cell centers sit within half a diagonal of any point they bin") {
  const GridSpec spec = istanbul_spec();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dlat(-0.05, 0.05);
  std::uniform_real_distribution<double> dlon(-0.05, 0.05);
  const double half_diag = spec.cell_size_m * std::sqrt(2.0) / 2.0;
  for (int i = 0; i < 500; ++i) {
    const double lat = 41.0 + dlat(rng);
    const double lon = 29.0 + dlon(rng);
    const XY p = project(lat, lon, spec);
    const auto cell = to_cell(p.x, p.y, spec);
    REQUIRE(cell.has_value());
    const XY center = cell_center(*cell, spec);
    CHECK(std::hypot(center.x - p.x, center.y - p.y) <= half_diag + 1e-9);
  }
}

TEST_CASE("time index floors and is monotone") {
  const GridSpec spec = istanbul_spec();
  const std::int64_t epoch = 1409518800;
  CHECK(to_time_index(epoch, epoch, spec) == TimeIndex{0});
  CHECK(to_time_index(epoch + 1199, epoch, spec) == TimeIndex{0});
  CHECK(to_time_index(epoch + 1200, epoch, spec) == TimeIndex{1});
  CHECK_THROWS_AS(to_time_index(epoch - 1, epoch, spec), std::invalid_argument);

  std::mt19937_64 rng(13);
  std::uniform_int_distribution<std::int64_t> dt(0, 10'000'000);
  std::int64_t prev_ts = epoch;
  std::int64_t prev_step = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::int64_t ts = epoch + dt(rng);
    const std::int64_t step = to_time_index(ts, epoch, spec).step;
    if (ts >= prev_ts) CHECK(step >= prev_step);
    prev_ts = ts;
    prev_step = step;
  }
}

TEST_CASE("grid_from_bbox pads and anchors offsets") {
  const BoundingBox box{40.99, 28.99, 41.01, 29.01};
  const GridSpec spec = grid_from_bbox(box, 100.0, 1200, 2);
  CHECK(spec.origin_lat == doctest::Approx(41.0));
  CHECK(spec.origin_lon == doctest::Approx(29.0));
  CHECK(spec.n_rows == 28);
  CHECK(spec.n_cols == 22);
  CHECK(spec.row_offset == -14);
  CHECK(spec.col_offset == -11);

  // Every corner of the box lands inside the grid with padding to spare.
  for (const double lat : {box.min_lat, box.max_lat}) {
    for (const double lon : {box.min_lon, box.max_lon}) {
      const auto cell = locate(lat, lon, spec);
      REQUIRE(cell.has_value());
      CHECK(cell->row >= 2);
      CHECK(cell->row < spec.n_rows - 2);
      CHECK(cell->col >= 2);
      CHECK(cell->col < spec.n_cols - 2);
    }
  }
  CHECK_THROWS_AS(grid_from_bbox(box, 100.0, 1200, -1), std::invalid_argument);
  CHECK_THROWS_AS(grid_from_bbox(BoundingBox{41.0, 29.0, 40.0, 29.0}, 100.0, 1200, 0),
                  std::invalid_argument);
}

TEST_CASE("bounding box containment") {
  const BoundingBox box{40.8, 28.5, 41.2, 29.5};
  box.validate();
  CHECK(box.contains(41.0, 29.0));
  CHECK(box.contains(40.8, 28.5));
  CHECK(box.contains(41.2, 29.5));
  CHECK_FALSE(box.contains(41.21, 29.0));
  CHECK_FALSE(box.contains(41.0, 28.49));
}
