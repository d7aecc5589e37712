#include "stig/geo.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace stig {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double deg2rad(double deg) { return deg * (kPi / 180.0); }
double rad2deg(double rad) { return rad * (180.0 / kPi); }

void check_coordinate(double lat, double lon) {
  if (!std::isfinite(lat) || !std::isfinite(lon)) {
    throw std::invalid_argument("coordinate is not finite");
  }
  if (lat < -90.0 || lat > 90.0) {
    throw std::invalid_argument("latitude out of range: " + std::to_string(lat));
  }
  if (lon < -180.0 || lon > 180.0) {
    throw std::invalid_argument("longitude out of range: " + std::to_string(lon));
  }
}

}  // namespace

void GridSpec::validate() const {
  if (!(cell_size_m > 0.0)) throw std::invalid_argument("cell_size_m must be > 0");
  if (time_step_s <= 0) throw std::invalid_argument("time_step_s must be > 0");
  if (n_rows < 1 || n_cols < 1) throw std::invalid_argument("grid must have at least one cell");
  check_coordinate(origin_lat, origin_lon);
}

XY project(double lat, double lon, const GridSpec& spec) {
  check_coordinate(lat, lon);
  const double x = kEarthRadiusM * deg2rad(lon - spec.origin_lon) * std::cos(deg2rad(spec.origin_lat));
  const double y = kEarthRadiusM * deg2rad(lat - spec.origin_lat);
  return {x, y};
}

LatLon unproject(double x_m, double y_m, const GridSpec& spec) {
  const double lat = spec.origin_lat + rad2deg(y_m / kEarthRadiusM);
  const double lon =
      spec.origin_lon + rad2deg(x_m / (kEarthRadiusM * std::cos(deg2rad(spec.origin_lat))));
  return {lat, lon};
}

std::optional<CellIndex> to_cell(double x_m, double y_m, const GridSpec& spec) {
  const double r = std::floor(y_m / spec.cell_size_m);
  const double c = std::floor(x_m / spec.cell_size_m);
  const int row = static_cast<int>(r) - spec.row_offset;
  const int col = static_cast<int>(c) - spec.col_offset;
  if (row < 0 || row >= spec.n_rows || col < 0 || col >= spec.n_cols) return std::nullopt;
  return CellIndex{row, col};
}

std::optional<CellIndex> locate(double lat, double lon, const GridSpec& spec) {
  const XY p = project(lat, lon, spec);
  return to_cell(p.x, p.y, spec);
}

XY cell_center(CellIndex cell, const GridSpec& spec) {
  return {(cell.col + spec.col_offset + 0.5) * spec.cell_size_m,
          (cell.row + spec.row_offset + 0.5) * spec.cell_size_m};
}

XY cell_corner(CellIndex cell, int corner_row, int corner_col, const GridSpec& spec) {
  return {(cell.col + spec.col_offset + corner_col) * spec.cell_size_m,
          (cell.row + spec.row_offset + corner_row) * spec.cell_size_m};
}

TimeIndex to_time_index(std::int64_t ts_utc, std::int64_t epoch_utc, const GridSpec& spec) {
  if (ts_utc < epoch_utc) {
    throw std::invalid_argument("timestamp precedes analysis epoch");
  }
  return TimeIndex{(ts_utc - epoch_utc) / spec.time_step_s};
}

double haversine_m(const LatLon& a, const LatLon& b) {
  const double phi1 = deg2rad(a.lat);
  const double phi2 = deg2rad(b.lat);
  const double dphi = deg2rad(b.lat - a.lat);
  const double dlam = deg2rad(b.lon - a.lon);
  const double s = std::sin(dphi / 2.0);
  const double t = std::sin(dlam / 2.0);
  const double h = s * s + std::cos(phi1) * std::cos(phi2) * t * t;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

void BoundingBox::validate() const {
  check_coordinate(min_lat, min_lon);
  check_coordinate(max_lat, max_lon);
  if (min_lat > max_lat || min_lon > max_lon) {
    throw std::invalid_argument("bounding box min exceeds max");
  }
}

GridSpec grid_from_bbox(const BoundingBox& box, double cell_size_m, int time_step_s,
                        int pad_cells) {
  box.validate();
  if (pad_cells < 0) throw std::invalid_argument("pad_cells must be >= 0");
  GridSpec spec;
  spec.origin_lat = 0.5 * (box.min_lat + box.max_lat);
  spec.origin_lon = 0.5 * (box.min_lon + box.max_lon);
  spec.cell_size_m = cell_size_m;
  spec.time_step_s = time_step_s;
  spec.n_rows = 1;
  spec.n_cols = 1;

  const XY lo = project(box.min_lat, box.min_lon, spec);
  const XY hi = project(box.max_lat, box.max_lon, spec);
  const int row_min = static_cast<int>(std::floor(lo.y / cell_size_m)) - pad_cells;
  const int row_max = static_cast<int>(std::floor(hi.y / cell_size_m)) + pad_cells;
  const int col_min = static_cast<int>(std::floor(lo.x / cell_size_m)) - pad_cells;
  const int col_max = static_cast<int>(std::floor(hi.x / cell_size_m)) + pad_cells;

  spec.row_offset = row_min;
  spec.col_offset = col_min;
  spec.n_rows = row_max - row_min + 1;
  spec.n_cols = col_max - col_min + 1;
  spec.validate();
  return spec;
}

}  // namespace stig
