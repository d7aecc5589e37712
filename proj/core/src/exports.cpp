#include "stig/exports.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "stig/calendar.hpp"
#include "stig/csv.hpp"

namespace stig {

namespace {

std::string shortest_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("double formatting failed");
  return std::string(buf, ptr);
}

}  // namespace

void write_heatmap_csv(std::ostream& out, const TrailField& field) {
  out << "row,col,value\n";
  const GridSpec& g = field.spec();
  for (int r = 0; r < g.n_rows; ++r) {
    for (int c = 0; c < g.n_cols; ++c) {
      const TrailUnit v = field.at(CellIndex{r, c});
      if (v == 0) continue;
      out << r << ',' << c << ',' << format_trail_units(v) << '\n';
    }
  }
}

void write_heatmap_pgm(std::ostream& out, const TrailField& field) {
  const GridSpec& g = field.spec();
  out << "P5\n" << g.n_cols << ' ' << g.n_rows << "\n65535\n";
  const TrailUnit max_value = field.max_value();
  std::string row_bytes(static_cast<std::size_t>(g.n_cols) * 2, '\0');
  for (int r = g.n_rows - 1; r >= 0; --r) {  // north on top
    for (int c = 0; c < g.n_cols; ++c) {
      unsigned sample = 0;
      if (max_value > 0) {
        const TrailUnit v = field.at(CellIndex{r, c});
        sample = static_cast<unsigned>(
            (static_cast<unsigned __int128>(v) * 65535 + max_value / 2) / max_value);
      }
      row_bytes[static_cast<std::size_t>(c) * 2] = static_cast<char>(sample >> 8);
      row_bytes[static_cast<std::size_t>(c) * 2 + 1] = static_cast<char>(sample & 0xff);
    }
    out.write(row_bytes.data(), static_cast<std::streamsize>(row_bytes.size()));
  }
}

void write_mask_csv(std::ostream& out, const std::vector<Region>& regions) {
  out << "region,row,col\n";
  for (const Region& region : regions) {
    for (const CellIndex& c : region.cells) {
      out << region.label << ',' << c.row << ',' << c.col << '\n';
    }
  }
}

namespace {

struct Corner {
  int row = 0;
  int col = 0;
  auto operator<=>(const Corner&) const = default;
};

using Ring = std::vector<Corner>;

/// A walk can pass the same corner twice where cells or cavities meet only
/// diagonally. Peeling the loop between the two visits yields one simple ring
/// per feature (each corner has at most two outgoing edges, so one pass per
/// repeat suffices).
void split_at_repeats(const Ring& walk, std::vector<Ring>& out) {
  std::vector<Corner> stack;
  std::map<Corner, std::size_t> pos;
  for (const Corner& corner : walk) {
    const auto it = pos.find(corner);
    if (it != pos.end()) {
      Ring loop(stack.begin() + static_cast<std::ptrdiff_t>(it->second), stack.end());
      for (const Corner& peeled : loop) pos.erase(peeled);
      stack.resize(it->second);
      out.push_back(std::move(loop));
    }
    pos[corner] = stack.size();
    stack.push_back(corner);
  }
  if (!stack.empty()) out.push_back(std::move(stack));
}

/// Walks the directed boundary edges (interior kept to the left) into closed
/// walks, then splits each walk at repeated corners so every ring is simple.
std::vector<Ring> trace_rings(const std::set<CellIndex>& cells) {
  // Directed edges by start corner, at most two per corner.
  std::map<Corner, std::vector<Corner>> edges;
  const auto has = [&](int r, int c) { return cells.count(CellIndex{r, c}) != 0; };
  for (const CellIndex& cell : cells) {
    const int r = cell.row;
    const int c = cell.col;
    if (!has(r - 1, c)) edges[{r, c}].push_back({r, c + 1});          // south side, heading east
    if (!has(r, c + 1)) edges[{r, c + 1}].push_back({r + 1, c + 1});  // east side, heading north
    if (!has(r + 1, c)) edges[{r + 1, c + 1}].push_back({r + 1, c});  // north side, heading west
    if (!has(r, c - 1)) edges[{r + 1, c}].push_back({r, c});          // west side, heading south
  }
  for (auto& [corner, ends] : edges) std::sort(ends.begin(), ends.end());

  std::vector<Ring> rings;
  while (!edges.empty()) {
    const auto first = edges.begin();
    Ring ring;
    Corner at = first->first;
    Corner to = first->second.front();
    while (true) {
      auto it = edges.find(at);
      auto& ends = it->second;
      ends.erase(std::find(ends.begin(), ends.end(), to));
      if (ends.empty()) edges.erase(it);
      ring.push_back(at);
      const Corner from = at;
      at = to;
      if (at == ring.front()) break;
      const auto next_it = edges.find(at);
      if (next_it == edges.end()) throw std::logic_error("open boundary ring");
      const auto& options = next_it->second;
      if (options.size() == 1) {
        to = options.front();
      } else {
        // Sharpest right turn relative to the incoming direction.
        const int in_dr = at.row - from.row;
        const int in_dc = at.col - from.col;
        const Corner right{at.row - in_dc, at.col + in_dr};
        to = std::find(options.begin(), options.end(), right) != options.end()
                 ? right
                 : options.front();
      }
    }
    split_at_repeats(ring, rings);
  }
  return rings;
}

double ring_area2(const Ring& ring) {  // positive when counterclockwise
  double area2 = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Corner& a = ring[i];
    const Corner& b = ring[(i + 1) % ring.size()];
    area2 += static_cast<double>(a.col) * b.row - static_cast<double>(b.col) * a.row;
  }
  return area2;
}

bool point_in_ring(double row, double col, const Ring& ring) {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const double yi = ring[i].row;
    const double xi = ring[i].col;
    const double yj = ring[j].row;
    const double xj = ring[j].col;
    if ((yi > row) != (yj > row) && col < (xj - xi) * (row - yi) / (yj - yi) + xi) {
      inside = !inside;
    }
  }
  return inside;
}

nlohmann::ordered_json ring_coordinates(const Ring& ring, const GridSpec& grid) {
  nlohmann::ordered_json coords = nlohmann::ordered_json::array();
  const auto emit = [&](const Corner& corner) {
    const XY xy = cell_corner(CellIndex{corner.row, corner.col}, 0, 0, grid);
    const LatLon p = unproject(xy.x, xy.y, grid);
    coords.push_back({p.lon, p.lat});
  };
  for (const Corner& corner : ring) emit(corner);
  emit(ring.front());  // close the ring
  return coords;
}

}  // namespace

void write_mask_geojson(std::ostream& out, const std::vector<Region>& regions,
                        const GridSpec& grid) {
  nlohmann::ordered_json features = nlohmann::ordered_json::array();
  for (const Region& region : regions) {
    const std::set<CellIndex> cells(region.cells.begin(), region.cells.end());
    std::vector<Ring> shells;
    std::vector<Ring> holes;
    for (Ring& ring : trace_rings(cells)) {
      (ring_area2(ring) > 0.0 ? shells : holes).push_back(std::move(ring));
    }
    // Each hole belongs to the smallest shell containing it. Probe with a
    // point just inside the cavity: boundary edges keep the region on their
    // left, so the cavity lies to the right of a hole edge.
    std::vector<std::vector<const Ring*>> shell_holes(shells.size());
    for (const Ring& hole : holes) {
      const Corner& a = hole[0];
      const Corner& b = hole[1];
      const double row = (a.row + b.row) / 2.0 - (b.col - a.col) * 0.25;
      const double col = (a.col + b.col) / 2.0 + (b.row - a.row) * 0.25;
      std::size_t best = shells.size();
      double best_area = 0.0;
      for (std::size_t s = 0; s < shells.size(); ++s) {
        if (!point_in_ring(row, col, shells[s])) continue;
        const double area = ring_area2(shells[s]);
        if (best == shells.size() || area < best_area) {
          best = s;
          best_area = area;
        }
      }
      if (best == shells.size()) throw std::logic_error("hole outside every shell");
      shell_holes[best].push_back(&hole);
    }

    nlohmann::ordered_json polygons = nlohmann::ordered_json::array();
    for (std::size_t s = 0; s < shells.size(); ++s) {
      nlohmann::ordered_json polygon = nlohmann::ordered_json::array();
      polygon.push_back(ring_coordinates(shells[s], grid));
      for (const Ring* hole : shell_holes[s]) polygon.push_back(ring_coordinates(*hole, grid));
      polygons.push_back(std::move(polygon));
    }

    nlohmann::ordered_json feature;
    feature["type"] = "Feature";
    feature["properties"] = {{"region", region.label},
                             {"area_cells", static_cast<int>(region.cells.size())}};
    feature["geometry"]["type"] = polygons.size() == 1 ? "Polygon" : "MultiPolygon";
    feature["geometry"]["coordinates"] =
        polygons.size() == 1 ? polygons.front() : std::move(polygons);
    features.push_back(std::move(feature));
  }

  nlohmann::ordered_json collection;
  collection["type"] = "FeatureCollection";
  collection["features"] = std::move(features);
  out << collection.dump(2) << '\n';
}

std::string occurrence_label(const OccurrenceKey& key) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02d", key.slot);
  return format_date(key.date) + buf;
}

OccurrenceKey parse_occurrence_label(const std::string& label) {
  const std::size_t hash = label.find('#');
  if (hash == std::string::npos) {
    throw std::invalid_argument("occurrence label needs date#slot: '" + label + "'");
  }
  OccurrenceKey key;
  key.date = parse_date(label.substr(0, hash));
  const std::string slot = label.substr(hash + 1);
  const auto [ptr, ec] = std::from_chars(slot.data(), slot.data() + slot.size(), key.slot);
  if (ec != std::errc{} || ptr != slot.data() + slot.size() || key.slot < 0 ||
      key.slot >= kSlotsPerDay) {
    throw std::invalid_argument("bad slot in occurrence label: '" + label + "'");
  }
  return key;
}

void write_matrix_csv(std::ostream& out, const SimilarityMatrix& matrix) {
  out << "label";
  for (const OccurrenceKey& key : matrix.labels) out << ',' << occurrence_label(key);
  out << '\n';
  const std::size_t n = matrix.size();
  for (std::size_t i = 0; i < n; ++i) {
    out << occurrence_label(matrix.labels[i]);
    for (std::size_t j = 0; j < n; ++j) out << ',' << shortest_double(matrix.at(i, j));
    out << '\n';
  }
}

SimilarityMatrix read_matrix_csv(std::istream& in) {
  std::vector<std::string> fields;
  if (!read_csv_record(in, fields) || fields.size() < 2 || fields[0] != "label") {
    throw std::runtime_error("matrix file has no label header");
  }
  SimilarityMatrix m;
  for (std::size_t i = 1; i < fields.size(); ++i) {
    m.labels.push_back(parse_occurrence_label(fields[i]));
  }
  const std::size_t n = m.labels.size();
  m.values.reserve(n * n);
  std::size_t row = 0;
  while (read_csv_record(in, fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != n + 1) throw std::runtime_error("matrix row has wrong width");
    if (row >= n) throw std::runtime_error("matrix has too many rows");
    if (parse_occurrence_label(fields[0]) != m.labels[row]) {
      throw std::runtime_error("matrix row label does not match header order");
    }
    for (std::size_t j = 1; j <= n; ++j) {
      double value = 0.0;
      const std::string& s = fields[j];
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
      if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::runtime_error("bad matrix value '" + s + "'");
      }
      m.values.push_back(value);
    }
    ++row;
  }
  if (row != n) throw std::runtime_error("matrix is missing rows");
  return m;
}

namespace {

nlohmann::ordered_json distributions_json(const TypeDistributions& d) {
  nlohmann::ordered_json j;
  j["customers"] = d.customers;
  j["unknown_customers"] = d.unknown_customers;
  if (d.mean_income) {
    j["mean_income"] = *d.mean_income;
  } else {
    j["mean_income"] = nullptr;
  }
  j["education"] = d.education;
  j["income"] = d.income;
  j["age"] = d.age;
  j["avg_dist_m"] = d.avg_dist_m;
  j["std_dist_m"] = d.std_dist_m;
  return j;
}

}  // namespace

void write_population_report_json(std::ostream& out, const PopulationReport& report) {
  nlohmann::ordered_json j;
  j["permanent"] = distributions_json(report.permanent);
  j["intermittent"] = distributions_json(report.intermittent);
  j["neither"] = distributions_json(report.neither);
  j["events"] = {{"permanent", report.events_permanent},
                 {"intermittent", report.events_intermittent},
                 {"neither", report.events_neither}};
  j["customers_without_anchor"] = report.customers_without_anchor;
  out << j.dump(2) << '\n';
}

}  // namespace stig
