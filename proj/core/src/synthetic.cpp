#include "stig/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "stig/hotspot.hpp"

namespace stig {

namespace {

/// One seeded stream, drawn in a fixed order. The distribution transforms are
/// written out here because standard-library distributions may differ across
/// implementations, and reruns must be byte-identical.
class Rand {
 public:
  explicit Rand(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  std::int64_t uniform_int(std::int64_t n) {  // [0, n)
    return static_cast<std::int64_t>(
        static_cast<unsigned __int128>(gen_()) * static_cast<unsigned __int128>(n) >> 64);
  }

  std::int64_t poisson(double lambda) {
    std::int64_t total = 0;
    while (lambda > 0.0) {
      const double chunk = lambda > 30.0 ? 30.0 : lambda;
      lambda -= chunk;
      const double limit = std::exp(-chunk);
      std::int64_t k = -1;
      double p = 1.0;
      do {
        ++k;
        p *= uniform();
      } while (p > limit);
      total += k;
    }
    return total;
  }

  double normal(double mean, double sd) {
    if (have_spare_) {
      have_spare_ = false;
      return mean + sd * spare_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return mean + sd * r * std::cos(a);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

int resolved_pad(const MarkSpec& mark, int grid_pad_cells) {
  return grid_pad_cells >= 0 ? grid_pad_cells
                             : static_cast<int>(std::ceil(mark.width_eps));
}

std::vector<CellIndex> disk_cells(CellIndex center, int radius) {
  std::vector<CellIndex> cells;
  for (int dr = -radius; dr <= radius; ++dr) {
    for (int dc = -radius; dc <= radius; ++dc) {
      if (dr * dr + dc * dc <= radius * radius) {
        cells.push_back(CellIndex{center.row + dr, center.col + dc});
      }
    }
  }
  return cells;
}

/// Expected-value trail dynamics: the same clamped evaporation and stencil as
/// the engine, but with fractional per-step deposit fields. Used only to
/// derive ground-truth level sets.
class ExpectedTrail {
 public:
  explicit ExpectedTrail(const GridSpec& grid, const MarkSpec& mark)
      : grid_(grid), stencil_(mark_stencil(mark)) {}

  /// Adds rate/|cells| expected deposits per step at each listed cell.
  void add_source(const std::vector<CellIndex>& cells, double rate) {
    if (cells.empty() || rate <= 0.0) return;
    const double per_cell = rate / static_cast<double>(cells.size());
    if (per_step_.empty()) per_step_.assign(static_cast<std::size_t>(grid_.cell_count()), 0.0);
    for (const CellIndex& c : cells) {
      for (const FootprintCell& f : stencil_) {
        const int row = c.row + f.dr;
        const int col = c.col + f.dc;
        if (row < 0 || row >= grid_.n_rows || col < 0 || col >= grid_.n_cols) continue;
        per_step_[static_cast<std::size_t>(row) * grid_.n_cols + col] +=
            per_cell * from_trail_units(f.value);
      }
    }
  }

  std::vector<double> run(int steps, double delta) const {
    std::vector<double> field(static_cast<std::size_t>(grid_.cell_count()), 0.0);
    if (per_step_.empty()) return field;
    for (int s = 0; s < steps; ++s) {
      for (std::size_t i = 0; i < field.size(); ++i) {
        const double decayed = field[i] - delta;
        field[i] = (decayed > 0.0 ? decayed : 0.0) + per_step_[i];
      }
    }
    return field;
  }

 private:
  GridSpec grid_;
  std::vector<FootprintCell> stencil_;
  std::vector<double> per_step_;
};

CellMask level_set(const std::vector<double>& field, double tau, const GridSpec& grid) {
  double max_value = 0.0;
  for (const double v : field) max_value = std::max(max_value, v);
  CellMask mask(grid.n_rows, grid.n_cols);
  if (max_value <= 0.0) return mask;
  const double cut = tau * max_value;
  for (int r = 0; r < grid.n_rows; ++r) {
    for (int c = 0; c < grid.n_cols; ++c) {
      if (field[static_cast<std::size_t>(r) * grid.n_cols + c] > cut) {
        mask.set(CellIndex{r, c});
      }
    }
  }
  return mask;
}

std::vector<CellIndex> region_containing(const CellMask& mask, CellIndex center, int cluster_id) {
  for (const Region& region : label_regions(mask, 1)) {
    if (std::binary_search(region.cells.begin(), region.cells.end(), center)) {
      return region.cells;
    }
  }
  throw std::runtime_error("ground truth: cluster " + std::to_string(cluster_id) +
                           " produces no region containing its center; raise its rate or "
                           "lower the threshold");
}

}  // namespace

GridSpec SyntheticScenario::grid() const {
  return grid_from_bbox(bbox, cell_size_m, time_step_s, resolved_pad(mark, grid_pad_cells));
}

void SyntheticScenario::validate() const {
  bbox.validate();
  mark.validate();
  if (!(cell_size_m > 0.0)) throw std::invalid_argument("scenario: cell_size_m must be positive");
  if (time_step_s <= 0 || kSecondsPerDay % time_step_s != 0 ||
      (kSlotHours * 3600) % time_step_s != 0) {
    throw std::invalid_argument("scenario: time_step_s must divide day and slot evenly");
  }
  if (period.last < period.first) throw std::invalid_argument("scenario: bad period");
  for (const auto& [name, value] :
       {std::pair<const char*, double>{"delta_permanent", delta_permanent},
        {"delta_intermittent", delta_intermittent}}) {
    if (!(value > 0.0)) {
      throw std::invalid_argument(std::string("scenario: ") + name + " must be positive");
    }
  }
  if (!(tau_permanent > 0.0 && tau_permanent < 1.0) ||
      !(tau_intermittent > 0.0 && tau_intermittent < 1.0)) {
    throw std::invalid_argument("scenario: thresholds must lie in (0,1)");
  }
  if (background_rate < 0.0 || online_rate < 0.0) {
    throw std::invalid_argument("scenario: rates must be >= 0");
  }
  if (users < 0) throw std::invalid_argument("scenario: users must be >= 0");
  if (background_income_sd < 0.0 || amount_sd < 0.0) {
    throw std::invalid_argument("scenario: deviations must be >= 0");
  }

  const GridSpec g = grid();
  const int pad = resolved_pad(mark, grid_pad_cells);
  std::map<int, int> ids;
  for (const ClusterSpec& cl : clusters) {
    if (++ids[cl.id] > 1) {
      throw std::invalid_argument("scenario: duplicate cluster id " + std::to_string(cl.id));
    }
    if (cl.radius_cells < 0) throw std::invalid_argument("scenario: negative cluster radius");
    if (cl.rate_per_step < 0.0) throw std::invalid_argument("scenario: negative cluster rate");
    if (cl.income_sd < 0.0) throw std::invalid_argument("scenario: negative income deviation");
    if (!cl.always_on && cl.schedule.empty()) {
      throw std::invalid_argument("scenario: cluster " + std::to_string(cl.id) +
                                  " has an empty schedule");
    }
    // Keep the whole disk one full cell inside the unpadded box so every
    // generated point survives the ingest bounding-box filter.
    const int margin = pad + 1;
    if (cl.center.row - cl.radius_cells < margin ||
        cl.center.row + cl.radius_cells >= g.n_rows - margin ||
        cl.center.col - cl.radius_cells < margin ||
        cl.center.col + cl.radius_cells >= g.n_cols - margin) {
      throw std::invalid_argument("scenario: cluster " + std::to_string(cl.id) +
                                  " does not fit inside the bounding box");
    }
  }
}

std::vector<TemporalTuple> parse_schedule(const std::string& text) {
  std::vector<TemporalTuple> tuples;
  std::string group;
  std::istringstream groups(text);
  while (std::getline(groups, group, ';')) {
    const std::size_t colon = group.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("schedule group needs daytype:slots, got '" + group + "'");
    }
    const std::string day_raw = group.substr(0, colon);
    DayType day_type;
    if (day_raw == "weekday") {
      day_type = DayType::kWeekday;
    } else if (day_raw == "weekend") {
      day_type = DayType::kWeekend;
    } else {
      throw std::invalid_argument("schedule daytype must be weekday or weekend, got '" +
                                  day_raw + "'");
    }
    std::string item;
    std::istringstream items(group.substr(colon + 1));
    bool any = false;
    while (std::getline(items, item, ',')) {
      any = true;
      int lo = 0;
      int hi = 0;
      if (std::sscanf(item.c_str(), "%d-%d", &lo, &hi) == 2) {
        // range
      } else if (std::sscanf(item.c_str(), "%d", &lo) == 1) {
        hi = lo;
      } else {
        throw std::invalid_argument("bad schedule slot item '" + item + "'");
      }
      if (lo > hi || lo < 0 || hi >= kSlotsPerDay) {
        throw std::invalid_argument("schedule slots must lie in 0.." +
                                    std::to_string(kSlotsPerDay - 1) + ": '" + item + "'");
      }
      for (int s = lo; s <= hi; ++s) tuples.push_back(TemporalTuple{day_type, s});
    }
    if (!any) throw std::invalid_argument("schedule group lists no slots: '" + group + "'");
  }
  if (tuples.empty()) throw std::invalid_argument("empty schedule");
  std::sort(tuples.begin(), tuples.end());
  tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
  return tuples;
}

std::string format_schedule(bool always_on, const std::vector<TemporalTuple>& schedule) {
  if (always_on) return "always";
  std::string out;
  for (const DayType day_type : {DayType::kWeekday, DayType::kWeekend}) {
    std::string slots;
    int run_start = -1;
    int prev = -2;
    const auto flush = [&](int last) {
      if (run_start < 0) return;
      if (!slots.empty()) slots += ',';
      slots += std::to_string(run_start);
      if (last > run_start) slots += '-' + std::to_string(last);
    };
    for (const TemporalTuple& t : schedule) {
      if (t.day_type != day_type) continue;
      if (t.slot != prev + 1) {
        flush(prev);
        run_start = t.slot;
      }
      prev = t.slot;
    }
    flush(prev);
    if (!slots.empty()) {
      if (!out.empty()) out += ';';
      out += day_type_name(day_type);
      out += ':';
      out += slots;
    }
  }
  return out;
}

SyntheticScenario parse_scenario(const FlatConfig& cfg) {
  SyntheticScenario sc;
  sc.name = cfg.get_string("scenario", sc.name);
  sc.bbox = parse_bbox(cfg.require_string("bbox"));
  sc.cell_size_m = cfg.get_double("cell_size_m", sc.cell_size_m);
  sc.time_step_s = static_cast<int>(cfg.get_long("time_step_s", sc.time_step_s));
  sc.grid_pad_cells = static_cast<int>(cfg.get_long("grid_pad_cells", sc.grid_pad_cells));
  sc.period = parse_period(cfg.require_string("period"));
  if (cfg.has("timezone_offset")) {
    sc.tz_offset_s = parse_tz_offset(cfg.require_string("timezone_offset"));
  }
  sc.mark.width_eps = cfg.get_double("eps_cells", sc.mark.width_eps);
  sc.mark.intensity = cfg.get_double("intensity", sc.mark.intensity);
  sc.mark.top_radius_frac = cfg.get_double("top_radius_frac", sc.mark.top_radius_frac);
  sc.delta_permanent = cfg.get_double("delta_permanent", sc.delta_permanent);
  sc.delta_intermittent = cfg.get_double("delta_intermittent", sc.delta_intermittent);
  sc.tau_permanent = cfg.get_double("tau_permanent", sc.tau_permanent);
  sc.tau_intermittent = cfg.get_double("tau_intermittent", sc.tau_intermittent);
  sc.background_rate = cfg.get_double("background_rate", sc.background_rate);
  sc.online_rate = cfg.get_double("online_rate", sc.online_rate);
  sc.users = cfg.get_long("users", sc.users);
  sc.background_income_mean = cfg.get_double("background_income_mean", sc.background_income_mean);
  sc.background_income_sd = cfg.get_double("background_income_sd", sc.background_income_sd);
  sc.amount_mean = cfg.get_double("amount_mean", sc.amount_mean);
  sc.amount_sd = cfg.get_double("amount_sd", sc.amount_sd);

  const int pad = resolved_pad(sc.mark, sc.grid_pad_cells);
  std::set<int> ids;
  for (const auto& [key, value] : cfg.raw()) {
    int id = 0;
    if (std::sscanf(key.c_str(), "cluster%d_", &id) == 1) ids.insert(id);
  }
  for (const int id : ids) {
    const std::string prefix = "cluster" + std::to_string(id) + "_";
    ClusterSpec cl;
    cl.id = id;
    // Cluster coordinates are written relative to the cell containing the
    // box's south-west corner; the grid itself carries pad cells around that.
    cl.center.row = static_cast<int>(cfg.get_long(prefix + "row", -1)) + pad;
    cl.center.col = static_cast<int>(cfg.get_long(prefix + "col", -1)) + pad;
    if (cl.center.row < pad || cl.center.col < pad) {
      throw std::invalid_argument("cluster " + std::to_string(id) + " needs row and col");
    }
    cl.radius_cells = static_cast<int>(cfg.get_long(prefix + "radius_cells", cl.radius_cells));
    cl.rate_per_step = cfg.get_double(prefix + "rate", cl.rate_per_step);
    const std::string schedule = cfg.get_string(prefix + "schedule", "always");
    cl.always_on = schedule == "always";
    if (!cl.always_on) cl.schedule = parse_schedule(schedule);
    cl.income_mean = cfg.get_double(prefix + "income_mean", cl.income_mean);
    cl.income_sd = cfg.get_double(prefix + "income_sd", cl.income_sd);
    sc.clusters.push_back(std::move(cl));
  }
  sc.validate();
  return sc;
}

namespace {

bool cluster_active(const ClusterSpec& cl, TemporalTuple tuple) {
  return cl.always_on ||
         std::binary_search(cl.schedule.begin(), cl.schedule.end(), tuple);
}

struct Pool {
  std::int64_t first = 0;
  std::int64_t count = 0;
  double income_mean = 0.0;
  double income_sd = 0.0;
};

std::string user_id(std::int64_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "u%06lld", static_cast<long long>(index + 1));
  return buf;
}

GroundTruth build_ground_truth(const SyntheticScenario& sc, const GridSpec& grid,
                               const std::vector<CellIndex>& interior,
                               const std::vector<std::vector<CellIndex>>& disks) {
  GroundTruth truth;
  truth.grid = grid;
  truth.tau_permanent = sc.tau_permanent;
  truth.tau_intermittent = sc.tau_intermittent;

  const int spd = kSecondsPerDay / sc.time_step_s;
  const int sps = kSlotHours * 3600 / sc.time_step_s;

  ExpectedTrail permanent(grid, sc.mark);
  bool any_permanent = false;
  for (std::size_t i = 0; i < sc.clusters.size(); ++i) {
    if (sc.clusters[i].always_on && sc.clusters[i].rate_per_step > 0.0) {
      permanent.add_source(disks[i], sc.clusters[i].rate_per_step);
      any_permanent = true;
    }
  }
  if (sc.background_rate > 0.0) permanent.add_source(interior, sc.background_rate);
  CellMask permanent_mask(grid.n_rows, grid.n_cols);
  if (any_permanent) {
    permanent_mask = level_set(permanent.run(spd, sc.delta_permanent), sc.tau_permanent, grid);
  }

  for (std::size_t i = 0; i < sc.clusters.size(); ++i) {
    const ClusterSpec& cl = sc.clusters[i];
    if (cl.rate_per_step <= 0.0) continue;
    GroundTruthCluster gt;
    gt.id = cl.id;
    gt.always_on = cl.always_on;
    gt.schedule = cl.schedule;
    gt.center = cl.center;
    if (cl.always_on) {
      gt.cells = region_containing(permanent_mask, cl.center, cl.id);
    } else {
      ExpectedTrail occurrence(grid, sc.mark);
      occurrence.add_source(disks[i], cl.rate_per_step);
      if (sc.background_rate > 0.0) occurrence.add_source(interior, sc.background_rate);
      const CellMask mask =
          level_set(occurrence.run(sps, sc.delta_intermittent), sc.tau_intermittent, grid);
      gt.cells = region_containing(mask, cl.center, cl.id);
    }
    truth.clusters.push_back(std::move(gt));
  }
  return truth;
}

}  // namespace

GeneratedData generate_synthetic(const SyntheticScenario& sc, std::uint64_t seed) {
  sc.validate();
  const GridSpec grid = sc.grid();
  const int pad = resolved_pad(sc.mark, sc.grid_pad_cells);
  const int margin = pad + 1;
  const int interior_rows = grid.n_rows - 2 * margin;
  const int interior_cols = grid.n_cols - 2 * margin;
  if (interior_rows <= 0 || interior_cols <= 0) {
    throw std::invalid_argument("scenario: bounding box smaller than the mark padding");
  }

  const int n_days = static_cast<int>((sc.period.last - sc.period.first).count()) + 1;
  const int spd = kSecondsPerDay / sc.time_step_s;
  const int sps = kSlotHours * 3600 / sc.time_step_s;
  const std::int64_t total_steps = static_cast<std::int64_t>(n_days) * spd;
  const std::int64_t epoch = local_midnight_utc(sc.period.first, sc.tz_offset_s);

  std::vector<std::vector<CellIndex>> disks;
  disks.reserve(sc.clusters.size());
  for (const ClusterSpec& cl : sc.clusters) disks.push_back(disk_cells(cl.center, cl.radius_cells));

  std::vector<CellIndex> interior;
  interior.reserve(static_cast<std::size_t>(interior_rows) * interior_cols);
  for (int r = 0; r < interior_rows; ++r) {
    for (int c = 0; c < interior_cols; ++c) {
      interior.push_back(CellIndex{margin + r, margin + c});
    }
  }

  // Expected event volume decides the user pool and its split across sources.
  std::vector<double> expected(sc.clusters.size() + 1, 0.0);
  for (std::int64_t step = 0; step < total_steps; ++step) {
    const std::chrono::sys_days date = sc.period.first + std::chrono::days{step / spd};
    const TemporalTuple tuple = tuple_of(date, static_cast<int>((step % spd) / sps));
    for (std::size_t i = 0; i < sc.clusters.size(); ++i) {
      if (cluster_active(sc.clusters[i], tuple)) expected[i] += sc.clusters[i].rate_per_step;
    }
  }
  expected.back() = sc.background_rate * static_cast<double>(total_steps);
  const double expected_total =
      std::accumulate(expected.begin(), expected.end(), 0.0) +
      sc.online_rate * static_cast<double>(total_steps);

  std::int64_t n_users = sc.users;
  if (n_users == 0) {
    // About 68 purchases per user per year, scaled to the period length.
    const double per_user = 68.0 * (static_cast<double>(n_days) / 365.0);
    n_users = std::max<std::int64_t>(10, std::llround(expected_total / std::max(per_user, 1e-9)));
  }

  std::vector<Pool> pools(expected.size());
  {
    const double source_total = std::accumulate(expected.begin(), expected.end(), 0.0);
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < pools.size(); ++i) {
      const bool is_background = i + 1 == pools.size();
      pools[i].income_mean = is_background ? sc.background_income_mean : sc.clusters[i].income_mean;
      pools[i].income_sd = is_background ? sc.background_income_sd : sc.clusters[i].income_sd;
      if (source_total <= 0.0) continue;
      std::int64_t n = std::llround(static_cast<double>(n_users) * expected[i] / source_total);
      if (expected[i] > 0.0 && n == 0) n = 1;
      pools[i].count = n;
      assigned += n;
    }
    // Rounding drift lands on the background pool (never below one user).
    pools.back().count = std::max<std::int64_t>(pools.back().count + (n_users - assigned), 1);
    std::int64_t first = 0;
    for (Pool& pool : pools) {
      pool.first = first;
      first += pool.count;
    }
    n_users = first;
  }

  Rand rng(seed);
  GeneratedData out;

  out.profiles.reserve(static_cast<std::size_t>(n_users));
  for (const Pool& pool : pools) {
    for (std::int64_t u = 0; u < pool.count; ++u) {
      CustomerProfile p;
      p.customer_id = user_id(pool.first + u);
      p.income = std::max(100.0, rng.normal(pool.income_mean, pool.income_sd));
      p.age = static_cast<double>(18 + rng.uniform_int(63));
      p.education = static_cast<int>(rng.uniform_int(9));
      const bool skip_home = rng.uniform() < 0.01;
      const bool skip_work = rng.uniform() < 0.03;
      const auto random_point = [&]() {
        return LatLon{sc.bbox.min_lat + rng.uniform() * (sc.bbox.max_lat - sc.bbox.min_lat),
                      sc.bbox.min_lon + rng.uniform() * (sc.bbox.max_lon - sc.bbox.min_lon)};
      };
      if (!skip_home) p.home = random_point();
      if (!skip_work) p.work = random_point();
      out.profiles.push_back(std::move(p));
    }
  }

  static const char* kExpenseTypes[] = {"grocery", "restaurant", "retail", "fuel", "service"};
  const auto emit = [&](std::int64_t step, CellIndex cell, const Pool& pool, bool online) {
    Event ev;
    const std::int64_t user = pool.first + rng.uniform_int(std::max<std::int64_t>(pool.count, 1));
    ev.customer_id = user_id(user);
    ev.ts = epoch + step * sc.time_step_s + rng.uniform_int(sc.time_step_s);
    ev.amount = std::max(0.5, rng.normal(sc.amount_mean, sc.amount_sd));
    ev.online = online;
    if (online) {
      ev.shop_id = "online";
      ev.expense_type = "online";
    } else {
      const XY corner = cell_corner(cell, 0, 0, grid);
      const LatLon p = unproject(corner.x + rng.uniform() * grid.cell_size_m,
                                 corner.y + rng.uniform() * grid.cell_size_m, grid);
      ev.lat = p.lat;
      ev.lon = p.lon;
      ev.shop_id = "s" + std::to_string(cell.row) + "x" + std::to_string(cell.col);
      ev.expense_type = kExpenseTypes[rng.uniform_int(5)];
    }
    ev.currency = "TRY";
    out.events.push_back(std::move(ev));
  };

  const Pool all_users{0, n_users, 0.0, 0.0};
  for (std::int64_t step = 0; step < total_steps; ++step) {
    const std::chrono::sys_days date = sc.period.first + std::chrono::days{step / spd};
    const TemporalTuple tuple = tuple_of(date, static_cast<int>((step % spd) / sps));
    for (std::size_t i = 0; i < sc.clusters.size(); ++i) {
      const ClusterSpec& cl = sc.clusters[i];
      if (!cluster_active(cl, tuple) || cl.rate_per_step <= 0.0) continue;
      const std::int64_t k = rng.poisson(cl.rate_per_step);
      for (std::int64_t j = 0; j < k; ++j) {
        const CellIndex cell = disks[i][static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::int64_t>(disks[i].size())))];
        emit(step, cell, pools[i], false);
        ++out.cluster_events;
      }
    }
    if (sc.background_rate > 0.0) {
      const std::int64_t k = rng.poisson(sc.background_rate);
      for (std::int64_t j = 0; j < k; ++j) {
        const CellIndex cell{margin + static_cast<int>(rng.uniform_int(interior_rows)),
                             margin + static_cast<int>(rng.uniform_int(interior_cols))};
        emit(step, cell, pools.back(), false);
        ++out.background_events;
      }
    }
    if (sc.online_rate > 0.0) {
      const std::int64_t k = rng.poisson(sc.online_rate);
      for (std::int64_t j = 0; j < k; ++j) {
        emit(step, CellIndex{0, 0}, all_users, true);
        ++out.online_events;
      }
    }
  }
  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const Event& a, const Event& b) { return a.ts < b.ts; });

  out.truth = build_ground_truth(sc, grid, interior, disks);
  return out;
}

void write_ground_truth_json(std::ostream& out, const GroundTruth& truth) {
  nlohmann::ordered_json j;
  j["grid"] = {{"origin_lat", truth.grid.origin_lat},
               {"origin_lon", truth.grid.origin_lon},
               {"cell_size_m", truth.grid.cell_size_m},
               {"n_rows", truth.grid.n_rows},
               {"n_cols", truth.grid.n_cols},
               {"time_step_s", truth.grid.time_step_s},
               {"row_offset", truth.grid.row_offset},
               {"col_offset", truth.grid.col_offset}};
  j["tau_permanent"] = truth.tau_permanent;
  j["tau_intermittent"] = truth.tau_intermittent;
  j["clusters"] = nlohmann::ordered_json::array();
  for (const GroundTruthCluster& cl : truth.clusters) {
    nlohmann::ordered_json jc;
    jc["id"] = cl.id;
    jc["schedule"] = format_schedule(cl.always_on, cl.schedule);
    jc["center"] = {cl.center.row, cl.center.col};
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const CellIndex& c : cl.cells) cells.push_back({c.row, c.col});
    jc["cells"] = std::move(cells);
    j["clusters"].push_back(std::move(jc));
  }
  out << j.dump(2) << '\n';
}

GroundTruth read_ground_truth_json(std::istream& in) {
  nlohmann::json j;
  in >> j;
  GroundTruth truth;
  const auto& g = j.at("grid");
  truth.grid.origin_lat = g.at("origin_lat").get<double>();
  truth.grid.origin_lon = g.at("origin_lon").get<double>();
  truth.grid.cell_size_m = g.at("cell_size_m").get<double>();
  truth.grid.n_rows = g.at("n_rows").get<int>();
  truth.grid.n_cols = g.at("n_cols").get<int>();
  truth.grid.time_step_s = g.at("time_step_s").get<int>();
  truth.grid.row_offset = g.at("row_offset").get<int>();
  truth.grid.col_offset = g.at("col_offset").get<int>();
  truth.tau_permanent = j.at("tau_permanent").get<double>();
  truth.tau_intermittent = j.at("tau_intermittent").get<double>();
  for (const auto& jc : j.at("clusters")) {
    GroundTruthCluster cl;
    cl.id = jc.at("id").get<int>();
    const std::string schedule = jc.at("schedule").get<std::string>();
    cl.always_on = schedule == "always";
    if (!cl.always_on) cl.schedule = parse_schedule(schedule);
    cl.center = CellIndex{jc.at("center").at(0).get<int>(), jc.at("center").at(1).get<int>()};
    for (const auto& cell : jc.at("cells")) {
      cl.cells.push_back(CellIndex{cell.at(0).get<int>(), cell.at(1).get<int>()});
    }
    std::sort(cl.cells.begin(), cl.cells.end());
    truth.clusters.push_back(std::move(cl));
  }
  return truth;
}

}  // namespace stig
