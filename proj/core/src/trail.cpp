#include "stig/trail.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace stig {

TrailUnit to_trail_units(double value) {
  return static_cast<TrailUnit>(std::llround(value * static_cast<double>(kTrailUnitScale)));
}

double from_trail_units(TrailUnit units) {
  return static_cast<double>(units) / static_cast<double>(kTrailUnitScale);
}

std::string format_trail_units(TrailUnit units) {
  const bool neg = units < 0;
  std::uint64_t mag = neg ? static_cast<std::uint64_t>(-units) : static_cast<std::uint64_t>(units);
  const std::uint64_t scale = static_cast<std::uint64_t>(kTrailUnitScale);
  std::string out = neg ? "-" : "";
  out += std::to_string(mag / scale);
  std::uint64_t frac = mag % scale;
  if (frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, 9 - digits.size(), '0');
    while (digits.back() == '0') digits.pop_back();
    out += '.';
    out += digits;
  }
  return out;
}

void MarkSpec::validate() const {
  if (!(width_eps >= 0.0)) throw std::invalid_argument("mark width_eps must be >= 0");
  if (!(intensity > 0.0)) throw std::invalid_argument("mark intensity must be > 0");
  if (!(top_radius_frac >= 0.0 && top_radius_frac < 1.0)) {
    throw std::invalid_argument("top_radius_frac must lie in [0,1)");
  }
}

void EvaporationSpec::validate() const {
  if (!(delta >= 0.0)) throw std::invalid_argument("evaporation delta must be >= 0");
}

std::vector<FootprintCell> mark_stencil(const MarkSpec& mark) {
  mark.validate();
  const TrailUnit peak = mark.intensity_units();
  if (mark.width_eps == 0.0) {
    return {FootprintCell{0, 0, peak}};
  }
  const double eps = mark.width_eps;
  const double r_top = mark.top_radius_frac * eps;
  const int reach = static_cast<int>(std::ceil(eps));
  std::vector<FootprintCell> cells;
  cells.reserve(static_cast<std::size_t>((2 * reach + 1) * (2 * reach + 1)));
  for (int dr = -reach; dr <= reach; ++dr) {
    for (int dc = -reach; dc <= reach; ++dc) {
      const double d = std::sqrt(static_cast<double>(dr) * dr + static_cast<double>(dc) * dc);
      TrailUnit v = 0;
      if (d <= r_top) {
        v = peak;
      } else if (d < eps) {
        v = to_trail_units(mark.intensity * (eps - d) / (eps - r_top));
      }
      if (v > 0) cells.push_back({dr, dc, v});
    }
  }
  return cells;
}

std::vector<std::pair<CellIndex, TrailUnit>> mark_footprint(CellIndex center,
                                                            const MarkSpec& mark,
                                                            const GridSpec& spec) {
  std::vector<std::pair<CellIndex, TrailUnit>> out;
  for (const FootprintCell& f : mark_stencil(mark)) {
    const int r = center.row + f.dr;
    const int c = center.col + f.dc;
    if (r < 0 || r >= spec.n_rows || c < 0 || c >= spec.n_cols) continue;
    out.emplace_back(CellIndex{r, c}, f.value);
  }
  return out;
}

TrailField::TrailField(GridSpec spec, TimeIndex time)
    : spec_(spec), time_(time), values_(static_cast<std::size_t>(spec.cell_count()), 0) {
  spec_.validate();
}

TrailUnit TrailField::max_value() const {
  return values_.empty() ? 0 : *std::max_element(values_.begin(), values_.end());
}

bool TrailField::all_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](TrailUnit v) { return v == 0; });
}

namespace {

void check_deposit(const CellIndex& cell, const GridSpec& spec) {
  if (cell.row < 0 || cell.row >= spec.n_rows || cell.col < 0 || cell.col >= spec.n_cols) {
    throw std::invalid_argument("deposit center outside grid: row " + std::to_string(cell.row) +
                                ", col " + std::to_string(cell.col));
  }
}

// In-place Eq-1 transition: evaporate with clamp, then stack deposits.
void advance(TrailField& trail, std::span<const CellIndex> deposits,
             std::span<const FootprintCell> stencil, TrailUnit delta_units) {
  if (delta_units > 0) {
    for (TrailUnit& v : trail.values()) {
      v = v > delta_units ? v - delta_units : 0;
    }
  }
  const GridSpec& spec = trail.spec();
  for (const CellIndex& center : deposits) {
    check_deposit(center, spec);
    for (const FootprintCell& f : stencil) {
      const int r = center.row + f.dr;
      const int c = center.col + f.dc;
      if (r < 0 || r >= spec.n_rows || c < 0 || c >= spec.n_cols) continue;  // clip at edges
      trail.at(r, c) += f.value;
    }
  }
  trail.set_time(TimeIndex{trail.time().step + 1});
}

}  // namespace

TrailField step(const TrailField& trail, std::span<const CellIndex> deposits,
                const MarkSpec& mark, const EvaporationSpec& evap) {
  evap.validate();
  TrailField out = trail;
  const std::vector<FootprintCell> stencil = mark_stencil(mark);
  advance(out, deposits, stencil, evap.delta_units());
  return out;
}

TrailField run_trail(std::span<const DepositEvent> events, TimeIndex t_begin, TimeIndex t_end,
                     const GridSpec& spec, const MarkSpec& mark, const EvaporationSpec& evap,
                     TrailRunStats* stats) {
  evap.validate();
  if (t_end.step <= t_begin.step) throw std::invalid_argument("empty trail window");

  std::vector<DepositEvent> sorted;
  std::span<const DepositEvent> ordered = events;
  if (!std::is_sorted(events.begin(), events.end(),
                      [](const DepositEvent& a, const DepositEvent& b) { return a.t < b.t; })) {
    sorted.assign(events.begin(), events.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const DepositEvent& a, const DepositEvent& b) { return a.t < b.t; });
    ordered = sorted;
  }

  TrailRunStats local;
  const std::vector<FootprintCell> stencil = mark_stencil(mark);
  const TrailUnit delta_units = evap.delta_units();

  // Start from the implicit all-zero T at t_begin - 1; each advance lands on
  // the step it executes, so the final snapshot sits at t_end - 1.
  TrailField trail(spec, TimeIndex{t_begin.step - 1});
  std::size_t i = 0;
  while (i < ordered.size() && ordered[i].t < t_begin) {
    ++local.deposits_skipped;
    ++i;
  }
  std::vector<CellIndex> batch;
  for (std::int64_t s = t_begin.step; s < t_end.step; ++s) {
    batch.clear();
    while (i < ordered.size() && ordered[i].t.step == s) {
      batch.push_back(ordered[i].cell);
      ++i;
    }
    local.deposits_applied += static_cast<std::int64_t>(batch.size());
    advance(trail, batch, stencil, delta_units);
  }
  local.deposits_skipped += static_cast<std::int64_t>(ordered.size() - i);

  if (stats != nullptr) *stats = local;
  return trail;
}

}  // namespace stig
