#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stig/geo.hpp"

namespace stig {

/// Trail intensities are decimal fixed point: one TrailUnit is 1e-9 trail
/// units. Integer arithmetic keeps the subtractive evaporation of Eq-style
/// linear decay exact (no floating-point drift over long windows) and makes
/// every run byte-deterministic regardless of summation order.
using TrailUnit = std::int64_t;

inline constexpr TrailUnit kTrailUnitScale = 1'000'000'000;

TrailUnit to_trail_units(double value);
double from_trail_units(TrailUnit units);

/// Formats a unit count as an exact decimal string ("0.29", "2", "0.125").
std::string format_trail_units(TrailUnit units);

inline constexpr double kDeltaPermanentDefault = 0.01;
inline constexpr double kDeltaIntermittentDefault = 0.15;

/// Shape of one pheromone deposit: a truncated cone of base radius width_eps
/// (in cells), full-intensity plateau of radius top_radius_frac * width_eps,
/// and linear falloff to zero at width_eps.
struct MarkSpec {
  double width_eps{10.0};
  double intensity{1.0};
  double top_radius_frac{0.5};

  void validate() const;
  TrailUnit intensity_units() const { return to_trail_units(intensity); }
};

/// Per-step subtractive decay, clamped at zero.
struct EvaporationSpec {
  double delta{kDeltaPermanentDefault};

  void validate() const;
  TrailUnit delta_units() const { return to_trail_units(delta); }
};

/// One stencil cell: offset from the deposit center plus its (positive) value.
struct FootprintCell {
  int dr{};
  int dc{};
  TrailUnit value{};
};

/// Truncated-cone stencil for a mark, independent of grid position.
/// Cell distance is Euclidean, center to center; only cells with value > 0
/// are emitted. width_eps == 0 degenerates to the single center cell.
std::vector<FootprintCell> mark_stencil(const MarkSpec& mark);

/// Stencil placed at a concrete center, clipped to the grid.
std::vector<std::pair<CellIndex, TrailUnit>> mark_footprint(CellIndex center,
                                                            const MarkSpec& mark,
                                                            const GridSpec& spec);

/// The pheromone field T_i: one non-negative intensity per cell at time step i.
class TrailField {
 public:
  TrailField(GridSpec spec, TimeIndex time = TimeIndex{0});

  const GridSpec& spec() const { return spec_; }
  TimeIndex time() const { return time_; }
  void set_time(TimeIndex t) { time_ = t; }

  TrailUnit at(int row, int col) const { return values_[index(row, col)]; }
  TrailUnit at(CellIndex c) const { return at(c.row, c.col); }
  TrailUnit& at(int row, int col) { return values_[index(row, col)]; }

  const std::vector<TrailUnit>& values() const { return values_; }
  std::vector<TrailUnit>& values() { return values_; }

  TrailUnit max_value() const;
  bool all_zero() const;

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * spec_.n_cols + col;
  }

 private:
  GridSpec spec_;
  TimeIndex time_;
  std::vector<TrailUnit> values_;
};

/// One trail transition: evaporate (clamped at zero), then stack the deposits
/// of this step additively. Returns the field at time trail.time() + 1.
/// Deposit centers must be valid cells of the grid.
TrailField step(const TrailField& trail, std::span<const CellIndex> deposits,
                const MarkSpec& mark, const EvaporationSpec& evap);

/// A deposit event already mapped to grid coordinates.
struct DepositEvent {
  TimeIndex t;
  CellIndex cell;
};

struct TrailRunStats {
  std::int64_t deposits_applied{};
  std::int64_t deposits_skipped{};  // outside [t_begin, t_end)
};

/// Runs the trail from an all-zero field at t_begin through t_end - 1,
/// feeding each step the deposits whose TimeIndex equals that step.
/// Events must be sorted by TimeIndex; events outside the window are skipped
/// and counted, not fatal. Returns the snapshot at t_end - 1.
TrailField run_trail(std::span<const DepositEvent> events, TimeIndex t_begin, TimeIndex t_end,
                     const GridSpec& spec, const MarkSpec& mark, const EvaporationSpec& evap,
                     TrailRunStats* stats = nullptr);

}  // namespace stig
