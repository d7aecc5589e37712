#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stig/calendar.hpp"
#include "stig/geo.hpp"
#include "stig/hotspot.hpp"
#include "stig/trail.hpp"

namespace stig {

/// An event already mapped to grid coordinates. `customer` indexes an
/// external customer table; -1 when unknown.
struct GridEvent {
  std::int64_t ts{};  // Unix seconds, UTC
  CellIndex cell;
  std::int32_t customer{-1};
};

/// Everything the detection procedure needs: grid, mark geometry, the two
/// evaporation rates and thresholds, the analysis period, and the local
/// timezone. The permanent analysis runs one trail per local calendar day;
/// the intermittent analysis one trail per 2-hour slot occurrence.
struct AnalysisConfig {
  GridSpec grid;
  MarkSpec mark;
  EvaporationSpec evap_permanent{kDeltaPermanentDefault};
  EvaporationSpec evap_intermittent{kDeltaIntermittentDefault};
  ThresholdSpec tau_permanent{0.5, 1};
  ThresholdSpec tau_intermittent{0.5, 1};
  std::chrono::sys_days period_start;
  std::chrono::sys_days period_end;  // exclusive
  int tz_offset_s{0};
  int threads{1};
  bool matrix_pre_removal{false};   // similarity matrix before permanent removal
  bool objective_contrast{false};   // tuning objective: intra minus inter

  void validate() const;

  /// UTC instant of local midnight at period_start.
  std::int64_t epoch_utc() const { return local_midnight_utc(period_start, tz_offset_s); }
  int n_days() const {
    return static_cast<int>((period_end - period_start).count());
  }
  int steps_per_day() const { return static_cast<int>(kSecondsPerDay) / grid.time_step_s; }
  int steps_per_slot() const { return kSlotHours * 3600 / grid.time_step_s; }

  /// Global step index since the epoch; negative or past-the-end values mean
  /// the event falls outside the period.
  std::int64_t step_of(std::int64_t ts_utc) const;
};

struct PermanentResult {
  HotspotSet hotspots;                       // intersection over all days, labeled
  std::vector<std::chrono::sys_days> dates;  // one entry per day in the period
  std::vector<CellMask> daily_masks;         // aligned with dates (diagnostics)
  std::vector<std::string> warnings;         // e.g. days with zero events
  std::int64_t events_used{};
  std::int64_t events_outside_period{};
};

/// First stage: per local day, run a trail over the day's steps with the
/// permanent evaporation rate, threshold it, and intersect the daily masks
/// over the whole period.
PermanentResult detect_permanent(std::span<const GridEvent> events, const AnalysisConfig& cfg);

/// Second stage: drop every event whose cell lies in the mask.
std::vector<GridEvent> remove_in_mask(std::span<const GridEvent> events, const CellMask& mask,
                                      std::int64_t* removed = nullptr);

struct OccurrenceKey {
  std::chrono::sys_days date;
  int slot{};

  auto operator<=>(const OccurrenceKey&) const = default;
};

/// One (date, slot) trail run of the intermittent analysis.
struct Occurrence {
  OccurrenceKey key;
  TemporalTuple tuple;
  HotspotSet hotspots;
};

/// Third stage: one trail per (date, slot) occurrence with the intermittent
/// evaporation rate and threshold. Covers every slot of every day in the
/// period; empty slots yield empty hotspot sets.
std::vector<Occurrence> detect_intermittent(std::span<const GridEvent> events,
                                            const AnalysisConfig& cfg);

/// Square Jaccard matrix over chronologically ordered occurrences.
struct SimilarityMatrix {
  std::vector<OccurrenceKey> labels;
  std::vector<double> values;  // row-major, labels.size() x labels.size()

  std::size_t size() const { return labels.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * labels.size() + j]; }
};

SimilarityMatrix similarity_matrix(std::span<const Occurrence> occurrences);

/// Consistent per-tuple hotspots: within each calendar month, a cell counts
/// for a TemporalTuple when at least half of that tuple's occurrences mark it
/// (a majority vote; unlike a strict intersection it is not dragged down by
/// one noisy occurrence). The union of the per-tuple majority masks is
/// labeled into the distinct intermittent regions reported by the run.
struct IntermittentSummary {
  CellMask mask;
  std::vector<Region> regions;
};

IntermittentSummary summarize_intermittent(std::span<const Occurrence> occurrences,
                                           int min_area, int n_rows, int n_cols);

/// Mean Jaccard over all pairs of occurrences sharing a TemporalTuple within
/// the same calendar month, averaged over (month, tuple) groups with >= 2
/// occurrences. With contrast = true, subtracts the mean over same-month
/// pairs with different tuples. Throws std::runtime_error when no group has
/// two occurrences.
double tuning_objective(std::span<const Occurrence> occurrences, bool contrast);

struct TuneCandidate {
  double tau_permanent{};
  double tau_intermittent{};
};

struct TuneEntry {
  TuneCandidate candidate;
  double objective{};
  int permanent_regions{};
  int intermittent_regions{};
};

struct TuneResult {
  TuneCandidate best;
  std::vector<TuneEntry> table;  // in candidate order
};

/// Grid sweep over candidate (tau_p, tau_i) pairs: each runs the full
/// detect_permanent -> remove -> detect_intermittent chain and scores the
/// tuning objective. Ties break toward larger tau_p, then larger tau_i.
TuneResult tune_thresholds(std::span<const GridEvent> events, const AnalysisConfig& cfg,
                           std::span<const TuneCandidate> candidates);

}  // namespace stig
