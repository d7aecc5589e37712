#include "stig/pipeline.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

#include "stig/parallel.hpp"

namespace stig {

namespace chrono = std::chrono;

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Calendar month key suitable for grouping.
int month_key(chrono::sys_days date) {
  const chrono::year_month_day ymd{date};
  return static_cast<int>(ymd.year()) * 12 + static_cast<int>(static_cast<unsigned>(ymd.month()));
}

}  // namespace

void AnalysisConfig::validate() const {
  grid.validate();
  mark.validate();
  evap_permanent.validate();
  evap_intermittent.validate();
  tau_permanent.validate();
  tau_intermittent.validate();
  if (period_end <= period_start) {
    throw std::invalid_argument("analysis period must cover at least one full day");
  }
  if (kSecondsPerDay % grid.time_step_s != 0) {
    throw std::invalid_argument("time_step_s must divide a day evenly");
  }
  if ((kSlotHours * 3600) % grid.time_step_s != 0) {
    throw std::invalid_argument("time_step_s must divide a 2-hour slot evenly");
  }
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

std::int64_t AnalysisConfig::step_of(std::int64_t ts_utc) const {
  return floor_div(ts_utc - epoch_utc(), grid.time_step_s);
}

PermanentResult detect_permanent(std::span<const GridEvent> events, const AnalysisConfig& cfg) {
  cfg.validate();
  const int n_days = cfg.n_days();
  const int spd = cfg.steps_per_day();
  const std::int64_t total_steps = static_cast<std::int64_t>(n_days) * spd;

  PermanentResult result;
  result.dates.reserve(static_cast<std::size_t>(n_days));
  for (int d = 0; d < n_days; ++d) result.dates.push_back(cfg.period_start + chrono::days{d});

  // Bucket deposits per local calendar day.
  std::vector<std::vector<DepositEvent>> per_day(static_cast<std::size_t>(n_days));
  for (const GridEvent& ev : events) {
    const std::int64_t step = cfg.step_of(ev.ts);
    if (step < 0 || step >= total_steps) {
      ++result.events_outside_period;
      continue;
    }
    per_day[static_cast<std::size_t>(step / spd)].push_back({TimeIndex{step}, ev.cell});
    ++result.events_used;
  }

  result.daily_masks.assign(static_cast<std::size_t>(n_days),
                            CellMask(cfg.grid.n_rows, cfg.grid.n_cols));
  parallel_for(static_cast<std::size_t>(n_days), cfg.threads, [&](std::size_t d) {
    auto& deposits = per_day[d];
    std::stable_sort(deposits.begin(), deposits.end(),
                     [](const DepositEvent& a, const DepositEvent& b) { return a.t < b.t; });
    const TimeIndex begin{static_cast<std::int64_t>(d) * spd};
    const TimeIndex end{begin.step + spd};
    const TrailField trail =
        run_trail(deposits, begin, end, cfg.grid, cfg.mark, cfg.evap_permanent);
    // Daily masks are intermediates; the area filter applies once, after the
    // intersection.
    result.daily_masks[d] = extract(trail, ThresholdSpec{cfg.tau_permanent.tau, 1}).mask;
  });

  for (int d = 0; d < n_days; ++d) {
    if (per_day[static_cast<std::size_t>(d)].empty()) {
      result.warnings.push_back("no events on " + format_date(result.dates[d]) +
                                "; its empty mask empties the permanent intersection");
    }
  }

  const CellMask intersection = intersect_masks(result.daily_masks);
  result.hotspots.regions = label_regions(intersection, cfg.tau_permanent.min_area);
  result.hotspots.mask =
      mask_from_regions(result.hotspots.regions, cfg.grid.n_rows, cfg.grid.n_cols);
  return result;
}

std::vector<GridEvent> remove_in_mask(std::span<const GridEvent> events, const CellMask& mask,
                                      std::int64_t* removed) {
  std::vector<GridEvent> kept;
  kept.reserve(events.size());
  std::int64_t dropped = 0;
  for (const GridEvent& ev : events) {
    if (mask.test(ev.cell)) {
      ++dropped;
    } else {
      kept.push_back(ev);
    }
  }
  if (removed != nullptr) *removed = dropped;
  return kept;
}

std::vector<Occurrence> detect_intermittent(std::span<const GridEvent> events,
                                            const AnalysisConfig& cfg) {
  cfg.validate();
  const int n_days = cfg.n_days();
  const int spd = cfg.steps_per_day();
  const int sps = cfg.steps_per_slot();
  const std::int64_t total_steps = static_cast<std::int64_t>(n_days) * spd;
  const std::size_t n_occ = static_cast<std::size_t>(n_days) * kSlotsPerDay;

  std::vector<std::vector<DepositEvent>> per_occ(n_occ);
  for (const GridEvent& ev : events) {
    const std::int64_t step = cfg.step_of(ev.ts);
    if (step < 0 || step >= total_steps) continue;
    const std::size_t day = static_cast<std::size_t>(step / spd);
    const std::size_t slot = static_cast<std::size_t>((step % spd) / sps);
    per_occ[day * kSlotsPerDay + slot].push_back({TimeIndex{step}, ev.cell});
  }

  std::vector<Occurrence> occurrences(n_occ);
  parallel_for(n_occ, cfg.threads, [&](std::size_t i) {
    const int day = static_cast<int>(i) / kSlotsPerDay;
    const int slot = static_cast<int>(i) % kSlotsPerDay;
    const chrono::sys_days date = cfg.period_start + chrono::days{day};

    auto& deposits = per_occ[i];
    std::stable_sort(deposits.begin(), deposits.end(),
                     [](const DepositEvent& a, const DepositEvent& b) { return a.t < b.t; });
    const TimeIndex begin{static_cast<std::int64_t>(day) * spd + slot * sps};
    const TimeIndex end{begin.step + sps};
    const TrailField trail =
        run_trail(deposits, begin, end, cfg.grid, cfg.mark, cfg.evap_intermittent);

    occurrences[i] = Occurrence{OccurrenceKey{date, slot}, tuple_of(date, slot),
                                extract(trail, cfg.tau_intermittent)};
  });
  return occurrences;
}

SimilarityMatrix similarity_matrix(std::span<const Occurrence> occurrences) {
  std::vector<std::size_t> order(occurrences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return occurrences[a].key < occurrences[b].key;
  });

  SimilarityMatrix m;
  m.labels.reserve(order.size());
  for (std::size_t i : order) m.labels.push_back(occurrences[i].key);
  const std::size_t n = order.size();
  m.values.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    m.values[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = jaccard(occurrences[order[i]].hotspots, occurrences[order[j]].hotspots);
      m.values[i * n + j] = s;
      m.values[j * n + i] = s;
    }
  }
  return m;
}

IntermittentSummary summarize_intermittent(std::span<const Occurrence> occurrences,
                                           int min_area, int n_rows, int n_cols) {
  std::map<std::pair<int, TemporalTuple>, std::vector<const CellMask*>> groups;
  for (const Occurrence& occ : occurrences) {
    groups[{month_key(occ.key.date), occ.tuple}].push_back(&occ.hotspots.mask);
  }

  IntermittentSummary out;
  out.mask = CellMask(n_rows, n_cols);
  const std::size_t n_cells = static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(n_cols);
  std::vector<std::int32_t> votes(n_cells);
  for (const auto& [key, masks] : groups) {
    std::fill(votes.begin(), votes.end(), 0);
    for (const CellMask* m : masks) {
      if (m->n_rows() != n_rows || m->n_cols() != n_cols) {
        throw std::invalid_argument("summarize_intermittent: mask shape mismatch");
      }
      for (const CellIndex& c : m->cells()) ++votes[static_cast<std::size_t>(c.row) * n_cols + c.col];
    }
    const std::int32_t quorum =
        static_cast<std::int32_t>((masks.size() + 1) / 2);  // at least half
    for (std::size_t i = 0; i < n_cells; ++i) {
      if (votes[i] >= quorum) {
        out.mask.set(CellIndex{static_cast<int>(i / n_cols), static_cast<int>(i % n_cols)});
      }
    }
  }
  out.regions = label_regions(out.mask, min_area);
  out.mask = mask_from_regions(out.regions, n_rows, n_cols);
  return out;
}

double tuning_objective(std::span<const Occurrence> occurrences, bool contrast) {
  std::map<std::pair<int, TemporalTuple>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < occurrences.size(); ++i) {
    groups[{month_key(occurrences[i].key.date), occurrences[i].tuple}].push_back(i);
  }

  double group_sum = 0.0;
  std::size_t group_count = 0;
  for (const auto& [key, idx] : groups) {
    if (idx.size() < 2) continue;  // a single occurrence contributes nothing
    double pair_sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        pair_sum += jaccard(occurrences[idx[a]].hotspots, occurrences[idx[b]].hotspots);
        ++pairs;
      }
    }
    group_sum += pair_sum / static_cast<double>(pairs);
    ++group_count;
  }
  if (group_count == 0) {
    throw std::runtime_error(
        "tuning objective undefined: no temporal tuple occurs twice within a month");
  }
  double objective = group_sum / static_cast<double>(group_count);

  if (contrast) {
    // Same-month pairs with different tuples.
    std::map<int, std::vector<std::size_t>> by_month;
    for (std::size_t i = 0; i < occurrences.size(); ++i) {
      by_month[month_key(occurrences[i].key.date)].push_back(i);
    }
    double inter_sum = 0.0;
    std::size_t inter_pairs = 0;
    for (const auto& [month, idx] : by_month) {
      for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
          if (occurrences[idx[a]].tuple == occurrences[idx[b]].tuple) continue;
          inter_sum += jaccard(occurrences[idx[a]].hotspots, occurrences[idx[b]].hotspots);
          ++inter_pairs;
        }
      }
    }
    if (inter_pairs > 0) objective -= inter_sum / static_cast<double>(inter_pairs);
  }
  return objective;
}

TuneResult tune_thresholds(std::span<const GridEvent> events, const AnalysisConfig& cfg,
                           std::span<const TuneCandidate> candidates) {
  cfg.validate();
  if (candidates.empty()) throw std::invalid_argument("tune_thresholds: no candidates");
  for (const TuneCandidate& c : candidates) {
    if (!(c.tau_permanent > 0.0 && c.tau_permanent < 1.0) ||
        !(c.tau_intermittent > 0.0 && c.tau_intermittent < 1.0)) {
      throw std::invalid_argument("tune candidates must lie in (0,1)");
    }
  }

  // The objective is undefined when the period's calendar gives no tuple two
  // occurrences in one month; fail before sweeping.
  {
    std::map<std::pair<int, TemporalTuple>, int> counts;
    bool ok = false;
    for (int d = 0; d < cfg.n_days() && !ok; ++d) {
      const chrono::sys_days date = cfg.period_start + chrono::days{d};
      for (int s = 0; s < kSlotsPerDay; ++s) {
        if (++counts[{month_key(date), tuple_of(date, s)}] >= 2) {
          ok = true;
          break;
        }
      }
    }
    if (!ok) {
      throw std::runtime_error(
          "tuning objective undefined: no temporal tuple occurs twice within a month");
    }
  }

  TuneResult result;
  result.table.reserve(candidates.size());
  for (const TuneCandidate& cand : candidates) {
    AnalysisConfig trial = cfg;
    trial.tau_permanent.tau = cand.tau_permanent;
    trial.tau_intermittent.tau = cand.tau_intermittent;

    const PermanentResult permanent = detect_permanent(events, trial);
    const std::vector<GridEvent> residual = remove_in_mask(events, permanent.hotspots.mask);
    const std::vector<Occurrence> occurrences = detect_intermittent(residual, trial);
    const IntermittentSummary summary = summarize_intermittent(
        occurrences, trial.tau_intermittent.min_area, trial.grid.n_rows, trial.grid.n_cols);

    TuneEntry entry;
    entry.candidate = cand;
    entry.objective = tuning_objective(occurrences, trial.objective_contrast);
    entry.permanent_regions = static_cast<int>(permanent.hotspots.regions.size());
    entry.intermittent_regions = static_cast<int>(summary.regions.size());
    result.table.push_back(entry);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.table.size(); ++i) {
    const TuneEntry& a = result.table[i];
    const TuneEntry& b = result.table[best];
    const bool better =
        a.objective > b.objective ||
        (a.objective == b.objective &&
         (a.candidate.tau_permanent > b.candidate.tau_permanent ||
          (a.candidate.tau_permanent == b.candidate.tau_permanent &&
           a.candidate.tau_intermittent > b.candidate.tau_intermittent)));
    if (better) best = i;
  }
  result.best = result.table[best].candidate;
  return result;
}

}  // namespace stig
