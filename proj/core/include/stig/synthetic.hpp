#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "stig/behavior.hpp"
#include "stig/calendar.hpp"
#include "stig/config.hpp"
#include "stig/events.hpp"
#include "stig/geo.hpp"
#include "stig/trail.hpp"

namespace stig {

/// A planted activity source: events drawn Poisson(rate) per active step,
/// placed uniformly over the disk of cells within radius_cells of center.
struct ClusterSpec {
  int id = 0;
  CellIndex center;
  int radius_cells = 4;
  double rate_per_step = 0.0;
  bool always_on = true;
  std::vector<TemporalTuple> schedule;  // consulted when !always_on
  double income_mean = 2000.0;
  double income_sd = 300.0;
};

struct SyntheticScenario {
  std::string name = "scenario";
  BoundingBox bbox{};
  double cell_size_m = 100.0;
  int time_step_s = 1200;
  int grid_pad_cells = -1;  // -1: pad by ceil(eps)
  DateRange period{};
  int tz_offset_s = 0;
  MarkSpec mark{};
  double delta_permanent = kDeltaPermanentDefault;
  double delta_intermittent = kDeltaIntermittentDefault;
  double tau_permanent = 0.5;
  double tau_intermittent = 0.5;
  std::vector<ClusterSpec> clusters;
  double background_rate = 0.0;  // uniform noise events per step
  double online_rate = 0.0;      // online rows per step (excluded by ingest)
  long users = 0;                // 0: size the pool near 68 events/user/year
  double background_income_mean = 2000.0;
  double background_income_sd = 300.0;
  double amount_mean = 55.0;
  double amount_sd = 25.0;

  GridSpec grid() const;
  void validate() const;
};

/// "always" or ';'-separated groups like "weekday:0-5,7;weekend:11".
std::vector<TemporalTuple> parse_schedule(const std::string& text);
std::string format_schedule(bool always_on, const std::vector<TemporalTuple>& schedule);

/// Scenario keys live in the same flat file as the analysis keys, so one
/// config drives both `generate` and `run`.
SyntheticScenario parse_scenario(const FlatConfig& cfg);

/// What the pipeline is expected to report for one planted cluster: the
/// noise-free expected trail's level set at the scenario's thresholds.
struct GroundTruthCluster {
  int id = 0;
  bool always_on = true;
  std::vector<TemporalTuple> schedule;
  CellIndex center;
  std::vector<CellIndex> cells;  // sorted row-major
};

struct GroundTruth {
  GridSpec grid;
  double tau_permanent = 0.5;
  double tau_intermittent = 0.5;
  std::vector<GroundTruthCluster> clusters;
};

struct GeneratedData {
  std::vector<Event> events;  // ascending timestamp
  std::vector<CustomerProfile> profiles;
  GroundTruth truth;
  std::int64_t cluster_events = 0;
  std::int64_t background_events = 0;
  std::int64_t online_events = 0;
};

/// Deterministic for a fixed (scenario, seed): a single RNG stream drawn in
/// a fixed order, so reruns are byte-identical.
GeneratedData generate_synthetic(const SyntheticScenario& scenario, std::uint64_t seed);

void write_ground_truth_json(std::ostream& out, const GroundTruth& truth);
GroundTruth read_ground_truth_json(std::istream& in);

}  // namespace stig
