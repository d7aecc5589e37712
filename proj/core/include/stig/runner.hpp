#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stig/config.hpp"
#include "stig/csv.hpp"
#include "stig/geo.hpp"
#include "stig/pipeline.hpp"

namespace stig {

/// Counts reported in the manifest and returned for tests.
struct RunArtifacts {
  GridSpec grid;
  IngestReport ingest;
  IngestReport profile_ingest;
  std::int64_t events_used = 0;
  std::int64_t events_outside_period = 0;
  std::int64_t events_outside_grid = 0;
  std::int64_t events_removed_in_permanent = 0;
  int permanent_regions = 0;
  int intermittent_regions = 0;
  std::int64_t occurrences = 0;
  std::int64_t nonempty_occurrences = 0;
  std::vector<std::string> warnings;
};

/// Full chain: ingest, permanent, removal, intermittent, matrix, summary,
/// demographic report, exports. Writes every artifact plus manifest.json into
/// out_dir; wall-clock numbers go only to timings.json so output directories
/// of identical runs compare byte-equal without it. threads_override > 0
/// replaces the config's thread count.
RunArtifacts run_pipeline(const FlatConfig& cfg, const std::string& out_dir,
                          int threads_override = 0);

/// Threshold sweep over the config's candidate lists (a default grid when the
/// lists are absent). Writes tuning.csv and manifest.json.
TuneResult run_tune(const FlatConfig& cfg, const std::string& out_dir,
                    int threads_override = 0);

/// Synthesizes a scenario into out_dir: events.csv, profiles.csv,
/// ground_truth.json, and run.cfg (the analysis keys rewired to the generated
/// files, ready for run_pipeline).
void run_generate(const FlatConfig& cfg, std::uint64_t seed, const std::string& out_dir);

/// Ingest validation only; writes ingest_report.json.
IngestReport run_ingest(const FlatConfig& cfg, const std::string& out_dir);

/// Whole-period activity heatmap (permanent-rate evaporation), CSV and PGM.
void run_export(const FlatConfig& cfg, const std::string& out_dir);

}  // namespace stig
