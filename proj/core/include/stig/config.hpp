#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stig/csv.hpp"
#include "stig/geo.hpp"

namespace stig {

/// Flat key=value file: one pair per line, '#' lines are comments, keys are
/// unique. Unknown keys are rejected so typos fail loudly.
class FlatConfig {
 public:
  static FlatConfig load(const std::string& path);
  static FlatConfig from_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;  // empty when absent

  const std::map<std::string, std::string>& raw() const { return values_; }
  const std::string& origin() const { return origin_; }

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

/// "+HH:MM", "-HH:MM", or plain seconds.
int parse_tz_offset(const std::string& text);
std::string format_tz_offset(int offset_s);

/// "min_lat,min_lon,max_lat,max_lon" in degrees.
BoundingBox parse_bbox(const std::string& text);
std::string format_bbox(const BoundingBox& box);

/// "YYYY-MM-DD..YYYY-MM-DD", both days included.
struct DateRange {
  std::chrono::sys_days first;
  std::chrono::sys_days last;
};
DateRange parse_period(const std::string& text);
std::string format_period(const DateRange& range);

/// Everything a `run` or `tune` invocation needs, typed and validated except
/// for the grid extent (resolved against the data when bbox is absent).
struct RunConfig {
  double cell_size_m = 100.0;
  int time_step_s = 1200;
  double eps_cells = 10.0;
  double intensity = 1.0;
  double top_radius_frac = 0.5;
  double delta_permanent = 0.01;
  double delta_intermittent = 0.15;
  double tau_permanent = 0.5;
  double tau_intermittent = 0.5;
  int min_area = 1;
  std::optional<BoundingBox> bbox;  // absent: derive the grid from the data
  int grid_pad_cells = -1;          // -1: pad by ceil(eps_cells)
  int timezone_offset_s = 0;
  DateRange period{};
  std::string events_path;
  std::string profiles_path;  // optional; empty disables the demographic report
  EventSchema event_schema;
  ProfileSchema profile_schema;
  bool matrix_pre_removal = false;
  bool objective_contrast = false;
  bool export_daily_heatmaps = false;
  bool heatmap_pgm = true;
  bool export_occurrence_masks = false;  // per-occurrence GeoJSON is bulky
  std::vector<double> tune_tau_permanent;
  std::vector<double> tune_tau_intermittent;
  int threads = 1;

  void validate() const;  // throws std::invalid_argument
};

/// Builds a RunConfig from the file, applying defaults and validating.
/// Scenario generator keys in the same file are tolerated and ignored here.
RunConfig parse_run_config(const FlatConfig& cfg);

/// True for keys that only the synthetic generator consumes.
bool is_scenario_key(const std::string& key);

}  // namespace stig
