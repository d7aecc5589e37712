#include "stig/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

#include "stig/calendar.hpp"

namespace stig {

namespace {

std::string trimmed(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string s = trimmed(raw);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) {
    throw std::invalid_argument("config key '" + key + "': not a number: '" + raw + "'");
  }
  return value;
}

long to_long(const std::string& key, const std::string& raw) {
  const std::string s = trimmed(raw);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("config key '" + key + "': not an integer: '" + raw + "'");
  }
  return value;
}

const std::set<std::string>& known_plain_keys() {
  static const std::set<std::string> keys = {
      "cell_size_m", "time_step_s", "eps_cells", "intensity", "top_radius_frac",
      "delta_permanent", "delta_intermittent", "tau_permanent", "tau_intermittent",
      "min_area", "bbox", "grid_pad_cells", "timezone_offset", "period", "events",
      "profiles", "matrix_pre_removal", "objective_contrast", "export_daily_heatmaps",
      "heatmap_pgm", "export_occurrence_masks", "tune_tau_permanent", "tune_tau_intermittent",
      "threads",
      // event file column mapping
      "col_customer_id", "col_timestamp", "col_amount", "col_shop_id", "col_lat", "col_lon",
      "col_online", "col_expense_type", "col_currency",
      // profile file column mapping
      "pcol_customer_id", "pcol_income", "pcol_age", "pcol_education", "pcol_home_lat",
      "pcol_home_lon", "pcol_work_lat", "pcol_work_lon",
      // synthetic scenario
      "scenario", "users", "online_rate", "background_rate", "background_income_mean",
      "background_income_sd", "amount_mean", "amount_sd"};
  return keys;
}

bool known_cluster_key(const std::string& key) {
  static const std::regex pattern(
      "cluster[0-9]+_(row|col|radius_cells|rate|schedule|income_mean|income_sd)");
  return std::regex_match(key, pattern);
}

}  // namespace

bool is_scenario_key(const std::string& key) {
  static const std::set<std::string> scenario_keys = {
      "scenario", "users", "online_rate", "background_rate", "background_income_mean",
      "background_income_sd", "amount_mean", "amount_sd"};
  return scenario_keys.count(key) != 0 || known_cluster_key(key);
}

FlatConfig FlatConfig::from_string(const std::string& text, const std::string& origin) {
  FlatConfig cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trimmed(line);
    if (t.empty() || t.front() == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                  ": expected key=value");
    }
    const std::string key = trimmed(t.substr(0, eq));
    const std::string value = trimmed(t.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": empty key");
    }
    if (known_plain_keys().count(key) == 0 && !known_cluster_key(key)) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": unknown key '" +
                                  key + "'");
    }
    if (!cfg.values_.emplace(key, value).second) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": duplicate key '" +
                                  key + "'");
    }
  }
  return cfg;
}

FlatConfig FlatConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str(), path);
}

std::string FlatConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string FlatConfig::require_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end() || trimmed(it->second).empty()) {
    throw std::invalid_argument(origin_ + ": missing required key '" + key + "'");
  }
  return it->second;
}

double FlatConfig::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : to_double(key, it->second);
}

long FlatConfig::get_long(const std::string& key, long fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : to_long(key, it->second);
}

bool FlatConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string v = trimmed(it->second);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config key '" + key + "': not a boolean: '" + it->second + "'");
}

std::vector<double> FlatConfig::get_double_list(const std::string& key) const {
  std::vector<double> out;
  const auto it = values_.find(key);
  if (it == values_.end()) return out;
  std::string item;
  std::istringstream in(it->second);
  while (std::getline(in, item, ',')) out.push_back(to_double(key, item));
  if (out.empty()) throw std::invalid_argument("config key '" + key + "': empty list");
  return out;
}

int parse_tz_offset(const std::string& text) {
  const std::string s = trimmed(text);
  if (s.empty()) throw std::invalid_argument("empty timezone offset");
  int hh = 0;
  int mm = 0;
  char sign = 0;
  if (std::sscanf(s.c_str(), "%c%2d:%2d", &sign, &hh, &mm) == 3 &&
      (sign == '+' || sign == '-') && hh >= 0 && hh <= 14 && mm >= 0 && mm < 60) {
    const int total = hh * 3600 + mm * 60;
    return sign == '-' ? -total : total;
  }
  long seconds = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seconds);
  if (ec == std::errc{} && ptr == s.data() + s.size() && seconds >= -14 * 3600 &&
      seconds <= 14 * 3600) {
    return static_cast<int>(seconds);
  }
  throw std::invalid_argument("bad timezone offset '" + text + "' (use +HH:MM or seconds)");
}

std::string format_tz_offset(int offset_s) {
  if (offset_s % 60 != 0) return std::to_string(offset_s);
  char buf[16];
  const int total = offset_s < 0 ? -offset_s : offset_s;
  std::snprintf(buf, sizeof(buf), "%c%02d:%02d", offset_s < 0 ? '-' : '+', total / 3600,
                (total % 3600) / 60);
  return buf;
}

BoundingBox parse_bbox(const std::string& text) {
  std::istringstream in(text);
  std::string item;
  std::vector<double> parts;
  while (std::getline(in, item, ',')) parts.push_back(to_double("bbox", item));
  if (parts.size() != 4) {
    throw std::invalid_argument("bbox must be min_lat,min_lon,max_lat,max_lon");
  }
  const BoundingBox box{parts[0], parts[1], parts[2], parts[3]};
  box.validate();
  return box;
}

std::string format_bbox(const BoundingBox& box) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f", box.min_lat, box.min_lon, box.max_lat,
                box.max_lon);
  return buf;
}

DateRange parse_period(const std::string& text) {
  const std::size_t sep = text.find("..");
  if (sep == std::string::npos) {
    throw std::invalid_argument("period must be YYYY-MM-DD..YYYY-MM-DD (inclusive)");
  }
  DateRange range;
  range.first = parse_date(trimmed(text.substr(0, sep)));
  range.last = parse_date(trimmed(text.substr(sep + 2)));
  if (range.last < range.first) {
    throw std::invalid_argument("period ends before it starts: '" + text + "'");
  }
  return range;
}

std::string format_period(const DateRange& range) {
  return format_date(range.first) + ".." + format_date(range.last);
}

void RunConfig::validate() const {
  if (!(cell_size_m > 0.0)) throw std::invalid_argument("cell_size_m must be positive");
  if (time_step_s <= 0) throw std::invalid_argument("time_step_s must be positive");
  if (kSecondsPerDay % time_step_s != 0) {
    throw std::invalid_argument("time_step_s must divide a day evenly");
  }
  if ((kSlotHours * 3600) % time_step_s != 0) {
    throw std::invalid_argument("time_step_s must divide a 2-hour slot evenly");
  }
  if (!(eps_cells >= 0.0)) throw std::invalid_argument("eps_cells must be >= 0");
  if (!(intensity > 0.0)) throw std::invalid_argument("intensity must be positive");
  if (!(top_radius_frac >= 0.0 && top_radius_frac <= 1.0)) {
    throw std::invalid_argument("top_radius_frac must lie in [0,1]");
  }
  for (const auto& [name, value] :
       {std::pair<const char*, double>{"delta_permanent", delta_permanent},
        {"delta_intermittent", delta_intermittent}}) {
    if (!(value > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
  }
  for (const auto& [name, value] : {std::pair<const char*, double>{"tau_permanent", tau_permanent},
                                    {"tau_intermittent", tau_intermittent}}) {
    if (!(value > 0.0 && value <= 1.0)) {
      throw std::invalid_argument(std::string(name) + " must lie in (0,1]");
    }
  }
  for (const double tau : tune_tau_permanent) {
    if (!(tau > 0.0 && tau < 1.0)) {
      throw std::invalid_argument("tune_tau_permanent values must lie in (0,1)");
    }
  }
  for (const double tau : tune_tau_intermittent) {
    if (!(tau > 0.0 && tau < 1.0)) {
      throw std::invalid_argument("tune_tau_intermittent values must lie in (0,1)");
    }
  }
  if (min_area < 1) throw std::invalid_argument("min_area must be >= 1");
  if (bbox) bbox->validate();
  if (timezone_offset_s < -14 * 3600 || timezone_offset_s > 14 * 3600) {
    throw std::invalid_argument("timezone_offset out of range");
  }
  if (period.last < period.first) throw std::invalid_argument("period ends before it starts");
  if (events_path.empty()) throw std::invalid_argument("events path is required");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

namespace {

std::string resolve_against(const std::string& origin, const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  const std::size_t slash = origin.find_last_of('/');
  if (slash == std::string::npos) return path;
  return origin.substr(0, slash + 1) + path;
}

}  // namespace

RunConfig parse_run_config(const FlatConfig& cfg) {
  RunConfig rc;
  rc.cell_size_m = cfg.get_double("cell_size_m", rc.cell_size_m);
  rc.time_step_s = static_cast<int>(cfg.get_long("time_step_s", rc.time_step_s));
  rc.eps_cells = cfg.get_double("eps_cells", rc.eps_cells);
  rc.intensity = cfg.get_double("intensity", rc.intensity);
  rc.top_radius_frac = cfg.get_double("top_radius_frac", rc.top_radius_frac);
  rc.delta_permanent = cfg.get_double("delta_permanent", rc.delta_permanent);
  rc.delta_intermittent = cfg.get_double("delta_intermittent", rc.delta_intermittent);
  rc.tau_permanent = cfg.get_double("tau_permanent", rc.tau_permanent);
  rc.tau_intermittent = cfg.get_double("tau_intermittent", rc.tau_intermittent);
  rc.min_area = static_cast<int>(cfg.get_long("min_area", rc.min_area));
  if (cfg.has("bbox")) rc.bbox = parse_bbox(cfg.require_string("bbox"));
  rc.grid_pad_cells = static_cast<int>(cfg.get_long("grid_pad_cells", rc.grid_pad_cells));
  if (cfg.has("timezone_offset")) {
    rc.timezone_offset_s = parse_tz_offset(cfg.require_string("timezone_offset"));
  }
  rc.period = parse_period(cfg.require_string("period"));
  rc.events_path = resolve_against(cfg.origin(), cfg.require_string("events"));
  rc.profiles_path = resolve_against(cfg.origin(), cfg.get_string("profiles", ""));
  rc.matrix_pre_removal = cfg.get_bool("matrix_pre_removal", rc.matrix_pre_removal);
  rc.objective_contrast = cfg.get_bool("objective_contrast", rc.objective_contrast);
  rc.export_daily_heatmaps = cfg.get_bool("export_daily_heatmaps", rc.export_daily_heatmaps);
  rc.heatmap_pgm = cfg.get_bool("heatmap_pgm", rc.heatmap_pgm);
  rc.export_occurrence_masks =
      cfg.get_bool("export_occurrence_masks", rc.export_occurrence_masks);
  rc.tune_tau_permanent = cfg.get_double_list("tune_tau_permanent");
  rc.tune_tau_intermittent = cfg.get_double_list("tune_tau_intermittent");
  rc.threads = static_cast<int>(cfg.get_long("threads", rc.threads));

  rc.event_schema.customer_id = cfg.get_string("col_customer_id", rc.event_schema.customer_id);
  rc.event_schema.timestamp = cfg.get_string("col_timestamp", rc.event_schema.timestamp);
  rc.event_schema.amount = cfg.get_string("col_amount", rc.event_schema.amount);
  rc.event_schema.shop_id = cfg.get_string("col_shop_id", rc.event_schema.shop_id);
  rc.event_schema.lat = cfg.get_string("col_lat", rc.event_schema.lat);
  rc.event_schema.lon = cfg.get_string("col_lon", rc.event_schema.lon);
  rc.event_schema.online = cfg.get_string("col_online", rc.event_schema.online);
  rc.event_schema.expense_type =
      cfg.get_string("col_expense_type", rc.event_schema.expense_type);
  rc.event_schema.currency = cfg.get_string("col_currency", rc.event_schema.currency);

  rc.profile_schema.customer_id =
      cfg.get_string("pcol_customer_id", rc.profile_schema.customer_id);
  rc.profile_schema.income = cfg.get_string("pcol_income", rc.profile_schema.income);
  rc.profile_schema.age = cfg.get_string("pcol_age", rc.profile_schema.age);
  rc.profile_schema.education = cfg.get_string("pcol_education", rc.profile_schema.education);
  rc.profile_schema.home_lat = cfg.get_string("pcol_home_lat", rc.profile_schema.home_lat);
  rc.profile_schema.home_lon = cfg.get_string("pcol_home_lon", rc.profile_schema.home_lon);
  rc.profile_schema.work_lat = cfg.get_string("pcol_work_lat", rc.profile_schema.work_lat);
  rc.profile_schema.work_lon = cfg.get_string("pcol_work_lon", rc.profile_schema.work_lon);

  rc.validate();
  return rc;
}

}  // namespace stig
