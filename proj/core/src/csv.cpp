#include "stig/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

#include "stig/calendar.hpp"

namespace stig {

bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  int c;
  while ((c = in.get()) != std::char_traits<char>::eof()) {
    any = true;
    const char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get();
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\r') {
      if (in.peek() == '\n') in.get();
      fields.push_back(std::move(field));
      return true;
    } else if (ch == '\n') {
      fields.push_back(std::move(field));
      return true;
    } else {
      field += ch;
    }
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (const char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

void write_csv_record(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    out << csv_escape(fields[i]);
  }
  out << '\n';
}

namespace {

std::string trimmed(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::optional<double> parse_double(const std::string& raw) {
  const std::string s = trimmed(raw);
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<long> parse_long(const std::string& raw) {
  const std::string s = trimmed(raw);
  if (s.empty()) return std::nullopt;
  long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<bool> parse_bool(const std::string& raw) {
  std::string s = trimmed(raw);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  return std::nullopt;
}

bool valid_latlon(double lat, double lon) {
  return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 && lat <= 90.0 &&
         lon >= -180.0 && lon <= 180.0;
}

std::string fmt_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

class HeaderMap {
 public:
  explicit HeaderMap(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) index_.emplace(trimmed(header[i]), i);
    width_ = header.size();
  }

  std::size_t require(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) {
      throw std::runtime_error("missing column '" + name + "' in header");
    }
    return it->second;
  }

  std::size_t width() const { return width_; }

 private:
  std::map<std::string, std::size_t> index_;
  std::size_t width_ = 0;
};

bool blank_record(const std::vector<std::string>& fields) {
  return fields.size() == 1 && trimmed(fields[0]).empty();
}

}  // namespace

std::vector<Event> ingest_events(const std::string& path, const EventSchema& schema,
                                 const std::optional<BoundingBox>& box, IngestReport& report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open event file: " + path);
  if (box) box->validate();

  std::vector<std::string> fields;
  if (!read_csv_record(in, fields) || blank_record(fields)) {
    throw std::runtime_error("event file has no header: " + path);
  }
  const HeaderMap header(fields);
  const std::size_t i_customer = header.require(schema.customer_id);
  const std::size_t i_ts = header.require(schema.timestamp);
  const std::size_t i_amount = header.require(schema.amount);
  const std::size_t i_shop = header.require(schema.shop_id);
  const std::size_t i_lat = header.require(schema.lat);
  const std::size_t i_lon = header.require(schema.lon);
  const std::size_t i_online = header.require(schema.online);
  const std::size_t i_expense = header.require(schema.expense_type);
  const std::size_t i_currency = header.require(schema.currency);

  std::vector<Event> events;
  while (read_csv_record(in, fields)) {
    if (blank_record(fields)) continue;
    ++report.rows_read;
    if (fields.size() != header.width()) {
      ++report.bad_row;
      continue;
    }
    const std::optional<bool> online = parse_bool(fields[i_online]);
    if (!online) {
      ++report.bad_row;
      continue;
    }
    if (*online) {
      ++report.online_excluded;
      continue;
    }
    std::int64_t ts = 0;
    try {
      ts = parse_timestamp_utc(trimmed(fields[i_ts]));
    } catch (const std::invalid_argument&) {
      ++report.bad_timestamp;
      continue;
    }
    const std::optional<double> lat = parse_double(fields[i_lat]);
    const std::optional<double> lon = parse_double(fields[i_lon]);
    if (!lat || !lon || !valid_latlon(*lat, *lon)) {
      ++report.bad_coordinate;
      continue;
    }
    const std::optional<double> amount = parse_double(fields[i_amount]);
    if (!amount) {
      ++report.bad_row;
      continue;
    }
    if (box && !box->contains(*lat, *lon)) {
      ++report.out_of_area;
      continue;
    }
    Event ev;
    ev.customer_id = trimmed(fields[i_customer]);
    ev.ts = ts;
    ev.amount = *amount;
    ev.shop_id = trimmed(fields[i_shop]);
    ev.lat = *lat;
    ev.lon = *lon;
    ev.online = false;
    ev.expense_type = trimmed(fields[i_expense]);
    ev.currency = trimmed(fields[i_currency]);
    events.push_back(std::move(ev));
    ++report.rows_kept;
  }
  return events;
}

void write_events_csv(std::ostream& out, const std::vector<Event>& events,
                      const EventSchema& schema) {
  write_csv_record(out, {schema.customer_id, schema.timestamp, schema.amount, schema.shop_id,
                         schema.online, schema.expense_type, schema.currency, schema.lat,
                         schema.lon});
  for (const Event& ev : events) {
    write_csv_record(out, {ev.customer_id, format_timestamp_utc(ev.ts),
                           fmt_fixed(ev.amount, 2), ev.shop_id, ev.online ? "true" : "false",
                           ev.expense_type, ev.currency,
                           ev.online ? std::string{} : fmt_fixed(ev.lat, 9),
                           ev.online ? std::string{} : fmt_fixed(ev.lon, 9)});
  }
}

std::vector<CustomerProfile> ingest_profiles(const std::string& path,
                                             const ProfileSchema& schema, IngestReport& report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open profile file: " + path);

  std::vector<std::string> fields;
  if (!read_csv_record(in, fields) || blank_record(fields)) {
    throw std::runtime_error("profile file has no header: " + path);
  }
  const HeaderMap header(fields);
  const std::size_t i_customer = header.require(schema.customer_id);
  const std::size_t i_income = header.require(schema.income);
  const std::size_t i_age = header.require(schema.age);
  const std::size_t i_education = header.require(schema.education);
  const std::size_t i_home_lat = header.require(schema.home_lat);
  const std::size_t i_home_lon = header.require(schema.home_lon);
  const std::size_t i_work_lat = header.require(schema.work_lat);
  const std::size_t i_work_lon = header.require(schema.work_lon);

  std::vector<CustomerProfile> profiles;
  std::set<std::string> seen;
  const auto anchor = [&](const std::string& lat_raw, const std::string& lon_raw,
                          std::optional<LatLon>& out, bool& bad) {
    const bool lat_blank = trimmed(lat_raw).empty();
    const bool lon_blank = trimmed(lon_raw).empty();
    if (lat_blank && lon_blank) return;  // anchor absent
    const std::optional<double> lat = parse_double(lat_raw);
    const std::optional<double> lon = parse_double(lon_raw);
    if (!lat || !lon || !valid_latlon(*lat, *lon)) {
      bad = true;
      return;
    }
    out = LatLon{*lat, *lon};
  };

  while (read_csv_record(in, fields)) {
    if (blank_record(fields)) continue;
    ++report.rows_read;
    if (fields.size() != header.width()) {
      ++report.bad_row;
      continue;
    }
    CustomerProfile p;
    p.customer_id = trimmed(fields[i_customer]);
    if (p.customer_id.empty() || !seen.insert(p.customer_id).second) {
      ++report.bad_row;
      continue;
    }
    const std::string income_raw = trimmed(fields[i_income]);
    if (!income_raw.empty()) {
      const std::optional<double> income = parse_double(income_raw);
      if (!income || *income < 0.0) {
        ++report.bad_row;
        continue;
      }
      p.income = income;
    }
    const std::string age_raw = trimmed(fields[i_age]);
    if (!age_raw.empty()) {
      const std::optional<double> age = parse_double(age_raw);
      if (!age || *age <= 0.0) {
        ++report.bad_row;
        continue;
      }
      p.age = age;
    }
    const std::optional<long> education = parse_long(fields[i_education]);
    if (!education || *education < 0 || *education > 8) {
      ++report.bad_row;
      continue;
    }
    p.education = static_cast<int>(*education);
    bool bad_anchor = false;
    anchor(fields[i_home_lat], fields[i_home_lon], p.home, bad_anchor);
    anchor(fields[i_work_lat], fields[i_work_lon], p.work, bad_anchor);
    if (bad_anchor) {
      ++report.bad_coordinate;
      continue;
    }
    profiles.push_back(std::move(p));
    ++report.rows_kept;
  }
  return profiles;
}

void write_profiles_csv(std::ostream& out, const std::vector<CustomerProfile>& profiles,
                        const ProfileSchema& schema) {
  write_csv_record(out, {schema.customer_id, schema.income, schema.age, schema.education,
                         schema.home_lat, schema.home_lon, schema.work_lat, schema.work_lon});
  for (const CustomerProfile& p : profiles) {
    write_csv_record(
        out, {p.customer_id, p.income ? fmt_fixed(*p.income, 2) : std::string{},
              p.age ? fmt_fixed(*p.age, 1) : std::string{}, std::to_string(p.education),
              p.home ? fmt_fixed(p.home->lat, 9) : std::string{},
              p.home ? fmt_fixed(p.home->lon, 9) : std::string{},
              p.work ? fmt_fixed(p.work->lat, 9) : std::string{},
              p.work ? fmt_fixed(p.work->lon, 9) : std::string{}});
  }
}

}  // namespace stig
