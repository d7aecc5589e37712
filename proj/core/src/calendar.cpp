#include "stig/calendar.hpp"

#include <cstdio>
#include <stdexcept>

namespace stig {

namespace chrono = std::chrono;

DayType classify_day(chrono::sys_days date) {
  const chrono::weekday wd{date};
  return (wd == chrono::Saturday || wd == chrono::Sunday) ? DayType::kWeekend
                                                          : DayType::kWeekday;
}

std::int64_t local_midnight_utc(chrono::sys_days date, int tz_offset_s) {
  return static_cast<std::int64_t>(date.time_since_epoch().count()) * kSecondsPerDay -
         tz_offset_s;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

chrono::sys_days local_date(std::int64_t ts_utc, int tz_offset_s) {
  const std::int64_t days = floor_div(ts_utc + tz_offset_s, kSecondsPerDay);
  return chrono::sys_days{chrono::days{days}};
}

int local_slot(std::int64_t ts_utc, int tz_offset_s) {
  const std::int64_t local = ts_utc + tz_offset_s;
  std::int64_t sod = local % kSecondsPerDay;
  if (sod < 0) sod += kSecondsPerDay;
  return static_cast<int>(sod / (kSlotHours * 3600));
}

TemporalTuple tuple_of(chrono::sys_days date, int slot) {
  return TemporalTuple{classify_day(date), slot};
}

std::string day_type_name(DayType t) {
  return t == DayType::kWeekend ? "weekend" : "weekday";
}

std::string format_date(chrono::sys_days date) {
  const chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

chrono::sys_days parse_date(const std::string& text) {
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3) {
    throw std::invalid_argument("malformed date: '" + text + "'");
  }
  const chrono::year_month_day ymd{chrono::year{y}, chrono::month{m}, chrono::day{d}};
  if (!ymd.ok()) throw std::invalid_argument("invalid calendar date: '" + text + "'");
  return chrono::sys_days{ymd};
}

std::int64_t parse_timestamp_utc(const std::string& text) {
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%d-%u-%uT%u:%u:%u%n", &y, &mo, &d, &h, &mi, &s, &consumed) != 6) {
    throw std::invalid_argument("malformed timestamp: '" + text + "'");
  }
  const chrono::year_month_day ymd{chrono::year{y}, chrono::month{mo}, chrono::day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) {
    throw std::invalid_argument("invalid timestamp: '" + text + "'");
  }
  std::int64_t ts =
      static_cast<std::int64_t>(chrono::sys_days{ymd}.time_since_epoch().count()) *
          kSecondsPerDay +
      h * 3600 + mi * 60 + s;

  const std::string rest = text.substr(static_cast<std::size_t>(consumed));
  if (rest.empty() || rest == "Z") return ts;
  unsigned oh = 0, om = 0;
  char sign = 0, tail = 0;
  if (std::sscanf(rest.c_str(), "%c%u:%u%c", &sign, &oh, &om, &tail) == 3 &&
      (sign == '+' || sign == '-') && oh <= 14 && om <= 59) {
    const std::int64_t off = static_cast<std::int64_t>(oh) * 3600 + om * 60;
    return sign == '+' ? ts - off : ts + off;
  }
  throw std::invalid_argument("malformed timestamp offset: '" + text + "'");
}

std::string format_timestamp_utc(std::int64_t ts_utc) {
  const std::int64_t days = floor_div(ts_utc, kSecondsPerDay);
  std::int64_t sod = ts_utc - days * kSecondsPerDay;
  const chrono::year_month_day ymd{chrono::sys_days{chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(sod / 3600),
                static_cast<int>((sod % 3600) / 60), static_cast<int>(sod % 60));
  return buf;
}

}  // namespace stig
