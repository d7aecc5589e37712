#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>

namespace stig {

enum class DayType { kWeekday, kWeekend };

inline constexpr int kSlotsPerDay = 12;
inline constexpr int kSlotHours = 2;
inline constexpr std::int64_t kSecondsPerDay = 86'400;

/// (day-type, 2-hour slot) key; 24 distinct tuples partition the week.
struct TemporalTuple {
  DayType day_type{DayType::kWeekday};
  int slot{0};  // slot k covers local hours [2k, 2k+2)

  auto operator<=>(const TemporalTuple&) const = default;
};

/// Saturday/Sunday -> weekend, everything else -> weekday.
DayType classify_day(std::chrono::sys_days date);

/// Seconds since the Unix epoch for local midnight of `date` in a zone
/// `tz_offset_s` seconds east of UTC.
std::int64_t local_midnight_utc(std::chrono::sys_days date, int tz_offset_s);

/// Local calendar date containing the UTC instant.
std::chrono::sys_days local_date(std::int64_t ts_utc, int tz_offset_s);

/// Local 2-hour slot index in [0, 12).
int local_slot(std::int64_t ts_utc, int tz_offset_s);

TemporalTuple tuple_of(std::chrono::sys_days date, int slot);

std::string day_type_name(DayType t);

/// "YYYY-MM-DD"
std::string format_date(std::chrono::sys_days date);

/// Parses "YYYY-MM-DD"; throws std::invalid_argument on malformed input.
std::chrono::sys_days parse_date(const std::string& text);

/// Parses ISO-8601 "YYYY-MM-DDTHH:MM:SS" with optional trailing "Z" or
/// "+hh:mm"/"-hh:mm" offset into Unix seconds. Throws on malformed input.
std::int64_t parse_timestamp_utc(const std::string& text);

/// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_timestamp_utc(std::int64_t ts_utc);

}  // namespace stig
