#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stig/behavior.hpp"
#include "stig/events.hpp"
#include "stig/geo.hpp"

namespace stig {

/// Reads one CSV record (comma separated, double-quote escaping, CRLF or LF).
/// Returns false at end of input. Quoted fields may span lines.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields);

/// Quotes the field only when it contains a comma, quote, or newline.
std::string csv_escape(const std::string& field);

void write_csv_record(std::ostream& out, const std::vector<std::string>& fields);

/// Column names for the event file; remappable because exports of the source
/// data disagree on header spelling.
struct EventSchema {
  std::string customer_id = "customer_id";
  std::string timestamp = "timestamp";
  std::string amount = "amount";
  std::string shop_id = "shop_id";
  std::string lat = "lat";
  std::string lon = "lon";
  std::string online = "online";
  std::string expense_type = "expense_type";
  std::string currency = "currency";
};

struct ProfileSchema {
  std::string customer_id = "customer_id";
  std::string income = "income";
  std::string age = "age";
  std::string education = "education";
  std::string home_lat = "home_lat";
  std::string home_lon = "home_lon";
  std::string work_lat = "work_lat";
  std::string work_lon = "work_lon";
};

/// Per-reason rejection counts; rows_read = rows_kept + sum of the reasons.
struct IngestReport {
  std::int64_t rows_read = 0;
  std::int64_t rows_kept = 0;
  std::int64_t bad_row = 0;
  std::int64_t bad_timestamp = 0;
  std::int64_t bad_coordinate = 0;
  std::int64_t out_of_area = 0;
  std::int64_t online_excluded = 0;

  std::int64_t rejected() const {
    return bad_row + bad_timestamp + bad_coordinate + out_of_area + online_excluded;
  }
};

/// Streams the event file, keeping rows that parse and fall inside the box
/// (no box = keep all coordinates in range). Throws std::runtime_error when
/// the file is missing or the header lacks a mapped column.
std::vector<Event> ingest_events(const std::string& path, const EventSchema& schema,
                                 const std::optional<BoundingBox>& box, IngestReport& report);

void write_events_csv(std::ostream& out, const std::vector<Event>& events,
                      const EventSchema& schema);

/// Profile rows reuse the same reject accounting; bad_coordinate covers
/// malformed anchors and bad_row covers field-count or numeric problems.
std::vector<CustomerProfile> ingest_profiles(const std::string& path,
                                             const ProfileSchema& schema, IngestReport& report);

void write_profiles_csv(std::ostream& out, const std::vector<CustomerProfile>& profiles,
                        const ProfileSchema& schema);

}  // namespace stig
