#pragma once

#include <cstdint>
#include <string>

namespace stig {

/// One card transaction as ingested. Online purchases carry no usable shop
/// location and are excluded from spatial analysis at ingest time.
struct Event {
  std::string customer_id;
  std::int64_t ts = 0;  // seconds since the UTC epoch
  double amount = 0.0;
  std::string shop_id;
  double lat = 0.0;
  double lon = 0.0;
  bool online = false;
  std::string expense_type;
  std::string currency;
};

}  // namespace stig
