#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stig/geo.hpp"
#include "stig/hotspot.hpp"
#include "stig/pipeline.hpp"

namespace stig {

/// Customer master record. Education uses the source coding: 0 means unknown,
/// 8 is the highest attained level.
struct CustomerProfile {
  std::string customer_id;
  std::optional<double> income;
  std::optional<double> age;
  int education = 0;
  std::optional<LatLon> home;
  std::optional<LatLon> work;

  void validate() const;
};

struct PurchaseDistanceRecord {
  std::string customer_id;
  std::string event_id;
  double dist_m = 0.0;
};

struct TraitSummary {
  std::string customer_id;
  double avg_dist_m = 0.0;
  std::optional<double> std_dist_m;  // sample (n-1) deviation; needs two events
  std::int64_t n_events = 0;
};

/// Distance from a shop to the customer's nearest anchor (home or work),
/// great-circle meters. Empty when the customer has neither anchor.
std::optional<double> purchase_distance(const CustomerProfile& profile, LatLon shop);

/// Per-customer distance traits. Throws std::invalid_argument on an empty
/// span; std_dist_m stays empty for a single observation.
TraitSummary traits(const std::string& customer_id, std::span<const double> dist_m);

struct BehaviorEvent {
  std::int64_t ts = 0;  // seconds since the UTC epoch
  CellIndex cell;
  std::string customer_id;
  LatLon shop;
};

/// Raw per-customer value lists for one hotspot type, ready for export.
/// Customers appear in ascending customer_id order across all vectors.
struct TypeDistributions {
  std::vector<int> education;
  std::vector<double> income;
  std::vector<double> age;
  std::vector<double> avg_dist_m;
  std::vector<double> std_dist_m;
  std::int64_t customers = 0;          // distinct profiled customers
  std::int64_t unknown_customers = 0;  // purchased here but carry no profile
  std::optional<double> mean_income;
};

struct PopulationReport {
  TypeDistributions permanent;
  TypeDistributions intermittent;
  TypeDistributions neither;
  std::int64_t events_permanent = 0;
  std::int64_t events_intermittent = 0;
  std::int64_t events_neither = 0;
  std::int64_t customers_without_anchor = 0;  // no home and no work
};

/// Classifies every event as permanent, intermittent, or neither and builds
/// per-type demographic distributions over the distinct customers involved.
/// An event is permanent when its cell lies in the permanent mask (permanent
/// wins on overlap), intermittent when the occurrence covering its local
/// (date, slot) marks the cell. Distance traits are computed over each
/// customer's full purchase history, independent of where they shopped.
PopulationReport hotspot_population_report(std::span<const BehaviorEvent> events,
                                           std::span<const CustomerProfile> profiles,
                                           const CellMask& permanent,
                                           std::span<const Occurrence> occurrences,
                                           int tz_offset_s);

}  // namespace stig
