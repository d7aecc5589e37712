#include "stig/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "stig/calendar.hpp"

namespace stig {

void CustomerProfile::validate() const {
  if (customer_id.empty()) throw std::invalid_argument("profile: empty customer_id");
  if (education < 0 || education > 8) {
    throw std::invalid_argument("profile " + customer_id + ": education outside 0..8");
  }
  if (income && !(*income >= 0.0)) {
    throw std::invalid_argument("profile " + customer_id + ": negative income");
  }
  if (age && !(*age > 0.0)) {
    throw std::invalid_argument("profile " + customer_id + ": non-positive age");
  }
  const auto check = [this](const std::optional<LatLon>& p, const char* which) {
    if (!p) return;
    if (!std::isfinite(p->lat) || !std::isfinite(p->lon) || p->lat < -90.0 || p->lat > 90.0 ||
        p->lon < -180.0 || p->lon > 180.0) {
      throw std::invalid_argument("profile " + customer_id + ": invalid " + which + " location");
    }
  };
  check(home, "home");
  check(work, "work");
}

std::optional<double> purchase_distance(const CustomerProfile& profile, LatLon shop) {
  std::optional<double> best;
  if (profile.home) best = haversine_m(*profile.home, shop);
  if (profile.work) {
    const double d = haversine_m(*profile.work, shop);
    if (!best || d < *best) best = d;
  }
  return best;
}

TraitSummary traits(const std::string& customer_id, std::span<const double> dist_m) {
  if (dist_m.empty()) throw std::invalid_argument("traits: no distance records");
  // Welford's online update; the n-1 denominator needs two observations.
  double mean = 0.0;
  double m2 = 0.0;
  std::int64_t n = 0;
  for (const double d : dist_m) {
    ++n;
    const double delta = d - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (d - mean);
  }
  TraitSummary s;
  s.customer_id = customer_id;
  s.avg_dist_m = mean;
  s.n_events = n;
  if (n >= 2) s.std_dist_m = std::sqrt(m2 / static_cast<double>(n - 1));
  return s;
}

namespace {

struct RunningTraits {
  double mean = 0.0;
  double m2 = 0.0;
  std::int64_t n = 0;

  void add(double d) {
    ++n;
    const double delta = d - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (d - mean);
  }
};

void fill_type(TypeDistributions& out, const std::set<std::string>& customers,
               const std::map<std::string, const CustomerProfile*>& profiles,
               const std::map<std::string, RunningTraits>& running) {
  double income_sum = 0.0;
  std::int64_t income_n = 0;
  for (const std::string& id : customers) {
    const auto prof_it = profiles.find(id);
    if (prof_it == profiles.end()) {
      ++out.unknown_customers;
      continue;
    }
    const CustomerProfile& p = *prof_it->second;
    ++out.customers;
    out.education.push_back(p.education);
    if (p.income) {
      out.income.push_back(*p.income);
      income_sum += *p.income;
      ++income_n;
    }
    if (p.age) out.age.push_back(*p.age);
    const auto run_it = running.find(id);
    if (run_it != running.end() && run_it->second.n >= 1) {
      out.avg_dist_m.push_back(run_it->second.mean);
      if (run_it->second.n >= 2) {
        out.std_dist_m.push_back(
            std::sqrt(run_it->second.m2 / static_cast<double>(run_it->second.n - 1)));
      }
    }
  }
  if (income_n > 0) out.mean_income = income_sum / static_cast<double>(income_n);
}

}  // namespace

PopulationReport hotspot_population_report(std::span<const BehaviorEvent> events,
                                           std::span<const CustomerProfile> profiles,
                                           const CellMask& permanent,
                                           std::span<const Occurrence> occurrences,
                                           int tz_offset_s) {
  std::map<std::string, const CustomerProfile*> by_id;
  for (const CustomerProfile& p : profiles) by_id.emplace(p.customer_id, &p);

  std::map<OccurrenceKey, const CellMask*> occ_masks;
  for (const Occurrence& occ : occurrences) occ_masks.emplace(occ.key, &occ.hotspots.mask);

  // Distance traits accumulate over the customer's whole history first.
  std::map<std::string, RunningTraits> running;
  std::set<std::string> without_anchor;
  for (const BehaviorEvent& ev : events) {
    const auto prof_it = by_id.find(ev.customer_id);
    if (prof_it == by_id.end()) continue;
    const std::optional<double> d = purchase_distance(*prof_it->second, ev.shop);
    if (d) {
      running[ev.customer_id].add(*d);
    } else {
      without_anchor.insert(ev.customer_id);
    }
  }

  PopulationReport report;
  report.customers_without_anchor = static_cast<std::int64_t>(without_anchor.size());

  std::set<std::string> perm_customers;
  std::set<std::string> inter_customers;
  std::set<std::string> neither_customers;
  for (const BehaviorEvent& ev : events) {
    bool is_perm = false;
    bool is_inter = false;
    if (ev.cell.row >= 0 && ev.cell.row < permanent.n_rows() && ev.cell.col >= 0 &&
        ev.cell.col < permanent.n_cols()) {
      is_perm = permanent.test(ev.cell);
      if (!is_perm) {
        const OccurrenceKey key{local_date(ev.ts, tz_offset_s), local_slot(ev.ts, tz_offset_s)};
        const auto it = occ_masks.find(key);
        is_inter = it != occ_masks.end() && it->second->test(ev.cell);
      }
    }
    if (is_perm) {
      ++report.events_permanent;
      perm_customers.insert(ev.customer_id);
    } else if (is_inter) {
      ++report.events_intermittent;
      inter_customers.insert(ev.customer_id);
    } else {
      ++report.events_neither;
      neither_customers.insert(ev.customer_id);
    }
  }

  fill_type(report.permanent, perm_customers, by_id, running);
  fill_type(report.intermittent, inter_customers, by_id, running);
  fill_type(report.neither, neither_customers, by_id, running);
  return report;
}

}  // namespace stig
