#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "stig/hotspot.hpp"
#include "stig/trail.hpp"

using namespace stig;

namespace {

GridSpec grid(int rows, int cols) {
  GridSpec spec;
  spec.origin_lat = 41.0;
  spec.origin_lon = 29.0;
  spec.cell_size_m = 100.0;
  spec.time_step_s = 1200;
  spec.n_rows = rows;
  spec.n_cols = cols;
  return spec;
}

TrailField random_trail(std::mt19937_64& rng, int rows, int cols, double fill = 0.3) {
  TrailField trail(grid(rows, cols));
  std::uniform_real_distribution<double> value(0.0, 10.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (TrailUnit& v : trail.values()) {
    if (coin(rng) < fill) v = to_trail_units(value(rng));
  }
  return trail;
}

CellMask random_mask(std::mt19937_64& rng, int rows, int cols, double fill) {
  CellMask mask(rows, cols);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (coin(rng) < fill) mask.set(r, c);
    }
  }
  return mask;
}

// Brute-force set arithmetic over explicit coordinate sets.
double oracle_jaccard(const CellMask& a, const CellMask& b) {
  std::set<std::pair<int, int>> sa, sb;
  for (const CellIndex& c : a.cells()) sa.insert({c.row, c.col});
  for (const CellIndex& c : b.cells()) sb.insert({c.row, c.col});
  int inter = 0;
  for (const auto& c : sa) {
    if (sb.count(c)) ++inter;
  }
  std::set<std::pair<int, int>> uni = sa;
  uni.insert(sb.begin(), sb.end());
  if (uni.empty()) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni.size());
}

}  // namespace

TEST_CASE("extract keeps exactly the cells above the relative cutoff") {
  TrailField trail(grid(4, 4));
  trail.at(0, 0) = to_trail_units(5.0);
  trail.at(1, 1) = to_trail_units(2.5);
  trail.at(2, 2) = to_trail_units(2.0);  // exactly tau * max: excluded (strict)
  trail.at(3, 3) = to_trail_units(1.9);

  const HotspotSet hs = extract(trail, ThresholdSpec{0.4, 1});
  CHECK(hs.mask.test(0, 0));
  CHECK(hs.mask.test(1, 1));
  CHECK_FALSE(hs.mask.test(2, 2));
  CHECK_FALSE(hs.mask.test(3, 3));
  CHECK(hs.mask.count() == 2);
}

TEST_CASE("all-zero trail yields an empty hotspot set") {
  const TrailField trail(grid(5, 5));
  const HotspotSet hs = extract(trail, ThresholdSpec{0.5, 1});
  CHECK(hs.mask.empty());
  CHECK(hs.regions.empty());
}

TEST_CASE("tau of one empties the mask") {
  TrailField trail(grid(3, 3));
  trail.at(1, 1) = to_trail_units(1.0);
  const HotspotSet hs = extract(trail, ThresholdSpec{1.0, 1});
  CHECK(hs.mask.empty());
}

TEST_CASE("diagonal contact joins regions") {
  CellMask mask(4, 4);
  mask.set(0, 0);
  mask.set(1, 1);
  const auto regions = label_regions(mask, 1);
  REQUIRE(regions.size() == 1);
  CHECK(regions[0].area() == 2);
}

TEST_CASE("labels are assigned in row-major discovery order") {
  CellMask mask(5, 5);
  mask.set(0, 4);
  mask.set(2, 0);
  mask.set(4, 2);
  const auto regions = label_regions(mask, 1);
  REQUIRE(regions.size() == 3);
  CHECK(regions[0].label == 1);
  CHECK(regions[0].cells[0] == CellIndex{0, 4});
  CHECK(regions[1].cells[0] == CellIndex{2, 0});
  CHECK(regions[2].cells[0] == CellIndex{4, 2});
}

TEST_CASE("min_area drops small components from regions and mask") {
  TrailField trail(grid(6, 6));
  trail.at(0, 0) = to_trail_units(5.0);
  trail.at(3, 3) = to_trail_units(5.0);
  trail.at(3, 4) = to_trail_units(5.0);
  const HotspotSet hs = extract(trail, ThresholdSpec{0.5, 2});
  REQUIRE(hs.regions.size() == 1);
  CHECK(hs.regions[0].area() == 2);
  CHECK_FALSE(hs.mask.test(0, 0));
  CHECK(hs.mask.test(3, 3));
}

TEST_CASE("marks ten cells apart aggregate into one region, twenty-one into two") {
  const GridSpec spec = grid(40, 60);
  const MarkSpec mark{10.0, 1.0, 0.5};
  const EvaporationSpec evap{0.15};

  TrailField zero(spec, TimeIndex{0});
  const std::vector<CellIndex> near{{20, 20}, {20, 30}};
  const TrailField joined = step(zero, near, mark, evap);
  CellMask above_near(spec.n_rows, spec.n_cols);
  for (int r = 0; r < spec.n_rows; ++r) {
    for (int c = 0; c < spec.n_cols; ++c) {
      if (joined.at(r, c) > 0) above_near.set(r, c);
    }
  }
  CHECK(label_regions(above_near, 1).size() == 1);

  const std::vector<CellIndex> far{{20, 15}, {20, 36}};
  const TrailField split = step(zero, far, mark, evap);
  CellMask above_far(spec.n_rows, spec.n_cols);
  for (int r = 0; r < spec.n_rows; ++r) {
    for (int c = 0; c < spec.n_cols; ++c) {
      if (split.at(r, c) > 0) above_far.set(r, c);
    }
  }
  CHECK(label_regions(above_far, 1).size() == 2);
}

TEST_CASE("extraction properties hold on randomized trails") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> tau_lo(0.05, 0.45);
  std::uniform_real_distribution<double> tau_hi(0.5, 0.95);

  for (int instance = 0; instance < 300; ++instance) {
    const TrailField trail = random_trail(rng, 12, 12);
    const double t1 = tau_lo(rng);
    const double t2 = tau_hi(rng);
    const HotspotSet lo = extract(trail, ThresholdSpec{t1, 1});
    const HotspotSet hi = extract(trail, ThresholdSpec{t2, 1});

    // Area monotonicity: the higher threshold's mask is a subset.
    for (const CellIndex& c : hi.mask.cells()) CHECK(lo.mask.test(c));

    // Scale invariance of the relative threshold.
    for (const double k : {0.5, 3.0, 100.0}) {
      TrailField scaled = trail;
      for (TrailUnit& v : scaled.values()) {
        v = static_cast<TrailUnit>(std::llround(static_cast<double>(v) * k));
      }
      const HotspotSet again = extract(scaled, ThresholdSpec{t1, 1});
      CHECK(again.mask == lo.mask);
    }

    // Regions partition the mask.
    CellMask rebuilt(12, 12);
    std::int64_t total = 0;
    for (const Region& region : lo.regions) {
      for (const CellIndex& c : region.cells) {
        CHECK_FALSE(rebuilt.test(c));  // pairwise disjoint
        rebuilt.set(c);
        ++total;
      }
    }
    CHECK(rebuilt == lo.mask);
    CHECK(total == lo.mask.count());
  }
}

TEST_CASE("jaccard arithmetic examples") {
  CellMask a(4, 4), b(4, 4);
  a.set(0, 0);
  a.set(0, 1);
  a.set(0, 2);
  a.set(1, 0);
  b.set(0, 0);
  b.set(0, 1);
  b.set(0, 2);
  b.set(2, 2);
  b.set(2, 3);
  // |A ∩ B| = 3, |A ∪ B| = 6.
  CHECK(jaccard(a, b) == doctest::Approx(0.5));

  CHECK(jaccard(a, a) == 1.0);
  const CellMask empty1(4, 4), empty2(4, 4);
  CHECK(jaccard(empty1, empty2) == 1.0);

  CellMask c(4, 4);
  c.set(3, 3);
  CHECK(jaccard(a, c) == 0.0);
  CHECK(jaccard(a, empty1) == 0.0);

  const CellMask other_shape(5, 4);
  CHECK_THROWS_AS(jaccard(a, other_shape), std::invalid_argument);
}

TEST_CASE("jaccard matches brute-force set arithmetic on random masks") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> fill(0.0, 0.6);
  for (int instance = 0; instance < 400; ++instance) {
    const CellMask a = random_mask(rng, 16, 16, fill(rng));
    const CellMask b = random_mask(rng, 16, 16, fill(rng));
    const double got = jaccard(a, b);
    CHECK(got == oracle_jaccard(a, b));
    CHECK(got == jaccard(b, a));
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);
    CHECK(jaccard(a, a) == 1.0);
  }
}

TEST_CASE("mask intersection and union match brute-force loops") {
  std::mt19937_64 rng(57);
  for (int instance = 0; instance < 100; ++instance) {
    std::vector<CellMask> masks;
    for (int m = 0; m < 3; ++m) masks.push_back(random_mask(rng, 16, 16, 0.5));
    const CellMask inter = intersect_masks(masks);
    const CellMask uni = union_masks(masks);
    for (int r = 0; r < 16; ++r) {
      for (int c = 0; c < 16; ++c) {
        CHECK(inter.test(r, c) == (masks[0].test(r, c) && masks[1].test(r, c) &&
                                   masks[2].test(r, c)));
        CHECK(uni.test(r, c) == (masks[0].test(r, c) || masks[1].test(r, c) ||
                                 masks[2].test(r, c)));
      }
    }
  }

  const std::vector<CellMask> single{random_mask(rng, 8, 8, 0.4)};
  CHECK(intersect_masks(single) == single[0]);

  std::vector<CellMask> with_empty{random_mask(rng, 8, 8, 0.7), CellMask(8, 8)};
  CHECK(intersect_masks(with_empty).empty());

  CHECK_THROWS_AS(intersect_masks(std::vector<CellMask>{}), std::invalid_argument);
}

TEST_CASE("threshold spec validates its ranges") {
  CHECK_THROWS_AS((ThresholdSpec{0.0, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((ThresholdSpec{1.2, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((ThresholdSpec{0.5, 0}).validate(), std::invalid_argument);
  CHECK_NOTHROW(ThresholdSpec{1.0, 1}.validate());
}
