#include <cstdint>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "stig/hotspot.hpp"
#include "stig/trail.hpp"

using namespace stig;

namespace {

GridSpec make_grid(int rows, int cols) {
  GridSpec spec;
  spec.origin_lat = 41.0;
  spec.origin_lon = 29.0;
  spec.cell_size_m = 100.0;
  spec.time_step_s = 1200;
  spec.n_rows = rows;
  spec.n_cols = cols;
  return spec;
}

std::vector<DepositEvent> day_of_events(int rows, int cols, int steps, int per_step,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<DepositEvent> events;
  events.reserve(static_cast<std::size_t>(steps) * per_step);
  for (int t = 0; t < steps; ++t) {
    for (int e = 0; e < per_step; ++e) {
      events.push_back({TimeIndex{t},
                        CellIndex{static_cast<int>(rng() % rows), static_cast<int>(rng() % cols)}});
    }
  }
  return events;
}

TrailField busy_trail(int rows, int cols, std::uint64_t seed) {
  const GridSpec spec = make_grid(rows, cols);
  const MarkSpec mark{10.0, 1.0, 0.5};
  const auto events = day_of_events(rows, cols, 72, 40, seed);
  return run_trail(events, TimeIndex{0}, TimeIndex{72}, spec, mark, EvaporationSpec{0.01});
}

void BM_StepWithDeposits(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const GridSpec spec = make_grid(side, side);
  const MarkSpec mark{10.0, 1.0, 0.5};
  const EvaporationSpec evap{0.01};
  std::mt19937_64 rng(1);
  std::vector<CellIndex> deposits(64);
  for (CellIndex& c : deposits) {
    c = CellIndex{static_cast<int>(rng() % side), static_cast<int>(rng() % side)};
  }
  TrailField trail(spec);
  for (auto _ : state) {
    trail = step(trail, deposits, mark, evap);
    benchmark::DoNotOptimize(trail.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(deposits.size()));
}
BENCHMARK(BM_StepWithDeposits)->Arg(64)->Arg(128)->Arg(256);

void BM_RunTrailDay(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const GridSpec spec = make_grid(side, side);
  const MarkSpec mark{10.0, 1.0, 0.5};
  const EvaporationSpec evap{0.01};
  const auto events = day_of_events(side, side, 72, 40, 7);
  for (auto _ : state) {
    const TrailField field = run_trail(events, TimeIndex{0}, TimeIndex{72}, spec, mark, evap);
    benchmark::DoNotOptimize(field.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(events.size()));
}
BENCHMARK(BM_RunTrailDay)->Arg(116)->Arg(256);

void BM_Extract(benchmark::State& state) {
  const TrailField trail = busy_trail(static_cast<int>(state.range(0)),
                                      static_cast<int>(state.range(0)), 11);
  const ThresholdSpec th{0.5, 1};
  for (auto _ : state) {
    const HotspotSet hs = extract(trail, th);
    benchmark::DoNotOptimize(hs.mask.bits().data());
  }
}
BENCHMARK(BM_Extract)->Arg(116)->Arg(256);

void BM_LabelRegions(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  CellMask mask(side, side);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      if (rng() % 100 < 30) mask.set(r, c);
    }
  }
  for (auto _ : state) {
    const auto regions = label_regions(mask, 1);
    benchmark::DoNotOptimize(regions.data());
  }
}
BENCHMARK(BM_LabelRegions)->Arg(116)->Arg(256);

void BM_Jaccard(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  std::mt19937_64 rng(5);
  CellMask a(side, side), b(side, side);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      if (rng() % 100 < 20) a.set(r, c);
      if (rng() % 100 < 20) b.set(r, c);
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(jaccard(a, b));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side) * side);
}
BENCHMARK(BM_Jaccard)->Arg(116)->Arg(360);

}  // namespace

BENCHMARK_MAIN();
