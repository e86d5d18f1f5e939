#include <algorithm>

#include <benchmark/benchmark.h>

#include "dsc/engine.hpp"
#include "dsc/verify/audit.hpp"
#include "dsc/water_filling.hpp"
#include "dsc/workload/generate.hpp"

namespace {

using dsc::workload::Trace;
using dsc::workload::WorkloadKind;
using dsc::workload::WorkloadParams;

Trace window_trace(std::int32_t f, std::size_t updates) {
  WorkloadParams p;
  p.kind = WorkloadKind::kWindow;
  p.sets = 256;
  p.frequency = f;
  p.min_members = f;
  p.updates = updates;
  p.epsilon = 0.2;
  p.capacity = 16384 / f;
  p.seed = 1;
  return dsc::workload::generate(p);
}

// Whole-trace replay; reports time per update.
void replay(benchmark::State& state, bool det) {
  const auto f = static_cast<std::int32_t>(state.range(0));
  const Trace trace = window_trace(f, 20000);
  for (auto _ : state) {
    dsc::Engine eng(trace.config(det, 1), trace.set_specs());
    for (const auto& u : trace.updates) eng.apply_update(u);
    benchmark::DoNotOptimize(eng.query_cover_cost());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(trace.updates.size()));
}

void BM_ReplayDet(benchmark::State& state) { replay(state, true); }
void BM_ReplayRand(benchmark::State& state) { replay(state, false); }
BENCHMARK(BM_ReplayDet)->RangeMultiplier(2)->Range(8, 128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReplayRand)->RangeMultiplier(2)->Range(8, 128)->Unit(benchmark::kMillisecond);

void BM_PlanWaterFilling(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t m = 64;
  dsc::PowerTable pow(0.2, 80);
  dsc::WaterFillingInput in;
  in.top = 40;
  in.cost.assign(m, 1.0);
  in.fixed_weight.assign(m, 0.0);
  dsc::Rng rng(5);
  for (std::size_t e = 0; e < n; ++e) {
    std::vector<std::uint32_t> sets;
    for (int j = 0; j < 4; ++j) {
      auto s = static_cast<std::uint32_t>(rng.below(m));
      if (std::find(sets.begin(), sets.end(), s) == sets.end()) sets.push_back(s);
    }
    in.element_sets.push_back(sets);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(dsc::plan_water_filling(in, pow));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_PlanWaterFilling)->Range(64, 4096);

void BM_FullAudit(benchmark::State& state) {
  const Trace trace = window_trace(16, 4000);
  dsc::Engine eng(trace.config(true, 1), trace.set_specs());
  for (const auto& u : trace.updates) eng.apply_update(u);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dsc::verify::audit(eng).ok());
  }
}
BENCHMARK(BM_FullAudit)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
