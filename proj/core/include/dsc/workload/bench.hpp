#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dsc::workload {

struct BenchRow {
  std::int32_t f = 0;
  std::int32_t m = 0;
  std::size_t n_live_max = 0;
  std::string mode;  // "det" or "rand"
  std::uint64_t seed = 0;
  std::uint64_t total_updates = 0;
  std::uint64_t wall_ns_total = 0;
  double amortized_ns_per_update = 0;
  std::uint64_t rebuild_count = 0;
  std::int32_t max_rebuild_k = -1;
  double cover_cost_final = 0;
  std::optional<double> opt_cost;
  std::optional<double> ratio;
};

struct BenchOptions {
  std::vector<std::int32_t> freqs = {8, 16, 32, 64, 128};
  std::size_t updates = 50000;
  // Live membership volume n * f held fixed across the sweep.
  std::size_t volume = 16384;
  std::int32_t sets = 256;
  double epsilon = 0.2;
  std::int64_t cost_ratio = 1;
  bool det = true;
  bool rand = true;
  std::uint64_t seed = 1;
  // Timed repetitions per cell; the fastest is reported.
  int repeats = 1;
};

// One window workload per frequency, replayed in each requested mode with
// checking off.
std::vector<BenchRow> run_bench(const BenchOptions& opts);

std::string bench_csv_header();
std::string bench_csv_row(const BenchRow& row);
std::string bench_csv(const std::vector<BenchRow>& rows);

struct ScalingVerdict {
  bool ok = true;
  std::vector<std::string> lines;  // one per consecutive pair
};

// t(2f) / t(f) <= max_ratio for every consecutive doubling, per mode.
ScalingVerdict check_scaling(const std::vector<BenchRow>& rows,
                             double max_ratio = 3.0);

}  // namespace dsc::workload
