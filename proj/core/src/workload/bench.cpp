#include "dsc/workload/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "dsc/workload/generate.hpp"
#include "dsc/workload/runner.hpp"

namespace dsc::workload {

std::vector<BenchRow> run_bench(const BenchOptions& opts) {
  std::vector<BenchRow> rows;
  for (std::int32_t f : opts.freqs) {
    WorkloadParams wp;
    wp.kind = WorkloadKind::kWindow;
    wp.sets = std::max(opts.sets, f);
    wp.frequency = f;
    wp.min_members = f;
    wp.updates = opts.updates;
    wp.epsilon = opts.epsilon;
    wp.cost_ratio = opts.cost_ratio;
    wp.capacity = static_cast<std::int64_t>(
        std::max<std::size_t>(1, opts.volume / static_cast<std::size_t>(f)));
    wp.seed = opts.seed;
    const Trace trace = generate(wp);

    for (bool det : {true, false}) {
      if ((det && !opts.det) || (!det && !opts.rand)) continue;
      RunOptions ro;
      ro.deterministic = det;
      ro.seed = opts.seed;
      std::optional<RunResult> best;
      for (int r = 0; r < std::max(1, opts.repeats); ++r) {
        RunResult res = run_trace(trace, ro);
        if (!best || res.wall_ns < best->wall_ns) best = std::move(res);
      }
      BenchRow row;
      row.f = f;
      row.m = wp.sets;
      row.n_live_max = static_cast<std::size_t>(wp.capacity);
      row.mode = det ? "det" : "rand";
      row.seed = opts.seed;
      row.total_updates = trace.updates.size();
      row.wall_ns_total = best->wall_ns;
      row.amortized_ns_per_update =
          row.total_updates == 0
              ? 0.0
              : static_cast<double>(row.wall_ns_total) /
                    static_cast<double>(row.total_updates);
      row.rebuild_count = best->stats.rebuilds;
      row.max_rebuild_k = best->stats.max_rebuild_k;
      row.cover_cost_final = best->final_cover_cost;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string bench_csv_header() {
  return "f,m,n_live_max,mode,seed,total_updates,wall_ns_total,"
         "amortized_ns_per_update,rebuild_count,max_rebuild_k,"
         "cover_cost_final,opt_cost,ratio";
}

std::string bench_csv_row(const BenchRow& r) {
  auto opt = [](const std::optional<double>& x) {
    return x ? format_decimal(*x) : std::string();
  };
  return std::to_string(r.f) + "," + std::to_string(r.m) + "," +
         std::to_string(r.n_live_max) + "," + r.mode + "," +
         std::to_string(r.seed) + "," + std::to_string(r.total_updates) + "," +
         std::to_string(r.wall_ns_total) + "," +
         format_decimal(r.amortized_ns_per_update) + "," +
         std::to_string(r.rebuild_count) + "," +
         std::to_string(r.max_rebuild_k) + "," +
         format_decimal(r.cover_cost_final) + "," + opt(r.opt_cost) + "," +
         opt(r.ratio);
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = bench_csv_header() + "\n";
  for (const BenchRow& r : rows) out += bench_csv_row(r) + "\n";
  return out;
}

ScalingVerdict check_scaling(const std::vector<BenchRow>& rows,
                             double max_ratio) {
  ScalingVerdict v;
  std::map<std::string, std::map<std::int32_t, double>> by_mode;
  for (const BenchRow& r : rows) {
    by_mode[r.mode][r.f] = r.amortized_ns_per_update;
  }
  for (const auto& [mode, series] : by_mode) {
    for (const auto& [f, t] : series) {
      auto next = series.find(2 * f);
      if (next == series.end() || t <= 0) continue;
      const double ratio = next->second / t;
      const bool pass = ratio <= max_ratio;
      v.ok = v.ok && pass;
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "%s f=%d->%d t=%.1f->%.1f ns ratio=%.3f (limit %.2f) %s",
                    mode.c_str(), f, 2 * f, t, next->second, ratio, max_ratio,
                    pass ? "ok" : "FAIL");
      v.lines.emplace_back(buf);
    }
  }
  return v;
}

}  // namespace dsc::workload
