#include "dsc/workload/runner.hpp"

#include <algorithm>
#include <chrono>

#include "dsc/verify/audit.hpp"
#include "dsc/verify/monitor.hpp"
#include "dsc/verify/opt.hpp"

namespace dsc::workload {

const char* to_string(CheckLevel level) {
  switch (level) {
    case CheckLevel::kNone: return "none";
    case CheckLevel::kFast: return "fast";
    case CheckLevel::kFull: return "full";
  }
  return "unknown";
}

std::optional<CheckLevel> parse_check_level(const std::string& name) {
  if (name == "none") return CheckLevel::kNone;
  if (name == "fast") return CheckLevel::kFast;
  if (name == "full") return CheckLevel::kFull;
  return std::nullopt;
}

nlohmann::json stats_to_json(const EngineStats& s) {
  return {
      {"inserts", s.inserts},
      {"deletes", s.deletes},
      {"rebuilds", s.rebuilds},
      {"max_rebuild_k", s.max_rebuild_k},
      {"rebuild_k_histogram", s.rebuild_k_histogram},
      {"fixlevel_calls", s.fixlevel_calls},
      {"fixlevel_raises", s.fixlevel_raises},
      {"activated_elements", s.activated_elements},
      {"raised_elements", s.raised_elements},
      {"dirty_processed", s.dirty_processed},
      {"dirty_det", s.dirty_det},
      {"dirty_routed_det", s.dirty_routed_det},
      {"dirty_rand_fallback", s.dirty_rand_fallback},
      {"dirty_rand", s.dirty_rand},
      {"rand_witness", s.rand_witness},
      {"rand_fhat_empty", s.rand_fhat_empty},
      {"rand_fhat_small", s.rand_fhat_small},
      {"rand_fhat_large", s.rand_fhat_large},
      {"sample_rounds", s.sample_rounds},
      {"dec_ilev_calls", s.dec_ilev_calls},
      {"water_filling_calls", s.water_filling_calls},
      {"water_filling_elements", s.water_filling_elements},
      {"weight_refreshes", s.weight_refreshes},
      {"cover_recourse", s.cover_recourse},
  };
}

nlohmann::json strip_timing(nlohmann::json report) {
  report.erase("timing");
  return report;
}

RunResult run_trace(const Trace& trace, const RunOptions& opts) {
  using Clock = std::chrono::steady_clock;
  Config cfg = trace.config(opts.deterministic, opts.seed);
  if (opts.rand_tuning) cfg.rand_tuning = *opts.rand_tuning;
  Engine engine(cfg, trace.set_specs());
  verify::ContractMonitor monitor;
  if (opts.monitor) engine.set_observer(&monitor);

  RunResult out;
  std::optional<verify::AuditReport> last_audit;
  auto run_audit = [&](std::size_t step) {
    ++out.audits;
    last_audit = verify::audit(engine);
    if (!last_audit->ok() && out.ok) {
      out.ok = false;
      out.failure = "audit failed after update " + std::to_string(step) +
                    ": " + last_audit->failure_summary();
    }
  };

  std::uint64_t rebuilds_seen = 0;
  for (std::size_t i = 0; i < trace.updates.size() && out.ok; ++i) {
    const auto start = Clock::now();
    engine.apply_update(trace.updates[i]);
    out.wall_ns += static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() -
                                                             start)
            .count());
    const bool rebuilt = engine.stats().rebuilds != rebuilds_seen;
    rebuilds_seen = engine.stats().rebuilds;
    if (opts.check == CheckLevel::kFull ||
        (opts.check == CheckLevel::kFast &&
         (rebuilt || (i + 1) % kFastAuditPeriod == 0))) {
      run_audit(i + 1);
    }
  }
  if (opts.check != CheckLevel::kNone && out.ok &&
      out.audits == 0) {
    run_audit(trace.updates.size());
  }
  if (opts.monitor) {
    out.monitor_violations = monitor.total_violations();
    out.monitor_counters = monitor.counters();
    for (const std::string& cat : verify::ContractMonitor::categories()) {
      out.violations_by_category[cat] = monitor.violations(cat);
    }
    if (out.monitor_violations > 0 && out.ok) {
      out.ok = false;
      out.failure = "contract violation: " + monitor.messages().front();
    }
  }
  if (opts.approximation && engine.live_count() > 0) {
    try {
      auto check = verify::approximation_check(engine);
      out.ratio = check.ratio;
      if (!check.ok() && out.ok) {
        out.ok = false;
        out.failure = "approximation bound violated: ratio " +
                      std::to_string(check.ratio);
      }
    } catch (const verify::TooLarge&) {
      // Too many occupied sets for the exact oracle.
    }
  }

  out.stats = engine.stats();
  out.final_cover_cost = engine.query_cover_cost();
  out.tight_set_count = engine.tight_set_count();
  out.final_cover = engine.query_cover();
  std::sort(out.final_cover.begin(), out.final_cover.end());

  nlohmann::json& r = out.report;
  r["params"] = {{"epsilon", cfg.epsilon},
                 {"C", cfg.cost_ratio},
                 {"f", cfg.max_frequency},
                 {"capacity", cfg.capacity},
                 {"sets", trace.sets.size()},
                 {"updates", trace.updates.size()},
                 {"mode", cfg.deterministic ? "det" : "rand"},
                 {"seed", cfg.rng_seed},
                 {"check_level", to_string(opts.check)}};
  r["stats"] = stats_to_json(out.stats);
  r["final_cover_cost"] = out.final_cover_cost;
  r["tight_set_count"] = out.tight_set_count;
  r["final_cover"] = out.final_cover;
  r["ok"] = out.ok;
  if (!out.failure.empty()) r["failure"] = out.failure;
  if (last_audit) {
    r["audit"] = last_audit->to_json();
    r["audit"]["count"] = out.audits;
  }
  if (opts.monitor) r["contract_violations"] = out.monitor_violations;
  if (out.ratio) r["ratio"] = *out.ratio;
  r["timing"] = {{"wall_ns", out.wall_ns},
                 {"ns_per_update",
                  trace.updates.empty()
                      ? 0.0
                      : static_cast<double>(out.wall_ns) /
                            static_cast<double>(trace.updates.size())},
                 {"ns_rebuild", out.stats.ns_rebuild},
                 {"ns_fixlevel", out.stats.ns_fixlevel},
                 {"ns_water_filling", out.stats.ns_water_filling}};
  return out;
}

}  // namespace dsc::workload
