#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "dsc/config.hpp"
#include "dsc/engine.hpp"
#include "dsc/verify/monitor.hpp"
#include "dsc/workload/trace.hpp"

namespace dsc::workload {

enum class CheckLevel : std::uint8_t { kNone, kFast, kFull };

const char* to_string(CheckLevel level);
std::optional<CheckLevel> parse_check_level(const std::string& name);

// Fast checking audits every this many updates and after every rebuild.
inline constexpr std::size_t kFastAuditPeriod = 64;

struct RunOptions {
  bool deterministic = true;
  std::uint64_t seed = 0;
  CheckLevel check = CheckLevel::kNone;
  // Attach a ContractMonitor for the whole run.
  bool monitor = false;
  // Compute OPT and the approximation ratio on the final state when the
  // instance is small enough.
  bool approximation = false;
  std::optional<RandTuning> rand_tuning;
};

struct RunResult {
  bool ok = true;
  std::string failure;  // first failure, empty when ok
  std::uint64_t audits = 0;
  std::uint64_t monitor_violations = 0;
  // Filled when the monitor is attached.
  std::map<std::string, std::uint64_t> violations_by_category;
  verify::ContractMonitor::Counters monitor_counters;
  std::uint64_t wall_ns = 0;  // apply_update calls only
  double final_cover_cost = 0;
  std::size_t tight_set_count = 0;
  std::vector<SetId> final_cover;
  EngineStats stats;
  std::optional<double> ratio;
  nlohmann::json report;
};

// Replays the trace. Rejected updates surface as UpdateError; the trace
// should have passed validation.
RunResult run_trace(const Trace& trace, const RunOptions& opts);

nlohmann::json stats_to_json(const EngineStats& stats);

// Copy of a run report without wall-clock fields.
nlohmann::json strip_timing(nlohmann::json report);

}  // namespace dsc::workload
