#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "dsc/workload/trace.hpp"

namespace dsc::workload {

enum class WorkloadKind : std::uint8_t { kRandom, kWindow, kChurn };

const char* to_string(WorkloadKind kind);
std::optional<WorkloadKind> parse_workload_kind(const std::string& name);

struct WorkloadParams {
  WorkloadKind kind = WorkloadKind::kRandom;
  std::int32_t sets = 50;
  std::int32_t frequency = 4;
  std::size_t updates = 1000;
  double epsilon = 0.2;
  std::int64_t cost_ratio = 1;
  std::int64_t capacity = 200;
  // Live count held by the window workload; 0 means capacity.
  std::size_t window = 0;
  // Membership sizes are drawn uniformly from [min_members, frequency].
  std::int32_t min_members = 1;
  std::uint64_t seed = 0;
};

// Throws ConfigError on inconsistent parameters. Output is a pure function
// of the parameters.
Trace generate(const WorkloadParams& params);

}  // namespace dsc::workload
