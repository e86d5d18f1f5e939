#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dsc/engine.hpp"

namespace dsc::verify {

inline constexpr double kRelTolerance = 1e-9;
inline constexpr double kAbsTolerance = 1e-9;

struct CheckResult {
  std::string name;
  bool passed = true;
  std::size_t failures = 0;
  std::vector<std::string> offenders;  // first few ids
  std::string detail;
};

struct AuditReport {
  std::vector<CheckResult> checks;
  double max_drift = 0;
  bool cover_valid = true;
  std::optional<double> ratio;

  bool ok() const;
  const CheckResult* find(const std::string& name) const;
  // One line per failed check.
  std::string failure_summary() const;
  nlohmann::json to_json() const;
};

// Weight of set s if it were at level i, summed from element states.
double weight_at_level(const Engine& engine, SetIndex s, Level i);

// Full recomputation of every maintained quantity. The engine must be
// quiescent.
AuditReport audit(const Engine& engine);

}  // namespace dsc::verify
