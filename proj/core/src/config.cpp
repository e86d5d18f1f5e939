#include "dsc/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dsc/errors.hpp"

namespace dsc {

const char* to_string(UpdateErrorKind kind) {
  switch (kind) {
    case UpdateErrorKind::kUnknownElement: return "UnknownElement";
    case UpdateErrorKind::kDuplicateElement: return "DuplicateElement";
    case UpdateErrorKind::kFrequencyExceeded: return "FrequencyExceeded";
    case UpdateErrorKind::kCapacityExceeded: return "CapacityExceeded";
    case UpdateErrorKind::kUnknownSet: return "UnknownSet";
    case UpdateErrorKind::kInvalidMembers: return "InvalidMembers";
  }
  return "?";
}

void raise_internal_fault(const char* cond, const char* file, int line) {
  throw InternalFault(std::string("internal invariant violated: ") + cond +
                      " at " + file + ":" + std::to_string(line));
}

void Config::validate() const {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw ConfigError("epsilon must lie in (0, 1]");
  }
  if (cost_ratio < 1) throw ConfigError("cost ratio C must be >= 1");
  if (max_frequency < 1) throw ConfigError("max frequency f must be >= 1");
  if (capacity < 1) throw ConfigError("capacity must be >= 1");
  if (capacity > std::numeric_limits<std::int32_t>::max()) {
    throw ConfigError("capacity too large");
  }
  const RandTuning& t = rand_tuning;
  if (!(t.probe_exponent > 0.0 && t.log_multiplier > t.probe_exponent &&
        std::isfinite(t.log_multiplier))) {
    throw ConfigError("rand tuning needs log_multiplier > probe_exponent > 0");
  }
  if (t.sample_budget && *t.sample_budget < 0) {
    throw ConfigError("rand tuning sample budget must be >= 0");
  }
}

int ceil_log_growth(double epsilon, double x) {
  int h = 0;
  double v = 1.0;
  while (v < x) {
    v *= 1.0 + epsilon;
    ++h;
  }
  return h;
}

Geometry derive_geometry(const Config& cfg) {
  cfg.validate();
  Geometry g;
  const double eps = cfg.epsilon;
  const double c = static_cast<double>(cfg.cost_ratio);
  g.max_level =
      ceil_log_growth(eps, c * static_cast<double>(cfg.capacity)) + 1;
  g.gap_bound = ceil_log_growth(
      eps, std::max(static_cast<double>(cfg.max_frequency), 2.0 * c / eps));
  g.low_cutoff = ceil_log_growth(eps, c) + 1;
  g.min_fallback_gap = 1.0 + 2.0 * std::log(2.0 * c / eps) / std::log1p(eps);
  g.rand_fallback_gap = std::max(200.0 / (eps * eps), g.min_fallback_gap);
  if (cfg.rand_tuning.fallback_gap) {
    g.rand_fallback_gap =
        std::max(*cfg.rand_tuning.fallback_gap, g.min_fallback_gap);
  }
  return g;
}

}  // namespace dsc
