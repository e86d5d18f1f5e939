#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace dsc {

// Overrides for the randomized dirty-element schedule. Intended for tests
// that need to drive the sampling branches at small scale.
struct RandTuning {
  // Dirty elements whose gap is at most this value take the deterministic
  // path. Never allowed below 1 + 2 log_{1+eps}(2C/eps).
  std::optional<double> fallback_gap;
  // Schedule y_{i+1} = log_multiplier * log_{1+eps}(y_i) and probe value
  // y^-probe_exponent. The defaults 5 and 4 are the analysed schedule;
  // smaller values make the sampling branches reachable at desk scale.
  // Requires log_multiplier > probe_exponent > 0 so that the probe still
  // exceeds the element weight.
  double log_multiplier = 5.0;
  double probe_exponent = 4.0;
  // Replaces 50 ceil(f / y) samples per dirty element. Zero sends every
  // element straight to the exact witness scan.
  std::optional<long> sample_budget;
};

struct Config {
  double epsilon = 0.1;
  std::int64_t cost_ratio = 1;  // costs lie in [1/C, 1]
  std::int32_t max_frequency = 1;
  std::int64_t capacity = 1;
  bool deterministic = true;
  std::uint64_t rng_seed = 0;
  RandTuning rand_tuning;

  // Throws ConfigError.
  void validate() const;
};

// Quantities fixed by a Config.
struct Geometry {
  int max_level = 0;      // L
  int gap_bound = 0;      // ceil(log_{1+eps} max{f, 2C/eps})
  int low_cutoff = 0;     // ceil(log_{1+eps} C) + 1
  double rand_fallback_gap = 0;
  double min_fallback_gap = 0;  // 1 + 2 log_{1+eps}(2C/eps)
};

Geometry derive_geometry(const Config& cfg);

// Smallest h >= 0 with (1+eps)^h >= x, by repeated multiplication.
int ceil_log_growth(double epsilon, double x);

}  // namespace dsc
