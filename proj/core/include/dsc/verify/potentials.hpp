#pragma once

#include <string>

#include "dsc/engine.hpp"

namespace dsc::verify {

struct PotentialSnapshot {
  double up = 0;
  double down = 0;
  double lift = 0;
  double passive = 0;
  double clean = 0;
  double total = 0;
};

// Per-level coefficients of the up and down potentials.
double up_coefficient(const Config& cfg, const PowerTable& pow, Level i);
double down_coefficient(const Config& cfg, const PowerTable& pow, Level i);
// Per-set value of the clean potential: 1/eps^2 + log2(C)/eps.
double clean_unit(const Config& cfg);

PotentialSnapshot potentials(const Engine& engine);

// Largest increase of down + clean allowed for a single deletion.
double deletion_bound(const Config& cfg);

struct BoundCheck {
  bool ok = true;
  std::string detail;
};

// `before` and `after` must bracket exactly one deletion primitive.
BoundCheck deletion_potential_bound_check(const Config& cfg,
                                          const PotentialSnapshot& before,
                                          const PotentialSnapshot& after);

}  // namespace dsc::verify
