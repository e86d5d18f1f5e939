#pragma once

#include <cstdint>
#include <vector>

#include "dsc/model.hpp"
#include "dsc/power_table.hpp"

namespace dsc {

// Sets and elements start together at level `top`. Elements listed here
// float; every other member of a set contributes a fixed weight.
struct WaterFillingInput {
  Level top = 0;
  std::vector<double> cost;
  std::vector<double> fixed_weight;
  std::vector<std::vector<std::uint32_t>> element_sets;
};

struct WaterFillingPlan {
  std::vector<Level> set_level;
  std::vector<Level> element_level;
};

// Synchronized descent: a floating set freezes at the first level j where
// its weight one level lower would reach its cost; freezing pins its
// floating elements at j. Sets that never freeze land at level 0.
WaterFillingPlan plan_water_filling(const WaterFillingInput& in,
                                    const PowerTable& pow);

}  // namespace dsc
