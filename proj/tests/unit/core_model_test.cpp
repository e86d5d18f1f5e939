#include <cmath>

#include <gtest/gtest.h>

#include "dsc/config.hpp"
#include "dsc/errors.hpp"
#include "dsc/model.hpp"
#include "dsc/power_table.hpp"

namespace dsc {
namespace {

TEST(PowerTable, MatchesExactPowers) {
  PowerTable pow(0.5, 40);
  EXPECT_DOUBLE_EQ(pow[0], 1.0);
  EXPECT_NEAR(pow[2], 4.0 / 9.0, 1e-15);
  EXPECT_NEAR(pow[4], 16.0 / 81.0, 1e-15);
  for (int i = 0; i < pow.max_index(); ++i) {
    EXPECT_LT(pow[i + 1], pow[i]);
    EXPECT_NEAR(pow[i + 1], pow[i] / 1.5, 1e-15 * pow[i]);
    EXPECT_NEAR(pow[i] * pow.growth(i), 1.0, 1e-12);
  }
  for (int i = 1; i <= pow.max_index(); ++i) {
    EXPECT_NEAR(pow.drop(i), pow[i - 1] - pow[i], 1e-15);
    // The one-level drop equals eps (1+eps)^-i.
    EXPECT_NEAR(pow.drop(i), 0.5 * pow[i], 1e-15);
  }
}

TEST(ElementWeight, UsesIntrinsicLevel) {
  PowerTable pow(0.5, 10);
  ElementState e;
  e.ilev = 0;
  EXPECT_DOUBLE_EQ(element_weight(e, pow), 1.0);
  e.ilev = 4;
  EXPECT_NEAR(element_weight(e, pow), 0.19753, 1e-5);
  e.ilev = 2;
  EXPECT_NEAR(element_weight(e, pow), 0.44444, 1e-5);
}

TEST(CompositeWeight, AddsDeadWeight) {
  EXPECT_DOUBLE_EQ(composite_weight(0, 0), 0);
  EXPECT_NEAR(composite_weight(0.6, 0.07), 0.67, 1e-15);
  EXPECT_NEAR(composite_weight(0.9, 0.25), 1.15, 1e-15);
}

TEST(Tightness, InclusiveThreshold) {
  EXPECT_TRUE(is_tight(0.6, 0.07, 1.0, 0.5));
  EXPECT_FALSE(is_tight(0.5, 0.0, 1.0, 0.5));
  for (double eps : {0.01, 0.1, 0.5, 1.0}) {
    EXPECT_TRUE(is_tight(0.37, 0.0, 0.37, eps));
  }
  // Exactly at the threshold counts as tight.
  const double threshold = 1.0 / 1.5;
  EXPECT_EQ(classify(threshold, 0.0, threshold), TightClass::kByWeight);
  EXPECT_EQ(classify(0.5, threshold - 0.5, threshold),
            TightClass::kByDeadWeight);
  EXPECT_EQ(classify(0.5, 0.1, threshold), TightClass::kSlack);
}

TEST(BaseLevel, PowerTableSearch) {
  PowerTable half(0.5, 20);
  EXPECT_EQ(half.base_level(1.0), 0);
  EXPECT_EQ(half.base_level(0.3), 2);
  PowerTable doubling(1.0, 20);
  EXPECT_EQ(doubling.base_level(1.0 / 8.0), 3);
  EXPECT_EQ(doubling.base_level(0.126), 2);
  // Defining relation (1+eps)^b <= 1/c < (1+eps)^(b+1).
  PowerTable pow(0.1, 200);
  for (double c = 0.01; c <= 1.0; c += 0.0137) {
    const int b = pow.base_level(c);
    EXPECT_LE(pow.growth(b), 1.0 / c * (1 + 1e-12));
    EXPECT_GT(pow.growth(b + 1), 1.0 / c);
  }
}

TEST(PowerTable, CeilLogAndFirstBelow) {
  PowerTable pow(0.5, 30);
  EXPECT_EQ(pow.ceil_log(1.0), 0);
  EXPECT_EQ(pow.ceil_log(4.0), 4);   // 1.5^3 = 3.375 < 4 <= 1.5^4
  EXPECT_EQ(pow.ceil_log(2.25), 2);  // exact power
  // Beyond the table end the search keeps multiplying.
  EXPECT_EQ(pow.ceil_log(std::pow(1.5, 45) * 1.01), 46);
  EXPECT_EQ(pow.first_below(0.3, 2, 10), 3);
  EXPECT_EQ(pow.first_below(0.0, 2, 10), 11);
}

TEST(WeightOneUp, FrontierFormula) {
  PowerTable pow(0.5, 20);
  // Three active members at level 2 and one passive at level 4.
  const double omega = 3 * pow[2] + pow[4];
  EXPECT_NEAR(omega, 124.0 / 81.0, 1e-12);
  EXPECT_NEAR(weight_one_up(omega, 3, 2, pow), 88.0 / 81.0, 1e-12);
  EXPECT_DOUBLE_EQ(weight_one_up(omega, 0, 2, pow), omega);
}

TEST(Config, Validation) {
  Config cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.epsilon = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.epsilon = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.epsilon = 1.0;
  EXPECT_NO_THROW(cfg.validate());
  cfg.cost_ratio = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.cost_ratio = 1;
  cfg.max_frequency = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.max_frequency = 1;
  cfg.capacity = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.capacity = 1;
  cfg.rand_tuning.log_multiplier = 3;
  cfg.rand_tuning.probe_exponent = 3;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Geometry, DerivedQuantities) {
  Config cfg;
  cfg.epsilon = 0.5;
  cfg.cost_ratio = 1;
  cfg.max_frequency = 2;
  cfg.capacity = 10;
  Geometry g = derive_geometry(cfg);
  // L = ceil(log_1.5 10) + 1 = 6 + 1.
  EXPECT_EQ(g.max_level, 7);
  // ceil(log_1.5 max{2, 4}) = 4.
  EXPECT_EQ(g.gap_bound, 4);
  EXPECT_EQ(g.low_cutoff, 1);
  EXPECT_NEAR(g.min_fallback_gap, 1 + 2 * std::log(4.0) / std::log(1.5), 1e-12);
  EXPECT_DOUBLE_EQ(g.rand_fallback_gap, 800.0);

  cfg.cost_ratio = 4;
  cfg.max_frequency = 64;
  g = derive_geometry(cfg);
  EXPECT_EQ(g.max_level, static_cast<int>(std::ceil(std::log(40.0) / std::log(1.5))) + 1);
  EXPECT_EQ(g.gap_bound, static_cast<int>(std::ceil(std::log(64.0) / std::log(1.5))));
  EXPECT_EQ(g.low_cutoff, static_cast<int>(std::ceil(std::log(4.0) / std::log(1.5))) + 1);

  cfg.rand_tuning.fallback_gap = 0;
  g = derive_geometry(cfg);
  EXPECT_DOUBLE_EQ(g.rand_fallback_gap, g.min_fallback_gap);
}

}  // namespace
}  // namespace dsc
