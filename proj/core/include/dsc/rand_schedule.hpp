#pragma once

#include <optional>
#include <vector>

#include "dsc/config.hpp"

namespace dsc {

// y -> multiplier * log_{1+eps} y
double log_step(double epsilon, double y, double multiplier);
inline double five_log(double epsilon, double y) {
  return log_step(epsilon, y, 5.0);
}

// Iterates y_0 = f, y_{i+1} = log_step(y_i), kept while strictly decreasing
// and above 1.
std::vector<double> log_iterates(double epsilon, double f, double multiplier,
                                 int max_terms = 64);
inline std::vector<double> five_log_iterates(double epsilon, double f) {
  return log_iterates(epsilon, f, 5.0);
}

// Smallest eta >= 1 with y_{eta+1} <= gap <= y_eta.
std::optional<int> eta_for_gap(const std::vector<double>& iterates, double gap);

// min{y_eta^-p, (eps/2C)^2}; scale by pow[k+1] for the probe weight.
double probe_factor(double y_eta, double epsilon, double cost_ratio,
                    double exponent = 4.0);

// 50 * ceil(f / y_eta)
long sample_budget(double f, double y_eta);

// max{y_eta^p, (2C/eps)^2}, to be passed through ceil log_{1+eps} for the
// small-F span.
double small_branch_span(double y_eta, double epsilon, double cost_ratio,
                         double exponent = 4.0);

// Per-config lookup from gap to eta.
class RandSchedule {
 public:
  RandSchedule(const Config& cfg, int max_gap);

  const std::vector<double>& iterates() const { return iterates_; }
  std::optional<int> eta(int gap) const;
  double iterate(int eta) const { return iterates_[static_cast<unsigned>(eta)]; }
  double probe_exponent() const { return probe_exponent_; }

 private:
  std::vector<double> iterates_;
  std::vector<int> by_gap_;  // -1 when no window contains the gap
  double probe_exponent_;
};

}  // namespace dsc
