#include "dsc/rand_schedule.hpp"

#include <algorithm>
#include <cmath>

namespace dsc {

double log_step(double epsilon, double y, double multiplier) {
  return multiplier * std::log(y) / std::log1p(epsilon);
}

std::vector<double> log_iterates(double epsilon, double f, double multiplier,
                                 int max_terms) {
  std::vector<double> ys{f};
  while (static_cast<int>(ys.size()) < max_terms) {
    double y = ys.back();
    if (y <= 1.0) break;
    double next = log_step(epsilon, y, multiplier);
    if (!(next < y) || next <= 1.0) break;
    ys.push_back(next);
  }
  return ys;
}

std::optional<int> eta_for_gap(const std::vector<double>& iterates,
                               double gap) {
  for (std::size_t eta = 1; eta + 1 < iterates.size(); ++eta) {
    if (iterates[eta + 1] <= gap && gap <= iterates[eta]) {
      return static_cast<int>(eta);
    }
  }
  return std::nullopt;
}

double probe_factor(double y_eta, double epsilon, double cost_ratio,
                    double exponent) {
  double a = std::pow(y_eta, -exponent);
  double b = epsilon / (2.0 * cost_ratio);
  return std::min(a, b * b);
}

long sample_budget(double f, double y_eta) {
  return 50L * static_cast<long>(std::ceil(f / y_eta));
}

double small_branch_span(double y_eta, double epsilon, double cost_ratio,
                         double exponent) {
  double b = 2.0 * cost_ratio / epsilon;
  return std::max(std::pow(y_eta, exponent), b * b);
}

RandSchedule::RandSchedule(const Config& cfg, int max_gap)
    : iterates_(log_iterates(cfg.epsilon,
                             static_cast<double>(cfg.max_frequency),
                             cfg.rand_tuning.log_multiplier)),
      probe_exponent_(cfg.rand_tuning.probe_exponent) {
  by_gap_.assign(static_cast<std::size_t>(std::max(max_gap, 0)) + 1, -1);
  for (int g = 0; g <= max_gap; ++g) {
    if (auto eta = eta_for_gap(iterates_, g)) {
      by_gap_[static_cast<std::size_t>(g)] = *eta;
    }
  }
}

std::optional<int> RandSchedule::eta(int gap) const {
  if (gap < 0 || gap >= static_cast<int>(by_gap_.size())) return std::nullopt;
  int v = by_gap_[static_cast<std::size_t>(gap)];
  if (v < 0) return std::nullopt;
  return v;
}

}  // namespace dsc
