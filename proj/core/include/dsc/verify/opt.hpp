#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dsc/engine.hpp"

namespace dsc::verify {

// Live elements with their member sets, restricted to occupied sets.
struct CoverInstance {
  std::vector<double> set_cost;
  std::vector<SetIndex> set_origin;  // engine index of each set
  std::vector<std::vector<std::uint32_t>> element_sets;
};

CoverInstance snapshot_instance(const Engine& engine);

class TooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kOptSetCap = 24;

// Exact minimum cover cost by subset enumeration.
double brute_force_opt(const CoverInstance& inst,
                       std::size_t cap = kOptSetCap);

// Cost of the classic greedy cover; an upper bound on OPT.
double greedy_cover_cost(const CoverInstance& inst);

// Value of a greedily built maximal fractional packing (sum over elements
// of y_e, with sum_{e in s} y_e <= c_s for every set). A lower bound on OPT
// by weak duality, shrunk by a relative 1e-12 to absorb rounding.
double packing_lower_bound(const CoverInstance& inst);

struct ApproxCheck {
  double opt = 0;
  double cover_cost = 0;
  double ratio = 0;
  double bound = 0;            // (1+5eps) f
  double universe_weight = 0;  // sum of element weights
  bool ratio_ok = false;
  bool universe_ok = false;    // universe_weight <= (1+eps) OPT + tau
  bool ok() const { return ratio_ok && universe_ok; }
};

// Requires at least one live element. Propagates TooLarge.
ApproxCheck approximation_check(const Engine& engine,
                                std::size_t cap = kOptSetCap);

}  // namespace dsc::verify
