#include "dsc/verify/opt.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <map>

#include "dsc/verify/audit.hpp"

namespace dsc::verify {

CoverInstance snapshot_instance(const Engine& engine) {
  CoverInstance inst;
  std::vector<std::int64_t> local(engine.set_count(), -1);
  for (ElemSlot e : engine.live_slots()) {
    auto& row = inst.element_sets.emplace_back();
    for (SetIndex s : engine.members(e)) {
      if (local[s] < 0) {
        local[s] = static_cast<std::int64_t>(inst.set_cost.size());
        inst.set_cost.push_back(engine.set_static(s).cost);
        inst.set_origin.push_back(s);
      }
      row.push_back(static_cast<std::uint32_t>(local[s]));
    }
  }
  return inst;
}

double brute_force_opt(const CoverInstance& inst, std::size_t cap) {
  if (inst.element_sets.empty()) return 0;
  const std::size_t k = inst.set_cost.size();
  if (k > cap || k >= 63) {
    throw TooLarge("cover instance has " + std::to_string(k) +
                   " occupied sets, cap is " + std::to_string(cap));
  }
  // Elements with identical membership are interchangeable.
  std::map<std::uint64_t, std::uint32_t> signatures;
  for (const auto& row : inst.element_sets) {
    std::uint64_t mask = 0;
    for (auto s : row) mask |= std::uint64_t{1} << s;
    signatures.emplace(mask, 0);
  }
  std::vector<std::vector<std::uint32_t>> covers(k);
  std::uint32_t n = 0;
  for (auto& [mask, id] : signatures) {
    id = n++;
    for (std::uint64_t bits = mask; bits != 0; bits &= bits - 1) {
      covers[static_cast<std::size_t>(std::countr_zero(bits))].push_back(id);
    }
  }

  // Gray-code walk keeping per-signature cover counts.
  std::vector<std::uint32_t> count(n, 0);
  std::uint32_t uncovered = n;
  double cost = 0;
  double best = std::numeric_limits<double>::infinity();
  std::uint64_t chosen = 0;
  const std::uint64_t total = std::uint64_t{1} << k;
  for (std::uint64_t step = 1; step < total; ++step) {
    const auto flip = static_cast<std::size_t>(std::countr_zero(step));
    const std::uint64_t bit = std::uint64_t{1} << flip;
    chosen ^= bit;
    if (chosen & bit) {
      cost += inst.set_cost[flip];
      for (auto id : covers[flip]) {
        if (count[id]++ == 0) --uncovered;
      }
    } else {
      cost -= inst.set_cost[flip];
      for (auto id : covers[flip]) {
        if (--count[id] == 0) ++uncovered;
      }
    }
    if (uncovered == 0 && cost < best) {
      // Resum to keep the reported optimum free of walk rounding.
      double exact = 0;
      for (std::uint64_t b = chosen; b != 0; b &= b - 1) {
        exact += inst.set_cost[static_cast<std::size_t>(std::countr_zero(b))];
      }
      best = std::min(best, exact);
    }
  }
  return best;
}

double greedy_cover_cost(const CoverInstance& inst) {
  const std::size_t k = inst.set_cost.size();
  std::vector<std::vector<std::uint32_t>> covers(k);
  for (std::uint32_t e = 0; e < inst.element_sets.size(); ++e) {
    for (auto s : inst.element_sets[e]) covers[s].push_back(e);
  }
  std::vector<char> done(inst.element_sets.size(), 0);
  std::vector<char> used(k, 0);
  std::size_t remaining = inst.element_sets.size();
  double total = 0;
  while (remaining > 0) {
    std::size_t pick = k;
    double best = std::numeric_limits<double>::infinity();
    std::size_t pick_gain = 0;
    for (std::size_t s = 0; s < k; ++s) {
      if (used[s]) continue;
      std::size_t gain = 0;
      for (auto e : covers[s]) gain += done[e] ? 0 : 1;
      if (gain == 0) continue;
      const double price = inst.set_cost[s] / static_cast<double>(gain);
      if (price < best) {
        best = price;
        pick = s;
        pick_gain = gain;
      }
    }
    if (pick == k) break;
    used[pick] = 1;
    total += inst.set_cost[pick];
    for (auto e : covers[pick]) done[e] = 1;
    remaining -= pick_gain;
  }
  return total;
}

double packing_lower_bound(const CoverInstance& inst) {
  std::vector<double> residual = inst.set_cost;
  double total = 0;
  for (const auto& sets : inst.element_sets) {
    double y = std::numeric_limits<double>::infinity();
    for (auto s : sets) y = std::min(y, residual[s]);
    if (!(y > 0)) continue;
    for (auto s : sets) residual[s] = std::max(residual[s] - y, 0.0);
    total += y;
  }
  return total * (1.0 - 1e-12);
}

ApproxCheck approximation_check(const Engine& engine, std::size_t cap) {
  const Config& cfg = engine.config();
  ApproxCheck out;
  out.opt = brute_force_opt(snapshot_instance(engine), cap);
  out.cover_cost = engine.query_cover_cost();
  out.bound = (1.0 + 5.0 * cfg.epsilon) * cfg.max_frequency;
  out.ratio = out.opt > 0 ? out.cover_cost / out.opt : 1.0;
  for (ElemSlot e : engine.live_slots()) {
    out.universe_weight += engine.powers()[engine.element(e).ilev];
  }
  out.ratio_ok = out.ratio <= out.bound;
  out.universe_ok =
      out.universe_weight <= (1.0 + cfg.epsilon) * out.opt + kAbsTolerance;
  return out;
}

}  // namespace dsc::verify
