#include "dsc/water_filling.hpp"

#include <utility>

#include "dsc/errors.hpp"

namespace dsc {

WaterFillingPlan plan_water_filling(const WaterFillingInput& in,
                                    const PowerTable& pow) {
  const std::size_t m = in.cost.size();
  const std::size_t n = in.element_sets.size();
  DSC_CHECK(in.fixed_weight.size() == m);
  DSC_CHECK(in.top >= 0 && in.top <= pow.max_index());

  std::vector<std::uint32_t> offset(m + 1, 0);
  for (const auto& sets : in.element_sets) {
    for (std::uint32_t s : sets) {
      DSC_CHECK(s < m);
      offset[s + 1] += 1;
    }
  }
  for (std::size_t s = 0; s < m; ++s) offset[s + 1] += offset[s];
  std::vector<std::uint32_t> set_elems(offset[m]);
  {
    std::vector<std::uint32_t> fill(offset.begin(), offset.end() - 1);
    for (std::size_t x = 0; x < n; ++x) {
      for (std::uint32_t s : in.element_sets[x]) {
        set_elems[fill[s]++] = static_cast<std::uint32_t>(x);
      }
    }
  }

  std::vector<double> weight = in.fixed_weight;
  std::vector<std::uint32_t> count(m);
  for (std::size_t s = 0; s < m; ++s) count[s] = offset[s + 1] - offset[s];

  WaterFillingPlan plan;
  plan.set_level.assign(m, 0);
  plan.element_level.assign(n, -1);
  std::vector<bool> frozen(m, false);
  std::vector<std::uint32_t> version(m, 0);

  // At level 0 a floating element alone weighs 1 >= c_s, so j = 1 always
  // freezes. Stating it directly keeps rounding in the fixed weights from
  // breaking the tie when c_s = 1.
  auto freezes_at = [&](std::size_t s, Level j) {
    if (j == 1) return count[s] > 0;
    return weight[s] + static_cast<double>(count[s]) * pow[j - 1] >= in.cost[s];
  };
  // Largest j in [1, cur] where the set would freeze, or 0.
  auto predict = [&](std::size_t s, Level cur) -> Level {
    if (count[s] == 0 || cur < 1) return 0;
    Level lo = 1;
    Level hi = cur;
    while (lo < hi) {
      Level mid = lo + (hi - lo + 1) / 2;
      if (freezes_at(s, mid)) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    return lo;
  };

  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> bucket(
      static_cast<std::size_t>(in.top) + 1);
  for (std::size_t s = 0; s < m; ++s) {
    Level j = predict(s, in.top);
    if (j > 0) {
      bucket[static_cast<std::size_t>(j)].emplace_back(
          static_cast<std::uint32_t>(s), 0);
    }
  }

  for (Level j = in.top; j >= 1; --j) {
    auto& here = bucket[static_cast<std::size_t>(j)];
    for (std::size_t idx = 0; idx < here.size(); ++idx) {
      auto [s, ver] = here[idx];
      if (frozen[s] || ver != version[s]) continue;
      if (!freezes_at(s, j)) {
        ++version[s];
        Level nj = predict(s, j - 1);
        if (nj > 0) bucket[static_cast<std::size_t>(nj)].emplace_back(s, version[s]);
        continue;
      }
      frozen[s] = true;
      plan.set_level[s] = j;
      for (std::uint32_t p = offset[s]; p < offset[s + 1]; ++p) {
        std::uint32_t x = set_elems[p];
        if (plan.element_level[x] >= 0) continue;
        plan.element_level[x] = j;
        for (std::uint32_t t : in.element_sets[x]) {
          if (t == s || frozen[t]) continue;
          count[t] -= 1;
          weight[t] += pow[j];
          ++version[t];
          Level nj = predict(t, j);
          if (nj > 0) {
            // `here` may reallocate; it is indexed, not iterated.
            bucket[static_cast<std::size_t>(nj)].emplace_back(t, version[t]);
          }
        }
      }
    }
    here.clear();
  }
  for (Level lev : plan.element_level) DSC_CHECK(lev >= 1);
  return plan;
}

}  // namespace dsc
