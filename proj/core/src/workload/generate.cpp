#include "dsc/workload/generate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "dsc/errors.hpp"
#include "dsc/rng.hpp"

namespace dsc::workload {
namespace {

// Live elements with O(1) uniform removal.
class LivePool {
 public:
  void add(ElementId e) {
    pos_.resize(std::max<std::size_t>(pos_.size(), e + 1), 0);
    pos_[e] = ids_.size();
    ids_.push_back(e);
  }
  void remove(ElementId e) {
    const std::size_t p = pos_[e];
    ids_[p] = ids_.back();
    pos_[ids_[p]] = p;
    ids_.pop_back();
  }
  std::size_t size() const { return ids_.size(); }
  ElementId at(std::size_t i) const { return ids_[i]; }

 private:
  std::vector<ElementId> ids_;
  std::vector<std::size_t> pos_;
};

std::vector<SetId> draw_members(Rng& rng, const WorkloadParams& p) {
  const auto lo = static_cast<std::uint64_t>(p.min_members);
  const auto hi = static_cast<std::uint64_t>(p.frequency);
  const std::uint64_t count = lo + rng.below(hi - lo + 1);
  // Floyd's sampling of `count` distinct sets.
  std::vector<SetId> out;
  const auto m = static_cast<std::uint64_t>(p.sets);
  for (std::uint64_t j = m - count; j < m; ++j) {
    auto pick = static_cast<SetId>(rng.below(j + 1));
    if (std::find(out.begin(), out.end(), pick) != out.end()) {
      pick = static_cast<SetId>(j);
    }
    out.push_back(pick);
  }
  return out;
}

void check_params(const WorkloadParams& p) {
  if (p.sets < 1 || p.frequency < 1 || p.min_members < 1 ||
      p.min_members > p.frequency || p.frequency > p.sets) {
    throw ConfigError("workload needs 1 <= min_members <= f <= sets");
  }
  if (p.capacity < 1 || p.cost_ratio < 1 || !(p.epsilon > 0 && p.epsilon <= 1)) {
    throw ConfigError("workload needs positive capacity and C, eps in (0, 1]");
  }
  if (p.window > static_cast<std::size_t>(p.capacity)) {
    throw ConfigError("window exceeds capacity");
  }
}

}  // namespace

const char* to_string(WorkloadKind kind) {
  switch (kind) {
    case WorkloadKind::kRandom: return "random";
    case WorkloadKind::kWindow: return "window";
    case WorkloadKind::kChurn: return "churn";
  }
  return "unknown";
}

std::optional<WorkloadKind> parse_workload_kind(const std::string& name) {
  if (name == "random") return WorkloadKind::kRandom;
  if (name == "window") return WorkloadKind::kWindow;
  if (name == "churn") return WorkloadKind::kChurn;
  return std::nullopt;
}

Trace generate(const WorkloadParams& p) {
  check_params(p);
  Rng rng(p.seed);
  Trace t;
  t.params = {p.epsilon, p.cost_ratio, p.frequency, p.capacity};

  // Costs are multiples of 1/1000 in [1/C, 1].
  const auto low = static_cast<std::uint64_t>(
      std::ceil(1000.0 / static_cast<double>(p.cost_ratio)));
  for (std::int32_t s = 0; s < p.sets; ++s) {
    const double cost =
        static_cast<double>(low + rng.below(1000 - low + 1)) / 1000.0;
    t.sets.push_back({s, format_decimal(cost), cost});
  }

  const auto capacity = static_cast<std::size_t>(p.capacity);
  ElementId next_id = 0;
  LivePool pool;
  auto insert = [&] {
    t.updates.push_back(Update::insert(next_id, draw_members(rng, p)));
    pool.add(next_id);
    ++next_id;
  };
  auto erase = [&](ElementId e) {
    t.updates.push_back(Update::erase(e));
    pool.remove(e);
  };

  switch (p.kind) {
    case WorkloadKind::kRandom:
      while (t.updates.size() < p.updates) {
        const bool grow = pool.size() == 0 ||
                          (pool.size() < capacity && rng.below(5) < 3);
        if (grow) {
          insert();
        } else {
          erase(pool.at(rng.below(pool.size())));
        }
      }
      break;
    case WorkloadKind::kWindow: {
      const std::size_t window = p.window == 0 ? capacity : p.window;
      std::deque<ElementId> fifo;
      while (t.updates.size() < p.updates) {
        if (fifo.size() < window) {
          fifo.push_back(next_id);
          insert();
        } else {
          erase(fifo.front());
          fifo.pop_front();
        }
      }
      break;
    }
    case WorkloadKind::kChurn: {
      // Alternating growth and mass-deletion phases. Deletions prefer
      // elements whose highest member set sits low, found by replaying the
      // trace on a deterministic engine.
      Engine shadow(t.config(true, 0), t.set_specs());
      std::size_t applied = 0;
      auto sync = [&] {
        for (; applied < t.updates.size(); ++applied) {
          shadow.apply_update(t.updates[applied]);
        }
      };
      while (t.updates.size() < p.updates) {
        const std::size_t target =
            std::max<std::size_t>(1, capacity * (6 + rng.below(4)) / 10);
        while (pool.size() < target && t.updates.size() < p.updates) insert();
        sync();
        const std::size_t keep = pool.size() * (1 + rng.below(3)) / 10;
        while (pool.size() > keep && t.updates.size() < p.updates) {
          ElementId victim = pool.at(rng.below(pool.size()));
          Level best = shadow.element_level(*shadow.slot_of(victim));
          for (int probe = 0; probe < 15; ++probe) {
            ElementId c = pool.at(rng.below(pool.size()));
            Level lev = shadow.element_level(*shadow.slot_of(c));
            if (lev < best) {
              best = lev;
              victim = c;
            }
          }
          erase(victim);
          sync();
        }
      }
      break;
    }
  }
  return t;
}

}  // namespace dsc::workload
