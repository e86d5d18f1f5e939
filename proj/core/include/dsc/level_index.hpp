#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dsc/model.hpp"

namespace dsc {

// Per-level registries over sets (by tightness class) and elements (by lazy
// level), their aggregates, and the implicit-zeroing clock.
class LevelIndex {
 public:
  struct LevelAggregate {
    std::uint32_t set_count[3] = {0, 0, 0};
    double set_cost[3] = {0, 0, 0};
    double phi = 0;
    std::uint32_t elem_count = 0;
    double elem_weight = 0;

    double tight_cost() const { return set_cost[1] + set_cost[2]; }
    std::uint32_t tight_count() const { return set_count[1] + set_count[2]; }
    std::uint32_t total_sets() const {
      return set_count[0] + set_count[1] + set_count[2];
    }
  };

  struct Totals {
    double phi = 0;
    double tight_cost = 0;
    double elem_weight = 0;
  };

  struct Effective {
    Level lev;
    double phi;
    bool zeroed;
  };

  LevelIndex(std::size_t num_sets, std::size_t elem_capacity, Level top_level,
             Level low_cutoff);

  Level top_level() const { return top_; }
  Level low_cutoff() const { return low_cutoff_; }

  // Registers every set at level 0, slack, phi 0.
  void init_sets(const std::vector<SetStatic>& statics);

  void move_set(SetIndex s, Level from, Level to, TightClass cls, double cost,
                double phi);
  void reclassify(SetIndex s, Level lev, TightClass from, TightClass to,
                  double cost);
  void add_phi(Level lev, double delta);

  void add_element(ElemSlot e, Level zlev, double weight);
  void remove_element(ElemSlot e, Level zlev, double weight);
  void move_element(ElemSlot e, Level from, Level to, double weight);
  void reweigh_element(Level zlev, double old_weight, double new_weight);

  const std::vector<ElemSlot>& elements_at(Level i) const {
    return elems_[static_cast<std::size_t>(i)];
  }

  // Visits the sets registered at level i in class cls.
  template <typename Fn>
  void for_each_set(Level i, TightClass cls, Fn&& fn) const {
    std::uint32_t head = sentinel(i, cls);
    for (std::uint32_t x = next_[head]; x != head; x = next_[x]) fn(x);
  }

  // Zeroes lev and phi of every set on levels [lo, hi]. Sets tight only by
  // dead weight are reported to on_untight before losing that status.
  template <typename Fn>
  void implicit_zero_levels(Level lo, Level hi, Fn&& on_untight);

  // Stored state seen through the zero clock.
  Effective effective(const SetState& s) const {
    if (s.tm <= aux_[static_cast<std::size_t>(s.lev)]) return {0, 0.0, true};
    return {s.lev, s.phi, false};
  }
  TightClass effective_class(const SetState& s, double threshold) const {
    if (s.tm <= aux_[static_cast<std::size_t>(s.lev)]) {
      return classify(s.omega, 0.0, threshold);
    }
    return s.tight;
  }
  // Writes the effective state back. Returns true if the set was zeroed.
  bool materialize(SetState& s, double threshold);

  std::uint64_t tick() { return ++now_; }
  std::uint64_t now() const { return now_; }
  std::uint64_t zeroed_at(Level i) const {
    return aux_[static_cast<std::size_t>(i)];
  }

  const LevelAggregate& level(Level i) const {
    return agg_[static_cast<std::size_t>(i)];
  }
  const Totals& totals() const { return totals_; }
  void recompute_totals();

  // True if level i has a tight set or an element.
  bool occupied(Level i) const;
  // Next occupied level strictly above i, or nullopt.
  std::optional<Level> next_occupied(Level i) const;

  // Smallest k with phi_{<=k} > eps (c(T_{<=k}) + f w(E_{<=k})), or nullopt
  // when the global inequality holds.
  std::optional<Level> find_rebuild_k(double epsilon, double frequency);

 private:
  std::uint32_t sentinel(Level i, TightClass cls) const {
    return static_cast<std::uint32_t>(num_sets_ +
                                      static_cast<std::size_t>(i) * 3 +
                                      static_cast<std::size_t>(cls));
  }
  void link(std::uint32_t x, std::uint32_t head);
  void unlink(std::uint32_t x);
  void splice(std::uint32_t from_head, std::uint32_t to_head);
  void refresh_bit(Level i);
  void clean_level(Level i);

  std::size_t num_sets_;
  Level top_;
  Level low_cutoff_;
  std::vector<std::uint32_t> next_;
  std::vector<std::uint32_t> prev_;
  std::vector<LevelAggregate> agg_;
  std::vector<std::vector<ElemSlot>> elems_;
  std::vector<std::uint32_t> elem_pos_;
  std::vector<std::uint64_t> bits_;
  Totals totals_;
  std::uint64_t now_ = 0;
  std::vector<std::uint64_t> aux_;
};

template <typename Fn>
void LevelIndex::implicit_zero_levels(Level lo, Level hi, Fn&& on_untight) {
  const std::uint64_t stamp = tick();
  const auto dead = TightClass::kByDeadWeight;
  const auto slack = TightClass::kSlack;
  const auto by_weight = TightClass::kByWeight;
  LevelAggregate& base = agg_[0];
  for (Level i = lo; i <= hi; ++i) {
    aux_[static_cast<std::size_t>(i)] = stamp;
    LevelAggregate& a = agg_[static_cast<std::size_t>(i)];
    totals_.phi -= a.phi;
    a.phi = 0;
    for_each_set(i, dead,
                 [&](std::uint32_t s) { on_untight(static_cast<SetIndex>(s)); });
    totals_.tight_cost -= a.set_cost[1];
    if (i == 0) {
      splice(sentinel(0, dead), sentinel(0, slack));
      base.set_count[0] += base.set_count[1];
      base.set_cost[0] += base.set_cost[1];
      base.set_count[1] = 0;
      base.set_cost[1] = 0;
      refresh_bit(0);
      continue;
    }
    splice(sentinel(i, dead), sentinel(0, slack));
    splice(sentinel(i, slack), sentinel(0, slack));
    splice(sentinel(i, by_weight), sentinel(0, by_weight));
    base.set_count[0] += a.set_count[0] + a.set_count[1];
    base.set_cost[0] += a.set_cost[0] + a.set_cost[1];
    base.set_count[2] += a.set_count[2];
    base.set_cost[2] += a.set_cost[2];
    for (int c = 0; c < 3; ++c) {
      a.set_count[c] = 0;
      a.set_cost[c] = 0;
    }
    refresh_bit(i);
  }
  refresh_bit(0);
}

}  // namespace dsc
