#include "dsc/level_index.hpp"

#include <bit>

#include "dsc/errors.hpp"

namespace dsc {

LevelIndex::LevelIndex(std::size_t num_sets, std::size_t elem_capacity,
                       Level top_level, Level low_cutoff)
    : num_sets_(num_sets), top_(top_level), low_cutoff_(low_cutoff) {
  DSC_CHECK(top_level >= 1);
  const auto levels = static_cast<std::size_t>(top_level) + 1;
  const std::size_t nodes = num_sets + levels * 3;
  next_.resize(nodes);
  prev_.resize(nodes);
  for (std::size_t x = 0; x < nodes; ++x) {
    next_[x] = static_cast<std::uint32_t>(x);
    prev_[x] = static_cast<std::uint32_t>(x);
  }
  agg_.resize(levels);
  elems_.resize(levels);
  elem_pos_.assign(elem_capacity, 0);
  bits_.assign((levels + 63) / 64, 0);
  aux_.assign(levels, 0);
}

void LevelIndex::init_sets(const std::vector<SetStatic>& statics) {
  DSC_CHECK(statics.size() == num_sets_);
  for (std::size_t s = 0; s < statics.size(); ++s) {
    link(static_cast<std::uint32_t>(s), sentinel(0, TightClass::kSlack));
    agg_[0].set_count[0] += 1;
    agg_[0].set_cost[0] += statics[s].cost;
  }
}

void LevelIndex::link(std::uint32_t x, std::uint32_t head) {
  std::uint32_t last = prev_[head];
  next_[last] = x;
  prev_[x] = last;
  next_[x] = head;
  prev_[head] = x;
}

void LevelIndex::unlink(std::uint32_t x) {
  next_[prev_[x]] = next_[x];
  prev_[next_[x]] = prev_[x];
  next_[x] = x;
  prev_[x] = x;
}

void LevelIndex::splice(std::uint32_t from_head, std::uint32_t to_head) {
  if (next_[from_head] == from_head) return;
  std::uint32_t first = next_[from_head];
  std::uint32_t last = prev_[from_head];
  std::uint32_t tail = prev_[to_head];
  next_[tail] = first;
  prev_[first] = tail;
  next_[last] = to_head;
  prev_[to_head] = last;
  next_[from_head] = from_head;
  prev_[from_head] = from_head;
}

void LevelIndex::clean_level(Level i) {
  LevelAggregate& a = agg_[static_cast<std::size_t>(i)];
  for (int c = 0; c < 3; ++c) {
    if (a.set_count[c] == 0) a.set_cost[c] = 0;
  }
  if (a.total_sets() == 0) a.phi = 0;
  if (a.elem_count == 0) a.elem_weight = 0;
}

void LevelIndex::refresh_bit(Level i) {
  const auto u = static_cast<std::size_t>(i);
  const std::uint64_t mask = std::uint64_t{1} << (u % 64);
  const LevelAggregate& a = agg_[u];
  if (a.tight_count() > 0 || a.elem_count > 0) {
    bits_[u / 64] |= mask;
  } else {
    bits_[u / 64] &= ~mask;
  }
}

bool LevelIndex::occupied(Level i) const {
  const auto u = static_cast<std::size_t>(i);
  return (bits_[u / 64] >> (u % 64)) & 1U;
}

std::optional<Level> LevelIndex::next_occupied(Level i) const {
  auto u = static_cast<std::size_t>(i) + 1;
  if (u > static_cast<std::size_t>(top_)) return std::nullopt;
  std::size_t w = u / 64;
  std::uint64_t word = bits_[w] & (~std::uint64_t{0} << (u % 64));
  while (true) {
    if (word != 0) {
      auto found = w * 64 + static_cast<std::size_t>(std::countr_zero(word));
      if (found > static_cast<std::size_t>(top_)) return std::nullopt;
      return static_cast<Level>(found);
    }
    if (++w >= bits_.size()) return std::nullopt;
    word = bits_[w];
  }
}

void LevelIndex::move_set(SetIndex s, Level from, Level to, TightClass cls,
                          double cost, double phi) {
  DSC_CHECK(to >= 0 && to <= top_);
  if (from == to) return;
  const auto c = static_cast<std::size_t>(cls);
  LevelAggregate& a = agg_[static_cast<std::size_t>(from)];
  LevelAggregate& b = agg_[static_cast<std::size_t>(to)];
  unlink(s);
  link(s, sentinel(to, cls));
  a.set_count[c] -= 1;
  a.set_cost[c] -= cost;
  a.phi -= phi;
  b.set_count[c] += 1;
  b.set_cost[c] += cost;
  b.phi += phi;
  clean_level(from);
  refresh_bit(from);
  refresh_bit(to);
}

void LevelIndex::reclassify(SetIndex s, Level lev, TightClass from,
                            TightClass to, double cost) {
  if (from == to) return;
  LevelAggregate& a = agg_[static_cast<std::size_t>(lev)];
  unlink(s);
  link(s, sentinel(lev, to));
  a.set_count[static_cast<std::size_t>(from)] -= 1;
  a.set_cost[static_cast<std::size_t>(from)] -= cost;
  a.set_count[static_cast<std::size_t>(to)] += 1;
  a.set_cost[static_cast<std::size_t>(to)] += cost;
  if (is_tight_class(from) && !is_tight_class(to)) totals_.tight_cost -= cost;
  if (!is_tight_class(from) && is_tight_class(to)) totals_.tight_cost += cost;
  clean_level(lev);
  refresh_bit(lev);
}

void LevelIndex::add_phi(Level lev, double delta) {
  agg_[static_cast<std::size_t>(lev)].phi += delta;
  totals_.phi += delta;
}

void LevelIndex::add_element(ElemSlot e, Level zlev, double weight) {
  auto& list = elems_[static_cast<std::size_t>(zlev)];
  elem_pos_[e] = static_cast<std::uint32_t>(list.size());
  list.push_back(e);
  LevelAggregate& a = agg_[static_cast<std::size_t>(zlev)];
  a.elem_count += 1;
  a.elem_weight += weight;
  totals_.elem_weight += weight;
  refresh_bit(zlev);
}

void LevelIndex::remove_element(ElemSlot e, Level zlev, double weight) {
  auto& list = elems_[static_cast<std::size_t>(zlev)];
  std::uint32_t pos = elem_pos_[e];
  DSC_CHECK(pos < list.size() && list[pos] == e);
  ElemSlot last = list.back();
  list[pos] = last;
  elem_pos_[last] = pos;
  list.pop_back();
  LevelAggregate& a = agg_[static_cast<std::size_t>(zlev)];
  a.elem_count -= 1;
  a.elem_weight -= weight;
  totals_.elem_weight -= weight;
  clean_level(zlev);
  refresh_bit(zlev);
}

void LevelIndex::move_element(ElemSlot e, Level from, Level to, double weight) {
  if (from == to) return;
  remove_element(e, from, weight);
  add_element(e, to, weight);
}

void LevelIndex::reweigh_element(Level zlev, double old_weight,
                                 double new_weight) {
  LevelAggregate& a = agg_[static_cast<std::size_t>(zlev)];
  a.elem_weight += new_weight - old_weight;
  totals_.elem_weight += new_weight - old_weight;
}

bool LevelIndex::materialize(SetState& s, double threshold) {
  if (s.tm > aux_[static_cast<std::size_t>(s.lev)]) return false;
  s.lev = 0;
  s.phi = 0;
  s.tm = tick();
  s.tight = classify(s.omega, 0.0, threshold);
  return true;
}

void LevelIndex::recompute_totals() {
  Totals t;
  for (const LevelAggregate& a : agg_) {
    t.phi += a.phi;
    t.tight_cost += a.tight_cost();
    t.elem_weight += a.elem_weight;
  }
  totals_ = t;
}

std::optional<Level> LevelIndex::find_rebuild_k(double epsilon,
                                                double frequency) {
  auto violated = [&](double phi, double cost, double weight) {
    return phi > epsilon * (cost + frequency * weight);
  };
  if (!violated(totals_.phi, totals_.tight_cost, totals_.elem_weight)) {
    return std::nullopt;
  }
  double phi = 0;
  double cost = 0;
  double weight = 0;
  std::optional<Level> i = 0;
  while (i) {
    const LevelAggregate& a = agg_[static_cast<std::size_t>(*i)];
    phi += a.phi;
    cost += a.tight_cost();
    weight += a.elem_weight;
    if (violated(phi, cost, weight)) return i;
    if (*i < low_cutoff_ && *i < top_) {
      i = *i + 1;
    } else {
      i = next_occupied(*i);
    }
  }
  // Only rounding separates the running totals from the per-level sums.
  recompute_totals();
  return std::nullopt;
}

}  // namespace dsc
