#include "dsc/engine.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "dsc/errors.hpp"

namespace dsc {

namespace {

constexpr std::uint32_t kRefreshWrites = 65536;
constexpr std::uint64_t kTotalsPeriod = 1024;

std::vector<SetStatic> make_statics(const Config& cfg,
                                    const std::vector<SetSpec>& sets,
                                    const PowerTable& pow) {
  std::vector<SetStatic> out;
  out.reserve(sets.size());
  std::unordered_set<SetId> seen;
  const double min_cost = 1.0 / static_cast<double>(cfg.cost_ratio);
  for (const SetSpec& spec : sets) {
    if (!seen.insert(spec.id).second) {
      throw ConfigError("duplicate set id " + std::to_string(spec.id));
    }
    if (!(spec.cost >= min_cost && spec.cost <= 1.0)) {
      throw ConfigError("cost of set " + std::to_string(spec.id) +
                        " outside [1/C, 1]");
    }
    SetStatic st;
    st.id = spec.id;
    st.cost = spec.cost;
    st.tight_threshold = spec.cost / (1.0 + cfg.epsilon);
    st.base = pow.base_level(spec.cost);
    out.push_back(st);
  }
  return out;
}

}  // namespace

Engine::Engine(Config cfg, const std::vector<SetSpec>& sets)
    : cfg_(std::move(cfg)),
      geo_(derive_geometry(cfg_)),
      pow_(cfg_.epsilon, geo_.max_level + geo_.gap_bound + 2),
      schedule_(cfg_, geo_.max_level + geo_.gap_bound + 2),
      statics_(make_statics(cfg_, sets, pow_)),
      sets_(sets.size()),
      index_(sets.size(), static_cast<std::size_t>(cfg_.capacity),
             geo_.max_level + 1, geo_.low_cutoff),
      rng_(cfg_.rng_seed) {
  index_.init_sets(statics_);
  const auto set_levels = static_cast<std::size_t>(geo_.max_level) + 2;
  const auto elem_levels = static_cast<std::size_t>(pow_.max_index()) + 1;
  for (std::size_t s = 0; s < sets_.size(); ++s) {
    sets_[s].active.resize(set_levels);
    sets_[s].passive.resize(elem_levels);
    set_ids_.emplace(statics_[s].id, static_cast<SetIndex>(s));
  }
  const auto cap = static_cast<std::size_t>(cfg_.capacity);
  const auto f = static_cast<std::size_t>(cfg_.max_frequency);
  elems_.resize(cap);
  members_.resize(cap * f);
  bucket_pos_.resize(cap * f);
  free_slots_.reserve(cap);
  for (std::size_t e = cap; e > 0; --e) {
    free_slots_.push_back(static_cast<ElemSlot>(e - 1));
  }
  recourse_mark_.assign(sets_.size(), 0);
  rb_set_mark_.assign(sets_.size(), 0);
  rb_hat_mark_.assign(sets_.size(), 0);
  rb_hat_index_.assign(sets_.size(), 0);
  stats_.rebuild_k_histogram.assign(static_cast<std::size_t>(geo_.max_level) + 2,
                                    0);
}

std::optional<SetIndex> Engine::set_index(SetId id) const {
  auto it = set_ids_.find(id);
  if (it == set_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<ElemSlot> Engine::slot_of(ElementId id) const {
  auto it = elem_ids_.find(id);
  if (it == elem_ids_.end()) return std::nullopt;
  return it->second;
}

std::span<const SetIndex> Engine::members(ElemSlot e) const {
  return {members_.data() + flat(e, 0), elems_[e].degree};
}

std::span<SetIndex> Engine::members_mut(ElemSlot e) {
  return {members_.data() + flat(e, 0), elems_[e].degree};
}

Level Engine::element_level(ElemSlot e) const {
  Level lev = 0;
  for (SetIndex s : members(e)) lev = std::max(lev, set_level(s));
  return lev;
}

std::vector<ElemSlot> Engine::live_slots() const {
  std::vector<ElemSlot> out;
  out.reserve(live_);
  for (std::size_t e = 0; e < elems_.size(); ++e) {
    if (elems_[e].live) out.push_back(static_cast<ElemSlot>(e));
  }
  return out;
}

bool Engine::set_tight(SetIndex s) const {
  return is_tight_class(
      index_.effective_class(sets_[s], statics_[s].tight_threshold));
}

std::vector<SetId> Engine::query_cover() const {
  std::vector<SetId> out;
  for (SetIndex s = 0; s < sets_.size(); ++s) {
    if (set_tight(s)) out.push_back(statics_[s].id);
  }
  return out;
}

double Engine::query_cover_cost() const {
  double cost = 0;
  for (SetIndex s = 0; s < sets_.size(); ++s) {
    if (set_tight(s)) cost += statics_[s].cost;
  }
  return cost;
}

std::size_t Engine::tight_set_count() const {
  std::size_t n = 0;
  for (SetIndex s = 0; s < sets_.size(); ++s) n += set_tight(s) ? 1 : 0;
  return n;
}

void Engine::validate(const Update& u) const {
  const bool known = elem_ids_.count(u.elem) != 0;
  if (u.kind == Update::Kind::kDelete) {
    if (!known) {
      throw UpdateError(UpdateErrorKind::kUnknownElement,
                        "element " + std::to_string(u.elem) + " is not live");
    }
    return;
  }
  if (known) {
    throw UpdateError(UpdateErrorKind::kDuplicateElement,
                      "element " + std::to_string(u.elem) + " already live");
  }
  if (u.members.empty()) {
    throw UpdateError(UpdateErrorKind::kInvalidMembers,
                      "element " + std::to_string(u.elem) + " has no sets");
  }
  if (u.members.size() > static_cast<std::size_t>(cfg_.max_frequency)) {
    throw UpdateError(UpdateErrorKind::kFrequencyExceeded,
                      "element " + std::to_string(u.elem) + " has " +
                          std::to_string(u.members.size()) + " sets, f = " +
                          std::to_string(cfg_.max_frequency));
  }
  for (std::size_t i = 0; i < u.members.size(); ++i) {
    if (!set_ids_.count(u.members[i])) {
      throw UpdateError(UpdateErrorKind::kUnknownSet,
                        "unknown set " + std::to_string(u.members[i]));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (u.members[j] == u.members[i]) {
        throw UpdateError(UpdateErrorKind::kInvalidMembers,
                          "set " + std::to_string(u.members[i]) +
                              " listed twice");
      }
    }
  }
  if (live_ >= static_cast<std::size_t>(cfg_.capacity)) {
    throw UpdateError(UpdateErrorKind::kCapacityExceeded,
                      "capacity " + std::to_string(cfg_.capacity) + " reached");
  }
}

CoverDelta Engine::insert(ElementId e, std::span<const SetId> members) {
  return apply_update(
      Update::insert(e, std::vector<SetId>(members.begin(), members.end())));
}

CoverDelta Engine::erase(ElementId e) { return apply_update(Update::erase(e)); }

CoverDelta Engine::apply_update(const Update& u) {
  validate(u);
  ++update_epoch_;
  recourse_.clear();
  if (observer_) observer_->on_update_begin(*this, u);

  if (u.kind == Update::Kind::kInsert) {
    ElemSlot e = free_slots_.back();
    free_slots_.pop_back();
    ElementState& el = elems_[e];
    el = ElementState{};
    el.id = u.elem;
    el.live = true;
    el.degree = static_cast<std::uint32_t>(u.members.size());
    auto mem = members_mut(e);
    for (std::size_t j = 0; j < u.members.size(); ++j) {
      mem[j] = set_ids_.at(u.members[j]);
      sets_[mem[j]].live_members += 1;
    }
    elem_ids_.emplace(u.elem, e);
    ++live_;
    ++stats_.inserts;
    insert_element(e);
  } else {
    ElemSlot e = elem_ids_.at(u.elem);
    delete_element(e);
    for (SetIndex s : members(e)) sets_[s].live_members -= 1;
    elems_[e].live = false;
    elem_ids_.erase(u.elem);
    free_slots_.push_back(e);
    --live_;
    ++stats_.deletes;
  }
  if (observer_) observer_->on_primitive_done(*this, u);

  const int limit = 4 * (geo_.max_level + 2) + 16;
  int rounds = 0;
  while (auto k = index_.find_rebuild_k(cfg_.epsilon,
                                        static_cast<double>(cfg_.max_frequency))) {
    DSC_CHECK(++rounds <= limit);
    rebuild(*k);
  }

  for (SetIndex s : refresh_due_) refresh_weight(s);
  refresh_due_.clear();
  if (++updates_since_totals_ >= kTotalsPeriod) {
    updates_since_totals_ = 0;
    index_.recompute_totals();
  }

  CoverDelta delta;
  for (auto [s, was] : recourse_) {
    bool now = set_tight(s);
    if (now == was) continue;
    (now ? delta.entered : delta.left).push_back(statics_[s].id);
    ++stats_.cover_recourse;
  }
  if (observer_) observer_->on_update_end(*this, u);
  return delta;
}

// ---------------------------------------------------------------------------
// State plumbing

SetState& Engine::touch(SetIndex s) {
  SetState& st = sets_[s];
  index_.materialize(st, statics_[s].tight_threshold);
  return st;
}

void Engine::note_tightness(SetIndex s, bool was_tight) {
  if (recourse_mark_[s] == update_epoch_) return;
  recourse_mark_[s] = update_epoch_;
  recourse_.emplace_back(s, was_tight);
}

void Engine::reclassify(SetIndex s) {
  SetState& st = sets_[s];
  const SetStatic& sc = statics_[s];
  TightClass c = classify(st.omega, st.phi, sc.tight_threshold);
  if (c == st.tight) return;
  index_.reclassify(s, st.lev, st.tight, c, sc.cost);
  if (is_tight_class(c) != is_tight_class(st.tight)) {
    note_tightness(s, is_tight_class(st.tight));
  }
  st.tight = c;
}

void Engine::write_omega(SetIndex s, double omega) {
  SetState& st = sets_[s];
  st.omega = omega;
  if (++st.writes == kRefreshWrites) refresh_due_.push_back(s);
  reclassify(s);
}

void Engine::write_phi(SetIndex s, double phi) {
  SetState& st = sets_[s];
  index_.add_phi(st.lev, phi - st.phi);
  st.phi = phi;
  st.tm = index_.tick();
  reclassify(s);
}

void Engine::write_level(SetIndex s, Level lev) {
  SetState& st = sets_[s];
  if (st.lev == lev) return;
  index_.move_set(s, st.lev, lev, st.tight, statics_[s].cost, st.phi);
  st.lev = lev;
  st.tm = index_.tick();
}

void Engine::set_zlev(ElemSlot e, Level z) {
  ElementState& el = elems_[e];
  index_.move_element(e, el.zlev, z, pow_[el.ilev]);
  el.zlev = z;
}

void Engine::set_ilev(ElemSlot e, Level i) {
  ElementState& el = elems_[e];
  DSC_CHECK(i >= 0 && i <= pow_.max_index());
  index_.reweigh_element(el.zlev, pow_[el.ilev], pow_[i]);
  el.ilev = i;
}

void Engine::bucket_remove(ElemSlot e, std::uint32_t j) {
  const ElementState& el = elems_[e];
  SetState& st = sets_[members_[flat(e, j)]];
  auto& vec = (el.status == ElementStatus::kActive ? st.active : st.passive)
      [static_cast<std::size_t>(el.ilev)];
  std::uint32_t pos = bucket_pos_[flat(e, j)];
  DSC_CHECK(pos < vec.size() && vec[pos].elem == e && vec[pos].member == j);
  BucketEntry last = vec.back();
  vec[pos] = last;
  bucket_pos_[flat(last.elem, last.member)] = pos;
  vec.pop_back();
}

void Engine::bucket_add(ElemSlot e, std::uint32_t j) {
  const ElementState& el = elems_[e];
  SetState& st = sets_[members_[flat(e, j)]];
  auto& vec = (el.status == ElementStatus::kActive ? st.active : st.passive)
      [static_cast<std::size_t>(el.ilev)];
  bucket_pos_[flat(e, j)] = static_cast<std::uint32_t>(vec.size());
  vec.push_back({e, j});
}

double Engine::one_up(SetIndex s) const {
  const SetState& st = sets_[s];
  return weight_one_up(st.omega,
                       st.active[static_cast<std::size_t>(st.lev)].size(),
                       st.lev, pow_);
}

void Engine::refresh_weight(SetIndex s) {
  SetState& st = touch(s);
  double w = 0;
  for (std::size_t i = 0; i < st.active.size(); ++i) {
    w += static_cast<double>(st.active[i].size()) * pow_[static_cast<int>(i)];
  }
  for (std::size_t i = 0; i < st.passive.size(); ++i) {
    w += static_cast<double>(st.passive[i].size()) * pow_[static_cast<int>(i)];
  }
  st.writes = 0;
  write_omega(s, w);
  ++stats_.weight_refreshes;
}

void Engine::zero_levels(Level lo, Level hi) {
  index_.implicit_zero_levels(lo, hi,
                              [&](SetIndex s) { note_tightness(s, true); });
}

// Elements of A_k(s) rise to k+1. Their other sets are compensated with dead
// weight.
void Engine::raise_frontier(SetIndex s, Level k) {
  scratch_raise_ = sets_[s].active[static_cast<std::size_t>(k)];
  const double loss = pow_.drop(k + 1);
  for (const BucketEntry& be : scratch_raise_) {
    const ElemSlot x = be.elem;
    const std::uint32_t deg = elems_[x].degree;
    for (std::uint32_t j = 0; j < deg; ++j) {
      touch(members_[flat(x, j)]);
      bucket_remove(x, j);
    }
    set_ilev(x, k + 1);
    set_zlev(x, k + 1);
    for (std::uint32_t j = 0; j < deg; ++j) {
      const SetIndex t = members_[flat(x, j)];
      bucket_add(x, j);
      write_omega(t, sets_[t].omega - loss);
      if (t != s) write_phi(t, sets_[t].phi + loss);
    }
    ++stats_.raised_elements;
  }
}

void Engine::activate_passive(SetIndex s, Level lev) {
  scratch_activate_ = sets_[s].passive[static_cast<std::size_t>(lev)];
  for (const BucketEntry& be : scratch_activate_) {
    const ElemSlot x = be.elem;
    const std::uint32_t deg = elems_[x].degree;
    DSC_CHECK(elems_[x].ilev == lev);
    for (std::uint32_t j = 0; j < deg; ++j) bucket_remove(x, j);
    elems_[x].status = ElementStatus::kActive;
    set_zlev(x, lev);
    for (std::uint32_t j = 0; j < deg; ++j) bucket_add(x, j);
    ++stats_.activated_elements;
  }
}

// ---------------------------------------------------------------------------
// Primitives

void Engine::delete_element(ElemSlot e) {
  ElementState& el = elems_[e];
  const double w = pow_[el.ilev];
  for (std::uint32_t j = 0; j < el.degree; ++j) {
    const SetIndex s = members_[flat(e, j)];
    SetState& st = touch(s);
    const bool was_tight = is_tight_class(st.tight);
    write_omega(s, st.omega - w);
    if (was_tight) write_phi(s, st.phi + w);
    bucket_remove(e, j);
  }
  index_.remove_element(e, el.zlev, w);
}

void Engine::insert_element(ElemSlot e) {
  ElementState& el = elems_[e];
  auto mem = members(e);
  Level z = 0;
  for (SetIndex s : mem) z = std::max(z, touch(s).lev);
  const Level l = z + geo_.gap_bound;
  el.zlev = z;
  el.ilev = l;
  el.status = ElementStatus::kPassive;

  bool any = false;
  SetIndex closest = mem[0];
  for (SetIndex s : mem) {
    const double room = statics_[s].cost - sets_[s].omega;
    if (sets_[s].omega + pow_[l] >= statics_[s].cost) any = true;
    if (room < statics_[closest].cost - sets_[closest].omega) closest = s;
  }
  if (any) {
    index_.add_element(e, z, pow_[l]);
    fix_level(e, l, /*fresh=*/true);
    return;
  }

  // Smallest h >= z with omega(s) + pow[h] < c_s for every member. The
  // member with least room decides it; the sweep guards against ties.
  auto fits = [&](Level h) {
    for (SetIndex s : mem) {
      if (!(sets_[s].omega + pow_[h] < statics_[s].cost)) return false;
    }
    return true;
  };
  Level h = z;
  {
    Level a = z;
    Level b = l;
    while (a < b) {
      Level mid = a + (b - a) / 2;
      if (sets_[closest].omega + pow_[mid] < statics_[closest].cost) {
        b = mid;
      } else {
        a = mid + 1;
      }
    }
    h = a;
  }
  while (!fits(h)) ++h;
  DSC_CHECK(h <= l);

  el.ilev = h;
  el.status = h == z ? ElementStatus::kActive : ElementStatus::kPassive;
  index_.add_element(e, z, pow_[h]);
  for (std::uint32_t j = 0; j < el.degree; ++j) {
    const SetIndex s = members_[flat(e, j)];
    write_omega(s, sets_[s].omega + pow_[h]);
    bucket_add(e, j);
  }
}

void Engine::fix_level(ElemSlot e, Level l, bool fresh) {
  ++stats_.fixlevel_calls;
  ElementState& el = elems_[e];
  const std::uint32_t deg = el.degree;
  Level lev_e = 0;
  for (std::uint32_t j = 0; j < deg; ++j) {
    lev_e = std::max(lev_e, touch(members_[flat(e, j)]).lev);
  }
  DSC_CHECK(el.zlev == lev_e);
  DSC_CHECK(lev_e < l);
  double w_old = 0;
  if (fresh) {
    DSC_CHECK(el.ilev == l && el.status == ElementStatus::kPassive);
  } else {
    DSC_CHECK(l <= el.ilev);
    if (l == el.ilev) return;
    for (std::uint32_t j = 0; j < deg; ++j) bucket_remove(e, j);
    w_old = pow_[el.ilev];
    el.status = ElementStatus::kPassive;
    set_ilev(e, l);
  }
  const double w_target = pow_[l];
  auto& in_f = scratch_flags_;
  auto& recorded = scratch_levels_;
  in_f.assign(deg, 0);
  recorded.assign(deg, l);
  for (std::uint32_t j = 0; j < deg; ++j) {
    const SetIndex s = members_[flat(e, j)];
    write_omega(s, sets_[s].omega - w_old + w_target);
    in_f[j] = sets_[s].omega >= statics_[s].cost ? 1 : 0;
  }
  const Level d = l - el.zlev;

  for (std::uint32_t j = 0; j < deg; ++j) {
    const SetIndex s = members_[flat(e, j)];
    const SetStatic& sc = statics_[s];
    SetState& st = touch(s);
    write_omega(s, st.omega - w_target + pow_[el.ilev]);
    const Level floor_level = std::min(sc.base, el.zlev);
    if (st.lev < floor_level && one_up(s) >= sc.cost) {
      for (Level i = st.lev; i < floor_level; ++i) {
        DSC_CHECK(st.active[static_cast<std::size_t>(i)].empty());
      }
      write_phi(s, 0);
      write_level(s, floor_level);
      activate_passive(s, floor_level);
    }
    while (one_up(s) >= sc.cost) {
      write_phi(s, 0);
      const Level k = st.lev;
      DSC_CHECK(k + 1 <= geo_.max_level + 1);
      write_level(s, k + 1);
      raise_frontier(s, k);
      if (el.zlev == k) {
        set_zlev(e, k + 1);
        set_ilev(e, k + 1 + d);
        write_omega(s, st.omega - pow_.drop(k + 1 + d));
      }
      activate_passive(s, k + 1);
      ++stats_.fixlevel_raises;
    }
    recorded[j] = el.ilev;
  }

  const double w_final = pow_[el.ilev];
  for (std::uint32_t j = 0; j < deg; ++j) {
    const SetIndex s = members_[flat(e, j)];
    SetState& st = touch(s);
    const double w_seen = pow_[recorded[j]];
    write_omega(s, st.omega - w_seen + w_final);
    if (in_f[j]) write_phi(s, st.phi + w_seen - w_final);
    bucket_add(e, j);
  }
}

}  // namespace dsc
