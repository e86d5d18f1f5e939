#pragma once

#include <vector>

#include "dsc/engine.hpp"

namespace dsc {

// Builds crafted engine states through the engine's own write paths so that
// registries, buckets and aggregates stay consistent. Weights added with
// add_weight have no backing elements and are meant for single-step tests.
class EngineTestPeer {
 public:
  static SetIndex index_of(const Engine& eng, SetId id) {
    return *eng.set_index(id);
  }

  static void place_set(Engine& eng, SetId id, Level lev, double phi = 0) {
    const SetIndex s = index_of(eng, id);
    eng.touch(s);
    eng.write_level(s, lev);
    eng.write_phi(s, phi);
  }

  static void add_weight(Engine& eng, SetId id, double delta) {
    const SetIndex s = index_of(eng, id);
    eng.write_omega(s, eng.touch(s).omega + delta);
  }

  // Registers a live element with the given state; member weights grow by
  // its weight.
  static ElemSlot place_element(Engine& eng, ElementId id,
                                const std::vector<SetId>& members,
                                ElementStatus status, Level zlev, Level ilev) {
    const ElemSlot e = allocate(eng, id, members);
    ElementState& el = eng.elems_[e];
    el.status = status;
    el.zlev = zlev;
    el.ilev = ilev;
    const double w = eng.pow_[ilev];
    eng.index_.add_element(e, zlev, w);
    for (std::uint32_t j = 0; j < el.degree; ++j) {
      const SetIndex s = eng.members_[eng.flat(e, j)];
      eng.write_omega(s, eng.touch(s).omega + w);
      eng.bucket_add(e, j);
    }
    return e;
  }

  // The insert primitive alone, without the rebuild loop.
  static ElemSlot insert_primitive(Engine& eng, ElementId id,
                                   const std::vector<SetId>& members) {
    const ElemSlot e = allocate(eng, id, members);
    eng.insert_element(e);
    return e;
  }

  // The delete primitive alone, without the rebuild loop.
  static void delete_primitive(Engine& eng, ElementId id) {
    const ElemSlot e = eng.elem_ids_.at(id);
    eng.delete_element(e);
    for (SetIndex s : eng.members(e)) eng.sets_[s].live_members -= 1;
    eng.elems_[e].live = false;
    eng.elem_ids_.erase(id);
    eng.free_slots_.push_back(e);
    --eng.live_;
  }

  // Prepares rebuild scratch so that dirty-element routines can run alone.
  static void open_rebuild(Engine& eng, Level k) {
    eng.rb_k_ = k;
    ++eng.rb_epoch_;
    eng.rb_clean_.clear();
    eng.rb_dirty_.clear();
    eng.rb_promoted_.clear();
    eng.rb_sets_.clear();
  }
  static void close_rebuild(Engine& eng) { eng.rb_k_ = -1; }
  static const std::vector<ElemSlot>& promoted(const Engine& eng) {
    return eng.rb_promoted_;
  }
  static const std::vector<SetIndex>& touched_sets(const Engine& eng) {
    return eng.rb_sets_;
  }

  static void fix_level(Engine& eng, ElemSlot e, Level l, bool fresh) {
    eng.fix_level(e, l, fresh);
  }
  static void rebuild(Engine& eng, Level k) { eng.rebuild(k); }
  static void handle_det(Engine& eng, ElemSlot e) { eng.handle_det(e); }
  static void dec_ilev(Engine& eng, ElemSlot e) { eng.dec_ilev(e); }
  static void zero_levels(Engine& eng, Level lo, Level hi) {
    eng.zero_levels(lo, hi);
  }
  static std::optional<Level> find_rebuild_k(Engine& eng) {
    return eng.index_.find_rebuild_k(eng.cfg_.epsilon,
                                     static_cast<double>(eng.cfg_.max_frequency));
  }
  static double one_up(const Engine& eng, SetId id) {
    return eng.one_up(index_of(eng, id));
  }

 private:
  static ElemSlot allocate(Engine& eng, ElementId id,
                           const std::vector<SetId>& members) {
    const ElemSlot e = eng.free_slots_.back();
    eng.free_slots_.pop_back();
    ElementState& el = eng.elems_[e];
    el = ElementState{};
    el.id = id;
    el.live = true;
    el.degree = static_cast<std::uint32_t>(members.size());
    auto mem = eng.members_mut(e);
    for (std::size_t j = 0; j < members.size(); ++j) {
      mem[j] = *eng.set_index(members[j]);
      eng.sets_[mem[j]].live_members += 1;
    }
    eng.elem_ids_.emplace(id, e);
    ++eng.live_;
    return e;
  }
};

}  // namespace dsc
