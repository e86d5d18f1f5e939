#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "dsc/config.hpp"
#include "dsc/level_index.hpp"
#include "dsc/model.hpp"
#include "dsc/power_table.hpp"
#include "dsc/rand_schedule.hpp"
#include "dsc/rng.hpp"

namespace dsc {

struct Update {
  enum class Kind : std::uint8_t { kInsert, kDelete };
  Kind kind = Kind::kInsert;
  ElementId elem = 0;
  std::vector<SetId> members;

  static Update insert(ElementId e, std::vector<SetId> members) {
    return {Kind::kInsert, e, std::move(members)};
  }
  static Update erase(ElementId e) { return {Kind::kDelete, e, {}}; }
  bool operator==(const Update&) const = default;
};

// Sets that joined or left the cover during one update.
struct CoverDelta {
  std::vector<SetId> entered;
  std::vector<SetId> left;
};

// Outcome of a dirty element handled on the randomized path.
enum class RandBranch : std::uint8_t {
  kWitness,
  kFhatEmpty,
  kFhatSmall,
  kFhatLarge,
};

struct EngineStats {
  std::uint64_t inserts = 0;
  std::uint64_t deletes = 0;
  std::uint64_t rebuilds = 0;
  Level max_rebuild_k = -1;
  std::vector<std::uint64_t> rebuild_k_histogram;
  std::uint64_t fixlevel_calls = 0;
  std::uint64_t fixlevel_raises = 0;
  std::uint64_t activated_elements = 0;
  std::uint64_t raised_elements = 0;
  std::uint64_t dirty_processed = 0;
  std::uint64_t dirty_det = 0;
  std::uint64_t dirty_routed_det = 0;  // rand mode, f <= 2C/eps
  std::uint64_t dirty_rand_fallback = 0;
  std::uint64_t dirty_rand = 0;
  std::uint64_t rand_witness = 0;
  std::uint64_t rand_fhat_empty = 0;
  std::uint64_t rand_fhat_small = 0;
  std::uint64_t rand_fhat_large = 0;
  std::uint64_t sample_rounds = 0;
  std::uint64_t dec_ilev_calls = 0;
  std::uint64_t water_filling_calls = 0;
  std::uint64_t water_filling_elements = 0;
  std::uint64_t weight_refreshes = 0;
  std::uint64_t cover_recourse = 0;
  // Wall time, nanoseconds. Only filled when profiling is enabled.
  std::uint64_t ns_rebuild = 0;
  std::uint64_t ns_fixlevel = 0;
  std::uint64_t ns_water_filling = 0;
};

class Engine;

// Hooks for instrumentation. All calls happen on the mutating thread with
// the engine in the state described by the hook name.
class EngineObserver {
 public:
  virtual ~EngineObserver() = default;
  virtual void on_update_begin(const Engine&, const Update&) {}
  // After the insert/delete primitive and before any rebuild.
  virtual void on_primitive_done(const Engine&, const Update&) {}
  virtual void on_update_end(const Engine&, const Update&) {}
  virtual void on_rebuild_begin(const Engine&, Level /*k*/,
                                std::span<const ElemSlot> /*dirty*/) {}
  virtual void on_rebuild_end(const Engine&, Level /*k*/,
                              std::span<const ElemSlot> /*dirty*/) {}
  virtual void on_water_filling_done(const Engine&, Level /*k_hat*/,
                                     std::span<const SetIndex> /*sets*/,
                                     std::span<const ElemSlot> /*elems*/) {}
  virtual void on_rand_branch(const Engine&, ElemSlot, RandBranch,
                              int /*eta*/) {}
};

class Engine {
 public:
  Engine(Config cfg, const std::vector<SetSpec>& sets);

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  // Throws UpdateError without touching state on invalid input.
  CoverDelta apply_update(const Update& u);
  CoverDelta insert(ElementId e, std::span<const SetId> members);
  CoverDelta erase(ElementId e);

  std::vector<SetId> query_cover() const;
  double query_cover_cost() const;
  std::size_t tight_set_count() const;

  const EngineStats& stats() const { return stats_; }
  void set_observer(EngineObserver* obs) { observer_ = obs; }
  void set_profiling(bool on) { profiling_ = on; }

  // Read access for verification.
  const Config& config() const { return cfg_; }
  const Geometry& geometry() const { return geo_; }
  const PowerTable& powers() const { return pow_; }
  const LevelIndex& index() const { return index_; }
  const RandSchedule& rand_schedule() const { return schedule_; }
  std::size_t set_count() const { return statics_.size(); }
  const SetStatic& set_static(SetIndex s) const { return statics_[s]; }
  const SetState& set_state(SetIndex s) const { return sets_[s]; }
  Level set_level(SetIndex s) const { return index_.effective(sets_[s]).lev; }
  double set_phi(SetIndex s) const { return index_.effective(sets_[s]).phi; }
  bool set_tight(SetIndex s) const;
  std::optional<SetIndex> set_index(SetId id) const;

  std::size_t live_count() const { return live_; }
  std::size_t slot_capacity() const { return elems_.size(); }
  const ElementState& element(ElemSlot e) const { return elems_[e]; }
  std::span<const SetIndex> members(ElemSlot e) const;
  std::uint32_t bucket_position(ElemSlot e, std::uint32_t j) const {
    return bucket_pos_[flat(e, j)];
  }
  std::optional<ElemSlot> slot_of(ElementId id) const;
  // Max effective level over the element's member sets.
  Level element_level(ElemSlot e) const;
  // Live element slots in ascending order.
  std::vector<ElemSlot> live_slots() const;

 private:
  friend class EngineTestPeer;

  std::size_t flat(ElemSlot e, std::uint32_t j) const {
    return static_cast<std::size_t>(e) *
               static_cast<std::size_t>(cfg_.max_frequency) + j;
  }
  std::span<SetIndex> members_mut(ElemSlot e);

  void validate(const Update& u) const;

  // Primitives.
  void delete_element(ElemSlot e);
  void insert_element(ElemSlot e);
  void fix_level(ElemSlot e, Level l, bool fresh);
  void rebuild(Level k);
  void handle_det(ElemSlot e);
  void dec_ilev(ElemSlot e);
  void handle_rand(ElemSlot e);
  void water_filling(Level k_hat);

  // State plumbing. Every write goes through these.
  SetState& touch(SetIndex s);
  void write_omega(SetIndex s, double omega);
  void write_phi(SetIndex s, double phi);
  void write_level(SetIndex s, Level lev);
  void reclassify(SetIndex s);
  void note_tightness(SetIndex s, bool was_tight);
  void set_zlev(ElemSlot e, Level z);
  void set_ilev(ElemSlot e, Level i);
  void bucket_remove(ElemSlot e, std::uint32_t j);
  void bucket_add(ElemSlot e, std::uint32_t j);
  double one_up(SetIndex s) const;
  void raise_frontier(SetIndex s, Level k);
  void activate_passive(SetIndex s, Level lev);
  void raise_into_rebuild(SetIndex s);
  void zero_levels(Level lo, Level hi);
  void refresh_weight(SetIndex s);

  Config cfg_;
  Geometry geo_;
  PowerTable pow_;
  RandSchedule schedule_;
  std::vector<SetStatic> statics_;
  std::vector<SetState> sets_;
  LevelIndex index_;
  std::unordered_map<SetId, SetIndex> set_ids_;

  std::vector<ElementState> elems_;
  std::vector<SetIndex> members_;
  std::vector<std::uint32_t> bucket_pos_;
  std::vector<ElemSlot> free_slots_;
  std::unordered_map<ElementId, ElemSlot> elem_ids_;
  std::size_t live_ = 0;

  Rng rng_;
  EngineStats stats_;
  EngineObserver* observer_ = nullptr;
  bool profiling_ = false;
  std::uint64_t updates_since_totals_ = 0;

  // Per-update cover recourse.
  std::uint64_t update_epoch_ = 0;
  std::vector<std::uint64_t> recourse_mark_;
  std::vector<std::pair<SetIndex, bool>> recourse_;
  std::vector<SetIndex> refresh_due_;

  // Rebuild scratch.
  Level rb_k_ = -1;
  std::uint64_t rb_epoch_ = 0;
  std::vector<std::uint64_t> rb_set_mark_;
  std::vector<std::uint64_t> rb_hat_mark_;
  std::vector<std::uint32_t> rb_hat_index_;
  std::vector<ElemSlot> rb_clean_;
  std::vector<ElemSlot> rb_dirty_;
  std::vector<ElemSlot> rb_promoted_;  // E'
  std::vector<SetIndex> rb_sets_;      // S
  std::vector<ElemSlot> rb_hat_elems_;
  std::vector<SetIndex> rb_hat_sets_;
  std::vector<BucketEntry> scratch_raise_;
  std::vector<BucketEntry> scratch_activate_;
  std::vector<SetIndex> scratch_fhat_;
  std::vector<Level> scratch_levels_;
  std::vector<char> scratch_flags_;
};

}  // namespace dsc
