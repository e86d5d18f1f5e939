#include <gtest/gtest.h>

#include "dsc/engine.hpp"
#include "dsc/errors.hpp"
#include "dsc/verify/audit.hpp"
#include "engine_peer.hpp"

namespace dsc {
namespace {

using Peer = EngineTestPeer;

Config make_config(double eps, std::int32_t f, std::int64_t capacity = 16,
                   std::int64_t c = 1) {
  Config cfg;
  cfg.epsilon = eps;
  cfg.cost_ratio = c;
  cfg.max_frequency = f;
  cfg.capacity = capacity;
  return cfg;
}

double omega_of(const Engine& eng, SetId id) {
  return eng.set_state(*eng.set_index(id)).omega;
}

Level level_of(const Engine& eng, SetId id) {
  return eng.set_level(*eng.set_index(id));
}

void expect_clean_audit(const Engine& eng) {
  auto report = verify::audit(eng);
  EXPECT_TRUE(report.ok()) << report.failure_summary();
}

TEST(EngineConstruction, RejectsBadSets) {
  EXPECT_THROW(Engine(make_config(0.5, 1), {{1, 1.0}, {1, 0.5}}), ConfigError);
  EXPECT_THROW(Engine(make_config(0.5, 1, 16, 2), {{1, 0.4}}), ConfigError);
  EXPECT_THROW(Engine(make_config(0.5, 1), {{1, 1.5}}), ConfigError);
  EXPECT_NO_THROW(Engine(make_config(0.5, 1, 16, 2), {{1, 0.5}}));
}

TEST(EngineConstruction, EmptySystemAuditsClean) {
  Engine eng(make_config(0.2, 3, 16, 4), {{1, 1.0}, {2, 0.5}, {3, 0.25}});
  auto report = verify::audit(eng);
  EXPECT_TRUE(report.ok()) << report.failure_summary();
  EXPECT_DOUBLE_EQ(report.max_drift, 0.0);
  EXPECT_TRUE(eng.query_cover().empty());
  for (SetIndex s = 0; s < eng.set_count(); ++s) {
    EXPECT_EQ(eng.set_level(s), 0);
    EXPECT_DOUBLE_EQ(eng.set_phi(s), 0.0);
  }
}

// The first element of a unit-cost set is placed with the strict rule
// omega(s) + w(e) < c_s, so it lands one level up and passive.
TEST(EngineInsert, FirstElementStrictRule) {
  Engine eng(make_config(0.5, 1), {{7, 1.0}});
  CoverDelta delta = eng.insert(1, std::vector<SetId>{7});
  const ElemSlot e = *eng.slot_of(1);
  EXPECT_EQ(eng.element(e).ilev, 1);
  EXPECT_EQ(eng.element(e).zlev, 0);
  EXPECT_EQ(eng.element(e).status, ElementStatus::kPassive);
  EXPECT_NEAR(omega_of(eng, 7), 2.0 / 3.0, 1e-15);
  EXPECT_TRUE(eng.set_tight(0));
  EXPECT_EQ(delta.entered, std::vector<SetId>{7});
  EXPECT_EQ(eng.query_cover(), std::vector<SetId>{7});
  expect_clean_audit(eng);
}

TEST(EngineDelete, SingletonDeleteTriggersRebuild) {
  Engine eng(make_config(0.5, 1), {{7, 1.0}});
  eng.insert(1, std::vector<SetId>{7});
  CoverDelta delta = eng.erase(1);
  EXPECT_EQ(eng.stats().rebuilds, 1u);
  EXPECT_DOUBLE_EQ(omega_of(eng, 7), 0.0);
  EXPECT_DOUBLE_EQ(eng.set_phi(0), 0.0);
  EXPECT_EQ(eng.set_level(0), 0);
  EXPECT_TRUE(eng.query_cover().empty());
  EXPECT_EQ(delta.left, std::vector<SetId>{7});
  expect_clean_audit(eng);
}

TEST(EngineDelete, PrimitiveMovesWeightToDeadWeight) {
  // eps = 1 so that an element at level 2 weighs exactly 0.25.
  Engine eng(make_config(1.0, 2), {{1, 1.0}, {2, 1.0}});
  Peer::place_set(eng, 1, 2);
  Peer::place_element(eng, 10, {1}, ElementStatus::kActive, 2, 2);
  Peer::add_weight(eng, 1, 0.65);
  EXPECT_NEAR(omega_of(eng, 1), 0.9, 1e-15);
  Peer::delete_primitive(eng, 10);
  EXPECT_NEAR(omega_of(eng, 1), 0.65, 1e-15);
  EXPECT_NEAR(eng.set_phi(0), 0.25, 1e-15);
  EXPECT_TRUE(eng.set_tight(0));

  // Slack set: no dead weight.
  Peer::place_element(eng, 11, {2}, ElementStatus::kActive, 0, 0);
  Peer::add_weight(eng, 2, -0.8);
  EXPECT_FALSE(eng.set_tight(1));
  Peer::delete_primitive(eng, 11);
  EXPECT_DOUBLE_EQ(eng.set_phi(1), 0.0);
}

TEST(EngineInsert, PassivePlacementBySearch) {
  Engine eng(make_config(0.5, 2), {{1, 1.0}, {2, 1.0}});
  Peer::place_set(eng, 2, 1);
  Peer::add_weight(eng, 1, 0.8);
  Peer::add_weight(eng, 2, 0.2);
  const ElemSlot e = Peer::insert_primitive(eng, 5, {1, 2});
  const ElementState& el = eng.element(e);
  EXPECT_EQ(eng.geometry().gap_bound, 4);
  EXPECT_EQ(el.zlev, 1);
  EXPECT_EQ(el.ilev, 4);
  EXPECT_EQ(el.status, ElementStatus::kPassive);
  EXPECT_NEAR(omega_of(eng, 1), 0.8 + 16.0 / 81.0, 1e-12);
  EXPECT_NEAR(omega_of(eng, 1), 0.9975, 1e-4);
  EXPECT_EQ(eng.stats().fixlevel_calls, 0u);
}

TEST(EngineInsert, EmptyUnitSetsGiveActiveLevelZeroWhenRoomy) {
  // With cost 1 an empty set admits weight 1 only if 1 < 1, which fails, so
  // the element starts one level up. Costs below 1 behave the same way.
  Engine eng(make_config(0.5, 2), {{1, 1.0}, {2, 1.0}});
  const ElemSlot e = Peer::insert_primitive(eng, 5, {1, 2});
  EXPECT_EQ(eng.element(e).ilev, 1);
}

TEST(EngineInsert, FullSetRoutesToFixLevel) {
  Engine eng(make_config(0.5, 1), {{1, 1.0}});
  // omega = c - pow[l] / 2 puts the set in F.
  const double pow_l = eng.powers()[eng.geometry().gap_bound];
  Peer::add_weight(eng, 1, 1.0 - pow_l / 2);
  Peer::insert_primitive(eng, 5, {1});
  EXPECT_EQ(eng.stats().fixlevel_calls, 1u);
}

// A set at level 1 with two active level-1 elements receives a fresh
// element that overfills it: one while-iteration raises the set to 2.
TEST(EngineFixLevel, CraftedSingleRaise) {
  Engine eng(make_config(0.5, 1), {{1, 1.0}});
  Peer::place_set(eng, 1, 1);
  Peer::place_element(eng, 10, {1}, ElementStatus::kActive, 1, 1);
  Peer::place_element(eng, 11, {1}, ElementStatus::kActive, 1, 1);
  EXPECT_NEAR(omega_of(eng, 1), 4.0 / 3.0, 1e-12);
  expect_clean_audit(eng);

  const ElemSlot e = Peer::insert_primitive(eng, 12, {1});
  const PowerTable& pow = eng.powers();
  EXPECT_EQ(eng.stats().fixlevel_calls, 1u);
  EXPECT_EQ(level_of(eng, 1), 2);
  for (ElementId id : {10u, 11u}) {
    const ElementState& x = eng.element(*eng.slot_of(id));
    EXPECT_EQ(x.status, ElementStatus::kActive);
    EXPECT_EQ(x.ilev, 2);
    EXPECT_EQ(x.zlev, 2);
  }
  EXPECT_EQ(eng.element(e).zlev, 2);
  EXPECT_EQ(eng.element(e).ilev, 6);
  EXPECT_EQ(eng.element(e).status, ElementStatus::kPassive);
  EXPECT_NEAR(omega_of(eng, 1), 2 * pow[2] + pow[6], 1e-12);
  EXPECT_NEAR(verify::weight_at_level(eng, 0, 2), omega_of(eng, 1), 1e-12);
  EXPECT_LT(Peer::one_up(eng, 1), 1.0);
  expect_clean_audit(eng);
}

TEST(EngineFixLevel, TargetEqualToIntrinsicLevelChangesNothing) {
  Engine eng(make_config(0.5, 1), {{1, 1.0}});
  const ElemSlot e =
      Peer::place_element(eng, 10, {1}, ElementStatus::kPassive, 0, 3);
  const double before = omega_of(eng, 1);
  Peer::fix_level(eng, e, 3, /*fresh=*/false);
  EXPECT_EQ(eng.element(e).ilev, 3);
  EXPECT_EQ(eng.element(e).status, ElementStatus::kPassive);
  EXPECT_DOUBLE_EQ(omega_of(eng, 1), before);
  EXPECT_EQ(level_of(eng, 1), 0);
}

TEST(EngineFixLevel, SlackSetsAreNotRaised) {
  Engine eng(make_config(0.5, 2), {{1, 1.0}, {2, 1.0}});
  Peer::add_weight(eng, 1, 0.95);
  Peer::insert_primitive(eng, 5, {1, 2});
  EXPECT_GT(level_of(eng, 1), 0);
  EXPECT_EQ(level_of(eng, 2), 0);
  EXPECT_DOUBLE_EQ(eng.set_phi(1), 0.0);
}

TEST(EngineDecILev, SearchFindsSmallestFittingLevel) {
  Engine eng(make_config(0.5, 1), {{1, 1.0}});
  const ElemSlot e =
      Peer::place_element(eng, 10, {1}, ElementStatus::kPassive, 0, 4);
  Peer::add_weight(eng, 1, 0.7);
  Peer::open_rebuild(eng, 1);
  Peer::dec_ilev(eng, e);
  Peer::close_rebuild(eng);
  const ElementState& el = eng.element(e);
  // Smallest h >= 2 with 1.5^-h < 0.3 is 3.
  EXPECT_EQ(el.ilev, 3);
  EXPECT_NEAR(omega_of(eng, 1), 0.7 + 8.0 / 27.0, 1e-12);
  // The member turned tight, so it is raised to k+1 and e sits below it.
  EXPECT_EQ(level_of(eng, 1), 2);
  EXPECT_EQ(el.zlev, 2);
  EXPECT_EQ(el.status, ElementStatus::kPassive);
  EXPECT_TRUE(Peer::promoted(eng).empty());
}

TEST(EngineDecILev, AllSlackPromotesAtNextLevel) {
  Engine eng(make_config(0.5, 1), {{1, 1.0}});
  const ElemSlot e =
      Peer::place_element(eng, 10, {1}, ElementStatus::kPassive, 0, 4);
  Peer::add_weight(eng, 1, 0.1);
  Peer::open_rebuild(eng, 1);
  Peer::dec_ilev(eng, e);
  const ElementState& el = eng.element(e);
  EXPECT_EQ(el.ilev, 2);
  EXPECT_EQ(el.zlev, 2);
  EXPECT_EQ(el.status, ElementStatus::kActive);
  EXPECT_EQ(level_of(eng, 1), 2);
  EXPECT_EQ(Peer::promoted(eng), std::vector<ElemSlot>{e});
  EXPECT_EQ(Peer::touched_sets(eng).size(), 1u);
  Peer::close_rebuild(eng);
}

TEST(EngineHandleDet, TightMemberAboveRebuildLevel) {
  Engine eng(make_config(0.5, 2), {{1, 1.0}, {2, 1.0}});
  Peer::place_set(eng, 1, 4);
  const ElemSlot e =
      Peer::place_element(eng, 10, {1, 2}, ElementStatus::kPassive, 1, 5);
  Peer::add_weight(eng, 1, 0.6);
  ASSERT_TRUE(eng.set_tight(0));
  Peer::open_rebuild(eng, 1);
  Peer::handle_det(eng, e);
  Peer::close_rebuild(eng);
  EXPECT_EQ(level_of(eng, 1), 4);
  EXPECT_EQ(eng.element(e).zlev, 4);
  EXPECT_EQ(eng.element(e).ilev, 5);
}

TEST(EngineHandleDet, TightMemberBelowIsRaised) {
  Engine eng(make_config(0.5, 1), {{1, 1.0}});
  Peer::place_set(eng, 1, 1);
  const ElemSlot e =
      Peer::place_element(eng, 10, {1}, ElementStatus::kPassive, 1, 5);
  Peer::add_weight(eng, 1, 0.6);
  Peer::open_rebuild(eng, 2);
  Peer::handle_det(eng, e);
  Peer::close_rebuild(eng);
  EXPECT_EQ(level_of(eng, 1), 3);
  EXPECT_EQ(eng.element(e).zlev, 3);
}

TEST(EngineHandleDet, AllSlackReachesDecILev) {
  Engine eng(make_config(0.5, 1), {{1, 1.0}});
  const ElemSlot e =
      Peer::place_element(eng, 10, {1}, ElementStatus::kPassive, 0, 4);
  Peer::open_rebuild(eng, 0);
  Peer::handle_det(eng, e);
  Peer::close_rebuild(eng);
  EXPECT_EQ(eng.stats().dec_ilev_calls, 1u);
}

TEST(EngineRebuild, ClearsDeadWeightWithoutElements) {
  Engine eng(make_config(0.5, 1), {{1, 1.0}});
  Peer::place_set(eng, 1, 0, 0.9);
  ASSERT_TRUE(eng.set_tight(0));
  ASSERT_EQ(Peer::find_rebuild_k(eng), std::optional<Level>(0));
  Peer::rebuild(eng, 0);
  EXPECT_DOUBLE_EQ(eng.set_phi(0), 0.0);
  EXPECT_EQ(eng.set_level(0), 0);
  EXPECT_TRUE(eng.query_cover().empty());
  expect_clean_audit(eng);
}

TEST(EngineRebuild, DirtyElementGapShrinks) {
  Engine eng(make_config(0.5, 1), {{1, 1.0}});
  const ElemSlot e =
      Peer::place_element(eng, 10, {1}, ElementStatus::kPassive, 0, 4);
  const Level gap_before = eng.element(e).ilev - eng.element(e).zlev;
  Peer::rebuild(eng, 0);
  const ElementState& el = eng.element(e);
  const Level gap_after =
      el.status == ElementStatus::kActive ? 0 : el.ilev - el.zlev;
  EXPECT_LT(gap_after, gap_before);
  EXPECT_LE(el.ilev, 4);
  expect_clean_audit(eng);
}

TEST(EngineRebuild, CleanElementEndsActiveAfterWaterFilling) {
  Engine eng(make_config(0.5, 1), {{1, 1.0}});
  const ElemSlot e =
      Peer::place_element(eng, 10, {1}, ElementStatus::kPassive, 0, 1);
  Peer::rebuild(eng, 0);
  const ElementState& el = eng.element(e);
  EXPECT_EQ(el.status, ElementStatus::kActive);
  EXPECT_EQ(el.ilev, eng.element_level(e));
  EXPECT_EQ(eng.stats().water_filling_calls, 0u);
  expect_clean_audit(eng);
}

TEST(EngineErrors, RejectedUpdatesLeaveStateUnchanged) {
  Engine eng(make_config(0.5, 2, 2, 2), {{1, 1.0}, {2, 1.0}, {3, 0.5}});
  eng.insert(1, std::vector<SetId>{1, 2});
  eng.insert(2, std::vector<SetId>{3});
  const auto cover = eng.query_cover();
  const auto inserts = eng.stats().inserts;
  auto expect_kind = [&](const Update& u, UpdateErrorKind kind) {
    try {
      eng.apply_update(u);
      ADD_FAILURE() << "update accepted";
    } catch (const UpdateError& err) {
      EXPECT_EQ(err.kind(), kind) << err.what();
    }
  };
  expect_kind(Update::erase(99), UpdateErrorKind::kUnknownElement);
  expect_kind(Update::insert(1, {3}), UpdateErrorKind::kDuplicateElement);
  expect_kind(Update::insert(5, {1, 2, 3}), UpdateErrorKind::kFrequencyExceeded);
  expect_kind(Update::insert(5, {9}), UpdateErrorKind::kUnknownSet);
  expect_kind(Update::insert(5, {1, 1}), UpdateErrorKind::kInvalidMembers);
  expect_kind(Update::insert(5, {}), UpdateErrorKind::kInvalidMembers);
  expect_kind(Update::insert(5, {3}), UpdateErrorKind::kCapacityExceeded);
  EXPECT_EQ(eng.query_cover(), cover);
  EXPECT_EQ(eng.stats().inserts, inserts);
  EXPECT_EQ(eng.live_count(), 2u);
  expect_clean_audit(eng);
  // Capacity frees up after a delete.
  eng.erase(2);
  EXPECT_NO_THROW(eng.insert(5, std::vector<SetId>{3}));
}

class CountingObserver : public EngineObserver {
 public:
  int begins = 0, prims = 0, ends = 0, rebuild_begins = 0, rebuild_ends = 0;
  void on_update_begin(const Engine&, const Update&) override { ++begins; }
  void on_primitive_done(const Engine&, const Update&) override { ++prims; }
  void on_update_end(const Engine&, const Update&) override { ++ends; }
  void on_rebuild_begin(const Engine&, Level, std::span<const ElemSlot>) override {
    ++rebuild_begins;
  }
  void on_rebuild_end(const Engine&, Level, std::span<const ElemSlot>) override {
    ++rebuild_ends;
  }
};

TEST(EngineObserverHooks, CalledOncePerStage) {
  Engine eng(make_config(0.5, 1), {{7, 1.0}});
  CountingObserver obs;
  eng.set_observer(&obs);
  eng.insert(1, std::vector<SetId>{7});
  eng.erase(1);
  EXPECT_EQ(obs.begins, 2);
  EXPECT_EQ(obs.prims, 2);
  EXPECT_EQ(obs.ends, 2);
  EXPECT_EQ(obs.rebuild_begins, 1);
  EXPECT_EQ(obs.rebuild_ends, 1);
  // Rejected updates never reach the hooks.
  EXPECT_THROW(eng.erase(1), UpdateError);
  EXPECT_EQ(obs.begins, 2);
}

}  // namespace
}  // namespace dsc
