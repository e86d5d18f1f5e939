#include "dsc/verify/monitor.hpp"

#include <algorithm>

namespace dsc::verify {
namespace {

constexpr std::size_t kMaxMessages = 64;

Level gap_of(const ElementState& el) {
  return el.status == ElementStatus::kActive ? 0 : el.ilev - el.zlev;
}

}  // namespace

void ContractMonitor::fail(const std::string& category, std::string message) {
  ++violations_[category];
  if (messages_.size() < kMaxMessages) {
    messages_.push_back(category + ": " + std::move(message));
  }
}

const std::vector<std::string>& ContractMonitor::categories() {
  static const std::vector<std::string> names = {
      "gap", "rebuild_count", "eta", "water_filling", "potential_sign",
      "deletion_bound"};
  return names;
}

std::uint64_t ContractMonitor::violations(const std::string& category) const {
  auto it = violations_.find(category);
  return it == violations_.end() ? 0 : it->second;
}

std::uint64_t ContractMonitor::total_violations() const {
  std::uint64_t n = 0;
  for (const auto& [name, count] : violations_) n += count;
  return n;
}

void ContractMonitor::on_update_begin(const Engine& engine, const Update& u) {
  before_delete_.reset();
  if (opts_.potentials && u.kind == Update::Kind::kDelete) {
    before_delete_ = potentials(engine);
  }
}

void ContractMonitor::on_primitive_done(const Engine& engine, const Update& u) {
  if (!before_delete_) return;
  const PotentialSnapshot after = potentials(engine);
  ++counters_.deletions_checked;
  BoundCheck check =
      deletion_potential_bound_check(engine.config(), *before_delete_, after);
  if (!check.ok) {
    fail("deletion_bound",
         "delete of " + std::to_string(u.elem) + ": " + check.detail);
  }
  before_delete_.reset();
}

void ContractMonitor::on_update_end(const Engine& engine, const Update& u) {
  if (u.kind == Update::Kind::kDelete) {
    rebuilds_per_element_.erase(u.elem);
    last_eta_.erase(u.elem);
  }
  if (!opts_.potentials) return;
  const PotentialSnapshot p = potentials(engine);
  ++counters_.quiescent_checked;
  if (p.up < 0 || p.down < 0 || p.lift < 0 || p.passive < 0 || p.clean < 0) {
    fail("potential_sign", "negative potential after update of " +
                               std::to_string(u.elem));
  }
}

void ContractMonitor::on_rebuild_begin(const Engine& engine, Level,
                                       std::span<const ElemSlot> dirty) {
  ++counters_.rebuilds_seen;
  pending_.clear();
  if (!opts_.gaps) return;
  for (ElemSlot e : dirty) {
    const ElementState& el = engine.element(e);
    pending_.push_back({e, el.id, gap_of(el)});
  }
}

void ContractMonitor::on_rebuild_end(const Engine& engine, Level k,
                                     std::span<const ElemSlot>) {
  const Level bound = engine.geometry().gap_bound;
  for (const Pending& p : pending_) {
    ++counters_.dirty_checked;
    const ElementState& el = engine.element(p.slot);
    const Level gap = gap_of(el);
    if (!(gap < p.gap)) {
      fail("gap", "element " + std::to_string(p.id) + " in rebuild at level " +
                      std::to_string(k) + ": gap " + std::to_string(p.gap) +
                      " -> " + std::to_string(gap));
    }
    const std::uint64_t n = ++rebuilds_per_element_[p.id];
    counters_.max_rebuilds_per_element =
        std::max(counters_.max_rebuilds_per_element, n);
    if (n > static_cast<std::uint64_t>(bound)) {
      fail("rebuild_count", "element " + std::to_string(p.id) + " dirty " +
                                std::to_string(n) + " times");
    }
  }
  pending_.clear();
}

void ContractMonitor::on_water_filling_done(const Engine& engine, Level k_hat,
                                            std::span<const SetIndex> sets,
                                            std::span<const ElemSlot> elems) {
  if (!opts_.water_filling) return;
  ++counters_.water_filling_checked;
  for (SetIndex s : sets) {
    const SetStatic& info = engine.set_static(s);
    const double omega = engine.set_state(s).omega;
    const Level lev = engine.set_level(s);
    const std::string who = "set " + std::to_string(info.id) + " (k_hat " +
                            std::to_string(k_hat) + ")";
    if (!(omega < info.cost)) fail("water_filling", who + ": weight >= cost");
    if (engine.set_phi(s) != 0) fail("water_filling", who + ": dead weight");
    if (lev > k_hat) fail("water_filling", who + ": above k_hat");
    if (lev > 0 && !(omega >= info.tight_threshold)) {
      fail("water_filling", who + ": slack above level 0");
    }
  }
  for (ElemSlot e : elems) {
    const ElementState& el = engine.element(e);
    if (el.status != ElementStatus::kActive || el.ilev != el.zlev ||
        el.zlev != engine.element_level(e)) {
      fail("water_filling",
           "element " + std::to_string(el.id) + " left inconsistent");
    }
  }
}

void ContractMonitor::on_rand_branch(const Engine& engine, ElemSlot e,
                                     RandBranch branch, int eta) {
  if (branch != RandBranch::kFhatEmpty && branch != RandBranch::kFhatSmall) {
    return;
  }
  ++counters_.eta_events;
  const ElementId id = engine.element(e).id;
  auto it = last_eta_.find(id);
  if (it != last_eta_.end() && eta <= it->second) {
    fail("eta", "element " + std::to_string(id) + " eta " +
                    std::to_string(it->second) + " -> " + std::to_string(eta));
  }
  last_eta_[id] = eta;
}

}  // namespace dsc::verify
