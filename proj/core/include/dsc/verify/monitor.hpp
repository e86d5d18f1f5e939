#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dsc/engine.hpp"
#include "dsc/verify/potentials.hpp"

namespace dsc::verify {

// Observer that checks per-call contracts: dirty-element gap decrease and
// lifetime rebuild count, the eta schedule, the water-filling postconditions
// and the potential bookkeeping around deletions.
class ContractMonitor : public EngineObserver {
 public:
  struct Options {
    bool gaps = true;
    bool water_filling = true;
    bool potentials = true;
  };

  struct Counters {
    std::uint64_t dirty_checked = 0;
    std::uint64_t rebuilds_seen = 0;
    std::uint64_t water_filling_checked = 0;
    std::uint64_t deletions_checked = 0;
    std::uint64_t quiescent_checked = 0;
    std::uint64_t eta_events = 0;
    std::uint64_t max_rebuilds_per_element = 0;
  };

  ContractMonitor() = default;
  explicit ContractMonitor(Options opts) : opts_(opts) {}

  void on_update_begin(const Engine&, const Update&) override;
  void on_primitive_done(const Engine&, const Update&) override;
  void on_update_end(const Engine&, const Update&) override;
  void on_rebuild_begin(const Engine&, Level k,
                        std::span<const ElemSlot> dirty) override;
  void on_rebuild_end(const Engine&, Level k,
                      std::span<const ElemSlot> dirty) override;
  void on_water_filling_done(const Engine&, Level k_hat,
                             std::span<const SetIndex> sets,
                             std::span<const ElemSlot> elems) override;
  void on_rand_branch(const Engine&, ElemSlot e, RandBranch branch,
                      int eta) override;

  // Violations by category: "gap", "rebuild_count", "eta", "water_filling",
  // "potential_sign", "deletion_bound".
  std::uint64_t violations(const std::string& category) const;
  static const std::vector<std::string>& categories();
  std::uint64_t total_violations() const;
  const std::vector<std::string>& messages() const { return messages_; }
  const Counters& counters() const { return counters_; }

 private:
  void fail(const std::string& category, std::string message);

  struct Pending {
    ElemSlot slot;
    ElementId id;
    Level gap;
  };

  Options opts_;
  Counters counters_;
  std::unordered_map<std::string, std::uint64_t> violations_;
  std::vector<std::string> messages_;
  std::vector<Pending> pending_;
  std::unordered_map<ElementId, std::uint64_t> rebuilds_per_element_;
  std::unordered_map<ElementId, int> last_eta_;
  std::optional<PotentialSnapshot> before_delete_;
};

}  // namespace dsc::verify
