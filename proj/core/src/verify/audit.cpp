#include "dsc/verify/audit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace dsc::verify {
namespace {

constexpr std::size_t kMaxOffenders = 8;

class Recorder {
 public:
  explicit Recorder(AuditReport& report) : report_(report) {}

  // Registers a check so that passing checks also appear in the report.
  void declare(const std::string& name) { slot(name); }

  void fail(const std::string& name, const std::string& who,
            const std::string& what) {
    CheckResult& c = report_.checks[slot(name)];
    c.passed = false;
    ++c.failures;
    if (c.offenders.size() < kMaxOffenders) c.offenders.push_back(who);
    if (c.detail.empty()) c.detail = who + ": " + what;
  }

 private:
  std::size_t slot(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    CheckResult fresh;
    fresh.name = name;
    report_.checks.push_back(std::move(fresh));
    index_.emplace(name, report_.checks.size() - 1);
    return report_.checks.size() - 1;
  }

  AuditReport& report_;
  std::unordered_map<std::string, std::size_t> index_;
};

std::string set_name(const Engine& eng, SetIndex s) {
  return "set:" + std::to_string(eng.set_static(s).id);
}

std::string elem_name(const Engine& eng, ElemSlot e) {
  return "elem:" + std::to_string(eng.element(e).id);
}

std::string fmt(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

bool close(double maintained, double recomputed, std::size_t terms) {
  const double tol =
      kRelTolerance * (1.0 + static_cast<double>(terms)) *
      std::max(1.0, std::fabs(recomputed));
  return std::fabs(maintained - recomputed) <= tol;
}

const char* const kCheckNames[] = {
    "element_legality",   "bucket_consistency", "weight_drift",
    "tightness_cache",    "frontier_weight",      "tight_above_zero",
    "dead_weight_budget",   "weight_cap",         "cover_valid",
    "level_range",        "level_aggregates",   "level_registry",
    "occupancy",          "running_totals",
};

}  // namespace

bool AuditReport::ok() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

const CheckResult* AuditReport::find(const std::string& name) const {
  for (const CheckResult& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string AuditReport::failure_summary() const {
  std::string out;
  for (const CheckResult& c : checks) {
    if (c.passed) continue;
    out += c.name + " (" + std::to_string(c.failures) + "): " + c.detail + "\n";
  }
  return out;
}

nlohmann::json AuditReport::to_json() const {
  nlohmann::json j;
  j["ok"] = ok();
  j["max_drift"] = max_drift;
  j["cover_valid"] = cover_valid;
  j["ratio"] = ratio ? nlohmann::json(*ratio) : nlohmann::json(nullptr);
  auto& arr = j["checks"] = nlohmann::json::array();
  for (const CheckResult& c : checks) {
    arr.push_back({{"name", c.name},
                   {"passed", c.passed},
                   {"failures", c.failures},
                   {"offenders", c.offenders},
                   {"detail", c.detail}});
  }
  return j;
}

double weight_at_level(const Engine& engine, SetIndex s, Level i) {
  const PowerTable& pow = engine.powers();
  const SetState& st = engine.set_state(s);
  double w = 0;
  auto add = [&](const std::vector<std::vector<BucketEntry>>& buckets) {
    for (const auto& bucket : buckets) {
      for (const BucketEntry& b : bucket) {
        w += pow[std::max(engine.element(b.elem).ilev, i)];
      }
    }
  };
  add(st.active);
  add(st.passive);
  return w;
}

AuditReport audit(const Engine& eng) {
  AuditReport report;
  Recorder rec(report);
  for (const char* name : kCheckNames) rec.declare(name);

  const Config& cfg = eng.config();
  const PowerTable& pow = eng.powers();
  const Geometry& geo = eng.geometry();
  const LevelIndex& index = eng.index();
  const std::size_t m = eng.set_count();
  const Level top = index.top_level();

  struct SetScratch {
    Level lev = 0;
    double phi = 0;
    TightClass cls = TightClass::kSlack;
    double omega_here = 0;  // recomputed weight at lev
    double omega_up = 0;    // recomputed weight at lev + 1
    std::uint32_t members = 0;
  };
  std::vector<SetScratch> sc(m);
  for (SetIndex s = 0; s < m; ++s) {
    const SetState& st = eng.set_state(s);
    auto eff = index.effective(st);
    sc[s].lev = eff.lev;
    sc[s].phi = eff.phi;
    sc[s].cls = index.effective_class(st, eng.set_static(s).tight_threshold);
    if (eff.lev < 0 || eff.lev > geo.max_level || st.lev > top) {
      rec.fail("level_range", set_name(eng, s),
               "level " + std::to_string(eff.lev));
    }
  }

  // Elements: legality, bucket links, recomputed weights.
  std::vector<double> elem_count(static_cast<std::size_t>(top) + 1, 0);
  std::vector<double> elem_weight(static_cast<std::size_t>(top) + 1, 0);
  double universe_weight = 0;
  std::size_t live_seen = 0;
  for (ElemSlot e = 0; e < eng.slot_capacity(); ++e) {
    const ElementState& el = eng.element(e);
    if (!el.live) continue;
    ++live_seen;
    const std::string who = elem_name(eng, e);
    auto members = eng.members(e);
    Level lev_e = 0;
    bool covered = false;
    for (SetIndex s : members) {
      lev_e = std::max(lev_e, sc[s].lev);
      covered = covered || is_tight_class(sc[s].cls);
    }
    if (!covered) {
      report.cover_valid = false;
      rec.fail("cover_valid", who, "no tight member set");
    }
    if (el.status == ElementStatus::kActive) {
      if (!(el.ilev == el.zlev && el.zlev == lev_e)) {
        rec.fail("element_legality", who,
                 "active with ilev " + std::to_string(el.ilev) + " zlev " +
                     std::to_string(el.zlev) + " lev " +
                     std::to_string(lev_e));
      }
    } else if (!(el.zlev <= lev_e && lev_e < el.ilev &&
                 el.ilev <= el.zlev + geo.gap_bound)) {
      rec.fail("element_legality", who,
               "passive with ilev " + std::to_string(el.ilev) + " zlev " +
                   std::to_string(el.zlev) + " lev " + std::to_string(lev_e));
    }
    if (el.zlev < 0 || el.zlev > top || el.ilev > pow.max_index()) {
      rec.fail("level_range", who, "zlev/ilev out of range");
      continue;
    }
    const double w = pow[el.ilev];
    universe_weight += w;
    elem_count[static_cast<std::size_t>(el.zlev)] += 1;
    elem_weight[static_cast<std::size_t>(el.zlev)] += w;
    for (std::uint32_t j = 0; j < members.size(); ++j) {
      const SetIndex s = members[j];
      const SetState& st = eng.set_state(s);
      const auto& buckets =
          el.status == ElementStatus::kActive ? st.active : st.passive;
      const auto pos = eng.bucket_position(e, j);
      const auto lvl = static_cast<std::size_t>(el.ilev);
      if (lvl >= buckets.size() || pos >= buckets[lvl].size() ||
          buckets[lvl][pos].elem != e || buckets[lvl][pos].member != j) {
        rec.fail("bucket_consistency", who,
                 "missing from bucket of " + set_name(eng, s));
      }
      sc[s].members += 1;
      sc[s].omega_here += pow[std::max(el.ilev, sc[s].lev)];
      sc[s].omega_up += pow[std::max(el.ilev, sc[s].lev + 1)];
    }
  }

  // Sets.
  std::vector<std::uint32_t> set_count(static_cast<std::size_t>(top + 1) * 3);
  std::vector<double> set_cost(set_count.size(), 0);
  std::vector<double> level_phi(static_cast<std::size_t>(top) + 1, 0);
  std::vector<std::uint32_t> level_sets(static_cast<std::size_t>(top) + 1);
  double phi_sum = 0;
  double tight_cost = 0;
  for (SetIndex s = 0; s < m; ++s) {
    const SetStatic& info = eng.set_static(s);
    const SetState& st = eng.set_state(s);
    const SetScratch& x = sc[s];
    const std::string who = set_name(eng, s);

    std::uint32_t in_buckets = 0;
    auto check_buckets = [&](const std::vector<std::vector<BucketEntry>>& bs,
                             ElementStatus status) {
      for (std::size_t lvl = 0; lvl < bs.size(); ++lvl) {
        for (std::size_t pos = 0; pos < bs[lvl].size(); ++pos) {
          ++in_buckets;
          const BucketEntry& b = bs[lvl][pos];
          if (b.elem >= eng.slot_capacity()) {
            rec.fail("bucket_consistency", who, "bucket entry out of range");
            continue;
          }
          const ElementState& el = eng.element(b.elem);
          auto members = eng.members(b.elem);
          if (!el.live || el.status != status ||
              static_cast<std::size_t>(el.ilev) != lvl ||
              b.member >= members.size() || members[b.member] != s ||
              eng.bucket_position(b.elem, b.member) != pos) {
            rec.fail("bucket_consistency", who,
                     "stale bucket entry for " + elem_name(eng, b.elem));
          }
        }
      }
    };
    check_buckets(st.active, ElementStatus::kActive);
    check_buckets(st.passive, ElementStatus::kPassive);
    if (in_buckets != x.members || st.live_members != x.members) {
      rec.fail("bucket_consistency", who,
               "member count " + std::to_string(x.members) + " buckets " +
                   std::to_string(in_buckets) + " recorded " +
                   std::to_string(st.live_members));
    }

    const double scale = std::max(x.omega_here, info.cost);
    const double drift = std::fabs(st.omega - x.omega_here) / scale;
    report.max_drift = std::max(report.max_drift, drift);
    const double tol = kRelTolerance * (1.0 + x.members);
    if (drift > tol) {
      rec.fail("weight_drift", who,
               "maintained " + fmt(st.omega) + " recomputed " +
                   fmt(x.omega_here));
    }
    const std::size_t frontier =
        static_cast<std::size_t>(x.lev) < st.active.size()
            ? st.active[static_cast<std::size_t>(x.lev)].size()
            : 0;
    const double up = weight_one_up(st.omega, frontier, x.lev, pow);
    if (std::fabs(up - x.omega_up) / scale > tol) {
      rec.fail("weight_drift", who,
               "one level up " + fmt(up) + " recomputed " + fmt(x.omega_up));
    }
    if (!(up < info.cost)) {
      rec.fail("frontier_weight", who,
               "weight one level up " + fmt(up) + " cost " + fmt(info.cost));
    }
    if (x.cls != classify(st.omega, x.phi, info.tight_threshold)) {
      rec.fail("tightness_cache", who, "cached class disagrees");
    }
    const bool tight = is_tight_class(x.cls);
    if (x.lev >= 1 && !tight) {
      rec.fail("tight_above_zero", who,
               "slack at level " + std::to_string(x.lev));
    }
    if (!(st.omega < (1.0 + cfg.epsilon) * info.cost)) {
      rec.fail("weight_cap", who, "weight " + fmt(st.omega));
    }

    phi_sum += x.phi;
    if (tight) tight_cost += info.cost;
    if (x.lev >= 0 && x.lev <= top) {
      const auto lv = static_cast<std::size_t>(x.lev);
      const std::size_t slot = lv * 3 + static_cast<std::size_t>(x.cls);
      set_count[slot] += 1;
      set_cost[slot] += info.cost;
      level_phi[lv] += x.phi;
      level_sets[lv] += 1;
    }
  }

  const double freq = cfg.max_frequency;
  const double dead_bound =
      cfg.epsilon * (tight_cost + freq * universe_weight) +
      kAbsTolerance * (1.0 + static_cast<double>(m));
  if (!(phi_sum <= dead_bound)) {
    rec.fail("dead_weight_budget", "global",
             "dead weight " + fmt(phi_sum) + " exceeds " + fmt(dead_bound));
  }

  // Level-index aggregates and bitset.
  double agg_phi = 0;
  double agg_tight = 0;
  double agg_weight = 0;
  for (Level i = 0; i <= top; ++i) {
    const auto lv = static_cast<std::size_t>(i);
    const auto& a = index.level(i);
    const std::string who = "level:" + std::to_string(i);
    for (std::size_t c = 0; c < 3; ++c) {
      if (a.set_count[c] != set_count[lv * 3 + c] ||
          !close(a.set_cost[c], set_cost[lv * 3 + c], a.set_count[c])) {
        rec.fail("level_aggregates", who,
                 "class " + std::to_string(c) + " count " +
                     std::to_string(a.set_count[c]) + " expected " +
                     std::to_string(set_count[lv * 3 + c]));
      }
    }
    if (!close(a.phi, level_phi[lv], level_sets[lv])) {
      rec.fail("level_aggregates", who,
               "dead weight " + fmt(a.phi) + " expected " + fmt(level_phi[lv]));
    }
    if (a.elem_count != elem_count[lv] ||
        !close(a.elem_weight, elem_weight[lv], a.elem_count)) {
      rec.fail("level_aggregates", who, "element aggregate mismatch");
    }
    const bool occupied =
        set_count[lv * 3 + 1] + set_count[lv * 3 + 2] > 0 || elem_count[lv] > 0;
    if (index.occupied(i) != occupied) {
      rec.fail("occupancy", who, "occupancy bit disagrees");
    }
    agg_phi += a.phi;
    agg_tight += a.tight_cost();
    agg_weight += a.elem_weight;
  }
  const auto& totals = index.totals();
  if (!close(totals.phi, phi_sum, m) || !close(totals.tight_cost, tight_cost, m) ||
      !close(totals.elem_weight, universe_weight, live_seen) ||
      !close(agg_phi, phi_sum, m)) {
    rec.fail("running_totals", "global",
             "totals phi " + fmt(totals.phi) + " tight " +
                 fmt(totals.tight_cost) + " weight " +
                 fmt(totals.elem_weight));
  }

  // Registry lists: every set exactly once, under its effective level/class.
  std::vector<char> seen(m, 0);
  std::size_t listed = 0;
  for (Level i = 0; i <= top; ++i) {
    for (auto cls : {TightClass::kSlack, TightClass::kByDeadWeight,
                     TightClass::kByWeight}) {
      index.for_each_set(i, cls, [&](std::uint32_t s) {
        ++listed;
        if (s >= m || seen[s]) {
          rec.fail("level_registry", "level:" + std::to_string(i),
                   "duplicate or foreign node");
          return;
        }
        seen[s] = 1;
        if (sc[s].lev != i || sc[s].cls != cls) {
          rec.fail("level_registry", set_name(eng, s),
                   "listed at level " + std::to_string(i) + " effective " +
                       std::to_string(sc[s].lev));
        }
      });
    }
  }
  if (listed != m) {
    rec.fail("level_registry", "global",
             "listed " + std::to_string(listed) + " of " + std::to_string(m));
  }
  std::size_t elems_listed = 0;
  for (Level i = 0; i <= top; ++i) {
    for (ElemSlot e : index.elements_at(i)) {
      ++elems_listed;
      if (e >= eng.slot_capacity() || !eng.element(e).live ||
          eng.element(e).zlev != i) {
        rec.fail("level_registry", "level:" + std::to_string(i),
                 "element list entry is stale");
      }
    }
  }
  if (elems_listed != live_seen || live_seen != eng.live_count()) {
    rec.fail("level_registry", "global",
             "element lists hold " + std::to_string(elems_listed) + " of " +
                 std::to_string(live_seen));
  }
  return report;
}

}  // namespace dsc::verify
