#include "dsc/verify/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dsc/verify/audit.hpp"

namespace dsc::verify {
namespace {

double log2_cost_ratio(const Config& cfg) {
  return std::log2(static_cast<double>(cfg.cost_ratio));
}

}  // namespace

double up_coefficient(const Config& cfg, const PowerTable& pow, Level i) {
  const double eps = cfg.epsilon;
  return 2.0 * cfg.max_frequency *
         (3.0 / (eps * eps * eps) + log2_cost_ratio(cfg) / (eps * eps)) *
         pow.growth(i + 1);
}

double down_coefficient(const Config& cfg, const PowerTable& pow, Level i) {
  const double eps = cfg.epsilon;
  return 2.0 / (eps * eps) * pow.growth(i + 1);
}

double clean_unit(const Config& cfg) {
  const double eps = cfg.epsilon;
  return 1.0 / (eps * eps) + log2_cost_ratio(cfg) / eps;
}

PotentialSnapshot potentials(const Engine& engine) {
  const Config& cfg = engine.config();
  const PowerTable& pow = engine.powers();
  const double top = engine.geometry().max_level;
  PotentialSnapshot p;
  std::size_t dirty_sets = 0;
  for (SetIndex s = 0; s < engine.set_count(); ++s) {
    const SetStatic& info = engine.set_static(s);
    const double omega = engine.set_state(s).omega;
    const Level lev = engine.set_level(s);
    const double phi = engine.set_phi(s);
    p.up += std::max(omega - info.cost, 0.0) * up_coefficient(cfg, pow, lev);
    p.down += phi * down_coefficient(cfg, pow, lev);
    p.lift += top - std::max(lev, info.base);
    if (phi != 0) ++dirty_sets;
  }
  std::size_t passive = 0;
  for (ElemSlot e = 0; e < engine.slot_capacity(); ++e) {
    const ElementState& el = engine.element(e);
    if (el.live && el.status == ElementStatus::kPassive) ++passive;
  }
  p.passive = static_cast<double>(cfg.max_frequency) *
              static_cast<double>(passive);
  p.clean = clean_unit(cfg) * static_cast<double>(dirty_sets);
  p.total = p.up + p.down + p.lift + p.passive + p.clean;
  return p;
}

double deletion_bound(const Config& cfg) {
  const double eps = cfg.epsilon;
  return cfg.max_frequency *
         (2.0 * (1.0 + eps) / (eps * eps) + clean_unit(cfg));
}

BoundCheck deletion_potential_bound_check(const Config& cfg,
                                          const PotentialSnapshot& before,
                                          const PotentialSnapshot& after) {
  BoundCheck out;
  std::ostringstream why;
  auto require = [&](bool cond, const char* what, double delta) {
    if (cond) return;
    out.ok = false;
    why << what << " changed by " << delta << "; ";
  };
  const double d_up = after.up - before.up;
  const double d_lift = after.lift - before.lift;
  const double d_passive = after.passive - before.passive;
  const double d_dirty = (after.down + after.clean) - (before.down + before.clean);
  require(d_up <= kAbsTolerance, "up potential", d_up);
  require(d_lift == 0, "lift potential", d_lift);
  require(d_passive <= 0, "passive potential", d_passive);
  require(d_dirty <= deletion_bound(cfg) + kAbsTolerance,
          "down + clean potential", d_dirty);
  out.detail = why.str();
  return out;
}

}  // namespace dsc::verify
