#include <algorithm>
#include <chrono>

#include "dsc/engine.hpp"
#include "dsc/errors.hpp"
#include "dsc/water_filling.hpp"

namespace dsc {

namespace {

class ScopedTimer {
 public:
  ScopedTimer(bool on, std::uint64_t& sink) : on_(on), sink_(sink) {
    if (on_) start_ = std::chrono::steady_clock::now();
  }
  ~ScopedTimer() {
    if (!on_) return;
    auto dt = std::chrono::steady_clock::now() - start_;
    sink_ += static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(dt).count());
  }

 private:
  bool on_;
  std::uint64_t& sink_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

// Puts s at level max(k+1, lev(s)) and records it as touched by the rebuild.
void Engine::raise_into_rebuild(SetIndex s) {
  SetState& st = touch(s);
  if (st.lev < rb_k_ + 1) write_level(s, rb_k_ + 1);
  if (rb_set_mark_[s] != rb_epoch_) {
    rb_set_mark_[s] = rb_epoch_;
    rb_sets_.push_back(s);
  }
}

void Engine::rebuild(Level k) {
  ScopedTimer timer(profiling_, stats_.ns_rebuild);
  ++stats_.rebuilds;
  stats_.max_rebuild_k = std::max(stats_.max_rebuild_k, k);
  stats_.rebuild_k_histogram[static_cast<std::size_t>(k)] += 1;
  rb_k_ = k;
  ++rb_epoch_;
  rb_clean_.clear();
  rb_dirty_.clear();
  rb_promoted_.clear();
  rb_sets_.clear();

  for (std::optional<Level> i = 0; i && *i <= k;) {
    for (ElemSlot e : index_.elements_at(*i)) {
      (elems_[e].ilev <= k + 1 ? rb_clean_ : rb_dirty_).push_back(e);
    }
    if (*i < index_.low_cutoff()) {
      i = *i + 1;
    } else {
      i = index_.next_occupied(*i);
    }
  }
  if (observer_) observer_->on_rebuild_begin(*this, k, rb_dirty_);

  zero_levels(0, k);

  const Level up = k + 1;
  for (ElemSlot e : rb_clean_) {
    ElementState& el = elems_[e];
    const std::uint32_t deg = el.degree;
    const double w_old = pow_[el.ilev];
    for (std::uint32_t j = 0; j < deg; ++j) {
      const SetIndex s = members_[flat(e, j)];
      raise_into_rebuild(s);
      DSC_CHECK(sets_[s].lev == up);
      bucket_remove(e, j);
    }
    set_ilev(e, up);
    set_zlev(e, up);
    el.status = ElementStatus::kActive;
    for (std::uint32_t j = 0; j < deg; ++j) {
      const SetIndex s = members_[flat(e, j)];
      write_omega(s, sets_[s].omega - w_old + pow_[up]);
      bucket_add(e, j);
    }
  }

  for (ElemSlot e : rb_dirty_) {
    ++stats_.dirty_processed;
    if (cfg_.deterministic) {
      handle_det(e);
    } else if (elems_[e].status == ElementStatus::kPassive) {
      handle_rand(e);
    }
  }

  // Post-processing.
  rb_hat_elems_.clear();
  rb_hat_sets_.clear();
  auto covered = [&](ElemSlot e) {
    for (SetIndex s : members(e)) {
      if (is_tight_class(touch(s).tight)) return true;
    }
    return false;
  };
  for (ElemSlot e : rb_clean_) {
    if (!covered(e)) rb_hat_elems_.push_back(e);
  }
  for (ElemSlot e : rb_promoted_) {
    if (!covered(e)) rb_hat_elems_.push_back(e);
  }
  for (SetIndex s : rb_sets_) {
    if (!is_tight_class(touch(s).tight)) write_level(s, 0);
  }
  for (ElemSlot e : rb_hat_elems_) {
    for (SetIndex s : members(e)) {
      if (rb_hat_mark_[s] == rb_epoch_) continue;
      rb_hat_mark_[s] = rb_epoch_;
      rb_hat_index_[s] = static_cast<std::uint32_t>(rb_hat_sets_.size());
      rb_hat_sets_.push_back(s);
    }
  }
  if (!rb_hat_elems_.empty()) {
    const double span = 2.0 * static_cast<double>(cfg_.cost_ratio) *
                        static_cast<double>(rb_hat_elems_.size()) /
                        cfg_.epsilon;
    const Level k_hat = std::min<Level>(up, pow_.ceil_log(span));
    water_filling(k_hat);
  }
  if (observer_) observer_->on_rebuild_end(*this, k, rb_dirty_);
  rb_k_ = -1;
}

void Engine::handle_det(ElemSlot e) {
  ++stats_.dirty_det;
  ElementState& el = elems_[e];
  DSC_CHECK(el.status == ElementStatus::kPassive);
  for (SetIndex s : members(e)) {
    if (is_tight_class(touch(s).tight)) {
      raise_into_rebuild(s);
      set_zlev(e, sets_[s].lev);
      return;
    }
  }
  dec_ilev(e);
}

void Engine::dec_ilev(ElemSlot e) {
  ++stats_.dec_ilev_calls;
  ElementState& el = elems_[e];
  const std::uint32_t deg = el.degree;
  auto mem = members(e);
  const Level up = rb_k_ + 1;
  Level lb = up;
  for (SetIndex s : mem) lb = std::max(lb, touch(s).lev);
  DSC_CHECK(lb <= el.ilev);
  const double w = pow_[el.ilev];

  auto fits = [&](Level h) {
    for (SetIndex s : mem) {
      if (!(sets_[s].omega - w + pow_[h] < statics_[s].cost)) return false;
    }
    return true;
  };
  SetIndex closest = mem[0];
  for (SetIndex s : mem) {
    if (statics_[s].cost - (sets_[s].omega - w) <
        statics_[closest].cost - (sets_[closest].omega - w)) {
      closest = s;
    }
  }
  Level a = lb;
  Level b = el.ilev;
  while (a < b) {
    Level mid = a + (b - a) / 2;
    if (sets_[closest].omega - w + pow_[mid] < statics_[closest].cost) {
      b = mid;
    } else {
      a = mid + 1;
    }
  }
  Level h = a;
  while (h < el.ilev && !fits(h)) ++h;

  for (std::uint32_t j = 0; j < deg; ++j) bucket_remove(e, j);
  for (SetIndex s : mem) write_omega(s, sets_[s].omega - w + pow_[h]);
  set_ilev(e, h);

  bool any_tight = false;
  for (SetIndex s : mem) {
    if (is_tight_class(sets_[s].tight)) {
      any_tight = true;
      break;
    }
  }
  if (!any_tight) {
    DSC_CHECK(lb == up);
    DSC_CHECK(h == up);
    rb_promoted_.push_back(e);
    for (SetIndex s : mem) {
      DSC_CHECK(sets_[s].lev <= up);
      raise_into_rebuild(s);
    }
    set_zlev(e, up);
  } else {
    for (SetIndex s : mem) {
      if (is_tight_class(sets_[s].tight)) {
        raise_into_rebuild(s);
        break;
      }
    }
    Level top = 0;
    for (SetIndex s : mem) top = std::max(top, sets_[s].lev);
    set_zlev(e, top);
  }
  el.status = h == el.zlev ? ElementStatus::kActive : ElementStatus::kPassive;
  for (std::uint32_t j = 0; j < deg; ++j) bucket_add(e, j);
}

void Engine::handle_rand(ElemSlot e) {
  ElementState& el = elems_[e];
  const double f = static_cast<double>(cfg_.max_frequency);
  const double c = static_cast<double>(cfg_.cost_ratio);
  if (f <= 2.0 * c / cfg_.epsilon) {
    ++stats_.dirty_routed_det;
    handle_det(e);
    return;
  }
  const Level up = rb_k_ + 1;
  const int gap = el.ilev - up;
  std::optional<int> eta;
  if (static_cast<double>(gap) > geo_.rand_fallback_gap) eta = schedule_.eta(gap);
  if (!eta) {
    ++stats_.dirty_rand_fallback;
    handle_det(e);
    return;
  }
  ++stats_.dirty_rand;
  const double y = schedule_.iterate(*eta);
  const double delta = probe_factor(y, cfg_.epsilon, c, schedule_.probe_exponent()) * pow_[up];
  const double w = pow_[el.ilev];
  DSC_CHECK(delta > w);
  auto mem = members(e);

  auto witness = [&](SetIndex s) {
    return sets_[s].omega - w + delta >= statics_[s].cost;
  };
  auto settle_on = [&](SetIndex s) {
    raise_into_rebuild(s);
    set_zlev(e, sets_[s].lev);
  };

  const long budget =
      cfg_.rand_tuning.sample_budget.value_or(sample_budget(f, y));
  for (long r = 0; r < budget; ++r) {
    ++stats_.sample_rounds;
    const SetIndex s = mem[rng_.below(mem.size())];
    touch(s);
    if (witness(s)) {
      ++stats_.rand_witness;
      settle_on(s);
      if (observer_) observer_->on_rand_branch(*this, e, RandBranch::kWitness, *eta);
      return;
    }
  }

  scratch_fhat_.clear();
  for (SetIndex s : mem) {
    touch(s);
    if (witness(s)) scratch_fhat_.push_back(s);
  }
  if (scratch_fhat_.empty()) {
    ++stats_.rand_fhat_empty;
    dec_ilev(e);
    if (observer_) observer_->on_rand_branch(*this, e, RandBranch::kFhatEmpty, *eta);
    return;
  }
  if (static_cast<double>(scratch_fhat_.size()) <= y * y) {
    ++stats_.rand_fhat_small;
    for (SetIndex s : mem) {
      if (is_tight_class(sets_[s].tight)) raise_into_rebuild(s);
    }
    Level top = 0;
    for (SetIndex s : mem) top = std::max(top, sets_[s].lev);
    set_zlev(e, top);
    const Level d_hat = pow_.ceil_log(
        small_branch_span(y, cfg_.epsilon, c, schedule_.probe_exponent()));
    const Level l = std::min<Level>(el.ilev, top + d_hat);
    {
      ScopedTimer timer(profiling_, stats_.ns_fixlevel);
      fix_level(e, l, /*fresh=*/false);
    }
    zero_levels(0, 0);
    if (observer_) observer_->on_rand_branch(*this, e, RandBranch::kFhatSmall, *eta);
    return;
  }
  ++stats_.rand_fhat_large;
  settle_on(scratch_fhat_.front());
  if (observer_) observer_->on_rand_branch(*this, e, RandBranch::kFhatLarge, *eta);
}

void Engine::water_filling(Level k_hat) {
  ScopedTimer timer(profiling_, stats_.ns_water_filling);
  ++stats_.water_filling_calls;
  stats_.water_filling_elements += rb_hat_elems_.size();
  const Level up = rb_k_ + 1;

  // Move everything to k_hat first.
  for (SetIndex s : rb_hat_sets_) {
    SetState& st = touch(s);
    DSC_CHECK(!is_tight_class(st.tight));
    if (st.phi != 0) write_phi(s, 0);
    write_level(s, k_hat);
  }
  for (ElemSlot e : rb_hat_elems_) {
    ElementState& el = elems_[e];
    DSC_CHECK(el.status == ElementStatus::kActive && el.ilev == up);
    for (std::uint32_t j = 0; j < el.degree; ++j) bucket_remove(e, j);
    set_ilev(e, k_hat);
    set_zlev(e, k_hat);
    for (std::uint32_t j = 0; j < el.degree; ++j) {
      const SetIndex s = members_[flat(e, j)];
      write_omega(s, sets_[s].omega - pow_[up] + pow_[k_hat]);
      bucket_add(e, j);
    }
  }

  WaterFillingInput in;
  in.top = k_hat;
  in.cost.reserve(rb_hat_sets_.size());
  in.fixed_weight.reserve(rb_hat_sets_.size());
  for (SetIndex s : rb_hat_sets_) {
    in.cost.push_back(statics_[s].cost);
    in.fixed_weight.push_back(sets_[s].omega);
    DSC_CHECK(sets_[s].omega < statics_[s].cost);
  }
  in.element_sets.resize(rb_hat_elems_.size());
  for (std::size_t x = 0; x < rb_hat_elems_.size(); ++x) {
    for (SetIndex s : members(rb_hat_elems_[x])) {
      const std::uint32_t p = rb_hat_index_[s];
      in.element_sets[x].push_back(p);
      in.fixed_weight[p] -= pow_[k_hat];
    }
  }
  const WaterFillingPlan plan = plan_water_filling(in, pow_);

  for (std::size_t p = 0; p < rb_hat_sets_.size(); ++p) {
    write_level(rb_hat_sets_[p], plan.set_level[p]);
  }
  for (std::size_t x = 0; x < rb_hat_elems_.size(); ++x) {
    const ElemSlot e = rb_hat_elems_[x];
    const Level lev = plan.element_level[x];
    if (lev == k_hat) continue;
    ElementState& el = elems_[e];
    for (std::uint32_t j = 0; j < el.degree; ++j) bucket_remove(e, j);
    set_ilev(e, lev);
    set_zlev(e, lev);
    for (std::uint32_t j = 0; j < el.degree; ++j) {
      const SetIndex s = members_[flat(e, j)];
      write_omega(s, sets_[s].omega - pow_[k_hat] + pow_[lev]);
      bucket_add(e, j);
    }
  }
  if (observer_) {
    observer_->on_water_filling_done(*this, k_hat, rb_hat_sets_, rb_hat_elems_);
  }
}

}  // namespace dsc
