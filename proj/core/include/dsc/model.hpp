#pragma once

#include <cstdint>
#include <vector>

#include "dsc/power_table.hpp"

namespace dsc {

using SetId = std::int64_t;
using ElementId = std::uint64_t;
using SetIndex = std::uint32_t;
using ElemSlot = std::uint32_t;
using Level = std::int32_t;

struct SetSpec {
  SetId id = 0;
  double cost = 1.0;
};

struct SetStatic {
  SetId id = 0;
  double cost = 1.0;
  double tight_threshold = 1.0;  // cost / (1+eps)
  Level base = 0;
};

// How a set qualifies for the cover. Sets tight through their own weight stay
// tight when dead weight is cleared; the other two classes do not.
enum class TightClass : std::uint8_t {
  kSlack = 0,
  kByDeadWeight = 1,
  kByWeight = 2,
};

inline bool is_tight_class(TightClass c) { return c != TightClass::kSlack; }

struct BucketEntry {
  ElemSlot elem;
  std::uint32_t member;  // position of the set in the element's member list
};

struct SetState {
  Level lev = 0;
  double omega = 0;
  double phi = 0;
  std::uint64_t tm = 0;
  std::uint32_t writes = 0;
  std::uint32_t live_members = 0;
  TightClass tight = TightClass::kSlack;
  std::vector<std::vector<BucketEntry>> active;   // A_i(s), by level
  std::vector<std::vector<BucketEntry>> passive;  // P_i(s), by intrinsic level
};

enum class ElementStatus : std::uint8_t { kActive, kPassive };

struct ElementState {
  ElementId id = 0;
  ElementStatus status = ElementStatus::kActive;
  Level zlev = 0;
  Level ilev = 0;
  std::uint32_t degree = 0;
  bool live = false;
};

inline double element_weight(const ElementState& e, const PowerTable& pow) {
  return pow[e.ilev];
}

inline double composite_weight(double omega, double phi) { return omega + phi; }

inline bool is_tight(double omega, double phi, double cost, double epsilon) {
  return composite_weight(omega, phi) >= cost / (1.0 + epsilon);
}

inline TightClass classify(double omega, double phi, double threshold) {
  if (omega >= threshold) return TightClass::kByWeight;
  if (omega + phi >= threshold) return TightClass::kByDeadWeight;
  return TightClass::kSlack;
}

// Weight the set would have one level up: active elements at its level each
// lose pow[lev] - pow[lev+1].
inline double weight_one_up(double omega, std::size_t active_at_level,
                            Level lev, const PowerTable& pow) {
  return omega - static_cast<double>(active_at_level) * pow.drop(lev + 1);
}

}  // namespace dsc
