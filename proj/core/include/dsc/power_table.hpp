#pragma once

#include <vector>

namespace dsc {

// pow[i] = (1+eps)^-i, plus the matching growth table and the per-level drop
// pow[i-1] - pow[i].
class PowerTable {
 public:
  PowerTable(double epsilon, int max_index);

  double operator[](int i) const { return down_[static_cast<unsigned>(i)]; }
  double growth(int i) const { return up_[static_cast<unsigned>(i)]; }
  // Weight lost by an element rising from level i-1 to level i.
  double drop(int i) const { return drop_[static_cast<unsigned>(i)]; }

  int max_index() const { return static_cast<int>(down_.size()) - 1; }
  double epsilon() const { return epsilon_; }

  // Largest b >= 0 with (1+eps)^b <= 1/cost, i.e. pow[b] >= cost.
  int base_level(double cost) const;

  // Smallest h in [lo, hi] with pow[h] < bound, or hi + 1 if none.
  int first_below(double bound, int lo, int hi) const;

  // Smallest h >= 0 with (1+eps)^h >= x.
  int ceil_log(double x) const;

 private:
  double epsilon_;
  std::vector<double> down_;
  std::vector<double> up_;
  std::vector<double> drop_;
};

}  // namespace dsc
