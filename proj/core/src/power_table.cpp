#include "dsc/power_table.hpp"

#include "dsc/errors.hpp"

namespace dsc {

PowerTable::PowerTable(double epsilon, int max_index) : epsilon_(epsilon) {
  DSC_CHECK(max_index >= 1);
  const auto n = static_cast<std::size_t>(max_index) + 1;
  down_.resize(n);
  up_.resize(n);
  drop_.resize(n);
  down_[0] = 1.0;
  up_[0] = 1.0;
  drop_[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    down_[i] = down_[i - 1] / (1.0 + epsilon);
    up_[i] = up_[i - 1] * (1.0 + epsilon);
    drop_[i] = down_[i - 1] - down_[i];
  }
}

int PowerTable::base_level(double cost) const {
  // pow is decreasing; find the last index with pow[b] >= cost.
  int lo = 0;
  int hi = max_index();
  DSC_CHECK(down_[0] >= cost);
  DSC_CHECK(down_[static_cast<std::size_t>(hi)] < cost);
  while (hi - lo > 1) {
    int mid = lo + (hi - lo) / 2;
    if ((*this)[mid] >= cost) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

int PowerTable::first_below(double bound, int lo, int hi) const {
  DSC_CHECK(lo >= 0 && hi <= max_index());
  int a = lo;
  int b = hi + 1;
  while (a < b) {
    int mid = a + (b - a) / 2;
    if ((*this)[mid] < bound) {
      b = mid;
    } else {
      a = mid + 1;
    }
  }
  return a;
}

int PowerTable::ceil_log(double x) const {
  if (x <= 1.0) return 0;
  int top = max_index();
  if (up_[static_cast<std::size_t>(top)] < x) {
    int h = top;
    double v = up_[static_cast<std::size_t>(top)];
    while (v < x) {
      v *= 1.0 + epsilon_;
      ++h;
    }
    return h;
  }
  int a = 0;
  int b = top;
  while (a < b) {
    int mid = a + (b - a) / 2;
    if (up_[static_cast<std::size_t>(mid)] >= x) {
      b = mid;
    } else {
      a = mid + 1;
    }
  }
  return a;
}

}  // namespace dsc
