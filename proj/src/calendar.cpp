#include "epi/calendar.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace epi {

Calendar::Calendar(int n_days, std::vector<std::pair<int, int>> closure_windows)
    : n_days_(n_days),
      n_weeks_((n_days + kWeekLen - 1) / kWeekLen),
      closures_(std::move(closure_windows)) {
  if (n_days <= 0) throw std::invalid_argument("calendar: n_days must be > 0");
  std::sort(closures_.begin(), closures_.end());
  int prev_end = -1;
  for (const auto& [lo, hi] : closures_) {
    if (lo > hi)
      throw std::invalid_argument("calendar: closure window start > end");
    if (lo < 0 || hi >= n_days_)
      throw std::invalid_argument("calendar: closure window [" +
                                  std::to_string(lo) + "," +
                                  std::to_string(hi) + "] outside [0," +
                                  std::to_string(n_days_ - 1) + "]");
    if (lo <= prev_end)
      throw std::invalid_argument("calendar: closure windows overlap");
    prev_end = hi;
  }
}

bool Calendar::in_closure(int u) const {
  for (const auto& [lo, hi] : closures_) {
    if (u < lo) return false;
    if (u <= hi) return true;
  }
  return false;
}

}  // namespace epi
