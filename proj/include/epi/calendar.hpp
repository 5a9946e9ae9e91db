#ifndef EPI_CALENDAR_HPP
#define EPI_CALENDAR_HPP

#include <utility>
#include <vector>

namespace epi {

// Daily grid (index u) with a fixed 7-day week map (index t). Week 0 starts
// at u = 0; the last week may be short. School-closure windows are inclusive
// day ranges during which transmission is scaled by kappa.
class Calendar {
 public:
  static constexpr int kWeekLen = 7;

  Calendar() = default;
  Calendar(int n_days, std::vector<std::pair<int, int>> closure_windows = {});

  static Calendar from_weeks(int n_weeks,
                             std::vector<std::pair<int, int>> closures = {}) {
    return Calendar(n_weeks * kWeekLen, std::move(closures));
  }

  int n_days() const { return n_days_; }
  int n_weeks() const { return n_weeks_; }
  int week_of(int u) const { return u / kWeekLen; }
  int day_of_week(int u) const { return u % kWeekLen; }
  bool in_closure(int u) const;
  const std::vector<std::pair<int, int>>& closure_windows() const {
    return closures_;
  }

 private:
  int n_days_ = 0;
  int n_weeks_ = 0;
  std::vector<std::pair<int, int>> closures_;
};

}  // namespace epi

#endif
