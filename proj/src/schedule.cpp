#include "saddle_raar/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "saddle_raar/types.hpp"

namespace saddle_raar {

ParameterSchedule::ParameterSchedule(std::vector<Breakpoint> breakpoints) : points_(std::move(breakpoints)) {
  if (points_.empty()) throw RangeError("schedule needs at least one breakpoint");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].second)) throw RangeError("schedule values must be finite");
    if (i > 0 && points_[i].first < points_[i - 1].first) {
      throw RangeError("schedule breakpoint indices must be nondecreasing");
    }
  }
}

ParameterSchedule ParameterSchedule::constant(double value) { return ParameterSchedule({{1, value}}); }

ParameterSchedule ParameterSchedule::hold_then_ramp(double start, int hold, int total, double end) {
  if (total < hold) throw RangeError("ramp end precedes hold end");
  return ParameterSchedule({{hold, start}, {total, end}});
}

double ParameterSchedule::at(int k) const {
  if (k <= points_.front().first) return points_.front().second;
  if (k >= points_.back().first) return points_.back().second;
  auto hi = std::upper_bound(points_.begin(), points_.end(), k,
                             [](int key, const Breakpoint& p) { return key < p.first; });
  auto lo = std::prev(hi);
  if (hi->first == lo->first) return hi->second;
  const double t = static_cast<double>(k - lo->first) / static_cast<double>(hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

double ParameterSchedule::min_value() const {
  return std::min_element(points_.begin(), points_.end(),
                          [](const Breakpoint& a, const Breakpoint& b) { return a.second < b.second; })
      ->second;
}

double ParameterSchedule::max_value() const {
  return std::max_element(points_.begin(), points_.end(),
                          [](const Breakpoint& a, const Breakpoint& b) { return a.second < b.second; })
      ->second;
}

}  // namespace saddle_raar
