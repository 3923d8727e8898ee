#pragma once

#include <utility>
#include <vector>

namespace saddle_raar {

/// Piecewise-linear parameter path over 1-based iteration indices, constant
/// beyond its first and last breakpoints.
class ParameterSchedule {
 public:
  using Breakpoint = std::pair<int, double>;

  ParameterSchedule() = default;
  /// Breakpoint indices must be nondecreasing; at least one breakpoint.
  explicit ParameterSchedule(std::vector<Breakpoint> breakpoints);

  static ParameterSchedule constant(double value);

  /// Hold `start` through iteration `hold`, then decrease linearly to `end`
  /// at iteration `total`. The default matches the 600-iteration beta-paths.
  static ParameterSchedule hold_then_ramp(double start, int hold = 300, int total = 600, double end = 0.5);

  double at(int k) const;
  double min_value() const;
  double max_value() const;
  const std::vector<Breakpoint>& breakpoints() const { return points_; }

 private:
  std::vector<Breakpoint> points_{{1, 0.5}};
};

}  // namespace saddle_raar
