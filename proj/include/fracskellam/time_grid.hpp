#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fracskellam {

/// Uniform time grid 0, h, 2h, ..., (n_points-1)*h.
struct TimeGrid {
  double h = 0.0;
  std::size_t n_points = 1;

  static TimeGrid from_step(double t_max, double step) {
    if (!(step > 0.0) || !(t_max >= 0.0))
      throw std::invalid_argument("TimeGrid: need step > 0 and t_max >= 0");
    TimeGrid g;
    g.h = step;
    g.n_points = static_cast<std::size_t>(t_max / step + 0.5) + 1;
    if (g.n_points < 1) g.n_points = 1;
    return g;
  }

  double time(std::size_t i) const { return h * static_cast<double>(i); }
  double t_max() const { return time(n_points - 1); }
};

/// Non-decreasing real-valued path on a grid, starting at 0.
struct SubordinatorPath {
  TimeGrid grid;
  std::vector<double> values;
};

/// Integer-valued piecewise-constant path on a grid; the value at t_i
/// holds on [t_i, t_{i+1}).
struct CountPath {
  TimeGrid grid;
  std::vector<long long> values;
};

/// Real-valued path on a grid (running averages, subordinator output).
struct SamplePath {
  TimeGrid grid;
  std::vector<double> values;
};

/// Event-level path: piecewise constant with jumps at `times`;
/// values[i] holds on [times[i], times[i+1]) and the path is 0 before
/// the first jump.
struct JumpPath {
  std::vector<double> times;
  std::vector<long long> values;
  double t_max = 0.0;
};

}  // namespace fracskellam
