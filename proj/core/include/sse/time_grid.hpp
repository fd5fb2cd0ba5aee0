#pragma once

#include <cstddef>
#include <span>

namespace sse {

/// Uniform samples t_i = start + i*dt, i in [0, count).
struct TimeGrid {
  double start = 0.0;
  double dt = 0.0;
  std::size_t count = 0;

  double at(std::size_t i) const { return start + dt * static_cast<double>(i); }
  double stop() const { return count == 0 ? start : at(count - 1); }
  double span() const { return stop() - start; }

  /// count samples covering [start, stop] inclusive.
  static TimeGrid covering(double start, double stop, std::size_t count);
  /// Smallest uniform grid on [start, stop] whose step does not exceed max_dt.
  static TimeGrid with_max_step(double start, double stop, double max_dt);

  bool operator==(const TimeGrid&) const = default;
};

/// Trapezoid integral of samples y on grid spacing dt.
double trapezoid(std::span<const double> y, double dt);

/// Trapezoid integral divided by the covered span; a single sample is its own mean.
double trapezoid_mean(std::span<const double> y, double dt);

}  // namespace sse
