#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sse/dynamics.hpp"
#include "sse/spectral.hpp"

namespace sse {

/// |sum_k (e_k)_j^2 exp(-i (f_k - omega0) t)| on a grid.
struct ModeSumSeries {
  TimeGrid grid;
  Head component = Head::first;
  std::vector<double> values;
  std::uint64_t basis_id = 0;
};

ModeSumSeries mode_sum(const EigenBasis& basis, Head j, const TimeGrid& grid);

/// xi(t) = sum_k (e_k)_1 (e_k)_2 exp(-i (f_k - omega0) t).
std::vector<cplx> cross_sum(const EigenBasis& basis, const TimeGrid& grid);

/// Averaging window of the long-horizon mode-sum ratios: [2 T_R, t_max] on
/// the dynamics sampling policy.
TimeGrid estimator_grid(const SystemParams& p, double t_max);

/// int sqrt(|S11|^2 + |xi|^2) / int sqrt(|S22|^2 + |xi|^2) over the window:
/// the averaged ratio for equal initial moduli with the sign-alternating
/// cross terms dropped.
double ratio_no_cross_terms(const EigenBasis& basis, double t_max);

/// int |S11| / int |S22| over the same window.
double ratio_no_cross_no_xi(const EigenBasis& basis, double t_max);

/// sqrt(sum_k (e_k)_1^4) / sqrt(sum_k (e_k)_2^4).
double static_sum_ratio(const EigenBasis& basis);

/// (s1 sqrt(G1) P1) / (s2 sqrt(G2) P2), s_j = sqrt(2) when component j is
/// split below half height. Throws NumericalError on degenerate input.
double peak_estimate_ratio(const PeakFeatures& first, const PeakFeatures& second);

/// Largest |slope| among finite-difference segments with midpoint within
/// `half_window` of `centre`, divided by the median |slope| of the whole
/// series. Throws InvalidArgument with fewer than two segments.
double slope_spike_ratio(std::span<const double> x, std::span<const double> y, double centre,
                         double half_window);

struct EstimatorPoint {
  double omega;
  double ratio_full;
  double ratio_no_cross;
  double ratio_no_xi;
  double ratio_static;
  double ratio_peak;
};

/// All estimator columns except ratio_full (left NaN) for one basis.
EstimatorPoint estimator_point(const EigenBasis& basis, double t_max);

void write_estimator_csv(std::ostream& out, std::span<const EstimatorPoint> points);

}  // namespace sse
