#include "sse/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "sse/csv.hpp"
#include "sse/errors.hpp"

namespace sse {

ModeSumSeries mode_sum(const EigenBasis& basis, Head j, const TimeGrid& grid) {
  const HeadKernels k = head_kernels(basis, grid);
  const auto& s = j == Head::first ? k.s11 : k.s22;
  ModeSumSeries out{grid, j, std::vector<double>(s.size()), basis.id};
  for (std::size_t i = 0; i < s.size(); ++i) out.values[i] = std::abs(s[i]);
  return out;
}

std::vector<cplx> cross_sum(const EigenBasis& basis, const TimeGrid& grid) {
  return head_kernels(basis, grid).s12;
}

TimeGrid estimator_grid(const SystemParams& p, double t_max) {
  const double start = 2.0 * p.t_return();
  if (!(t_max > start)) throw InvalidArgument("estimator horizon must exceed 2 T_R");
  return sampling_grid(p, t_max, start);
}

namespace {

struct WindowIntegrals {
  double with_xi_1 = 0, with_xi_2 = 0, bare_1 = 0, bare_2 = 0;
};

WindowIntegrals integrate_window(const EigenBasis& basis, double t_max) {
  const HeadKernels k = head_kernels(basis, estimator_grid(basis.params, t_max));
  const std::size_t n = k.s11.size();
  std::vector<double> x1(n), x2(n), b1(n), b2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = std::norm(k.s12[i]);
    b1[i] = std::abs(k.s11[i]);
    b2[i] = std::abs(k.s22[i]);
    x1[i] = std::sqrt(b1[i] * b1[i] + c);
    x2[i] = std::sqrt(b2[i] * b2[i] + c);
  }
  const double dt = k.grid.dt;
  return {trapezoid(x1, dt), trapezoid(x2, dt), trapezoid(b1, dt), trapezoid(b2, dt)};
}

double guarded(double num, double den) {
  if (den < 1e-14) throw NumericalError("estimator denominator below 1e-14");
  return num / den;
}

}  // namespace

double ratio_no_cross_terms(const EigenBasis& basis, double t_max) {
  const auto w = integrate_window(basis, t_max);
  return guarded(w.with_xi_1, w.with_xi_2);
}

double ratio_no_cross_no_xi(const EigenBasis& basis, double t_max) {
  const auto w = integrate_window(basis, t_max);
  return guarded(w.bare_1, w.bare_2);
}

double static_sum_ratio(const EigenBasis& basis) {
  const double s1 = basis.vectors.row(0).array().pow(4).sum();
  const double s2 = basis.vectors.row(1).array().pow(4).sum();
  return guarded(std::sqrt(s1), std::sqrt(s2));
}

double peak_estimate_ratio(const PeakFeatures& first, const PeakFeatures& second) {
  auto weight = [](const PeakFeatures& f) {
    if (!(f.total_width > 0.0) || !(f.max_height() > 0.0))
      throw NumericalError("degenerate peak features");
    const double s = f.half_height_split ? std::numbers::sqrt2 : 1.0;
    return s * std::sqrt(f.total_width) * f.max_height();
  };
  return weight(first) / weight(second);
}

double slope_spike_ratio(std::span<const double> x, std::span<const double> y, double centre,
                         double half_window) {
  if (x.size() != y.size() || x.size() < 3)
    throw InvalidArgument("slope spike needs matching series with at least three points");
  std::vector<double> mags, mids;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (x[i + 1] == x[i]) continue;
    mags.push_back(std::abs((y[i + 1] - y[i]) / (x[i + 1] - x[i])));
    mids.push_back(0.5 * (x[i] + x[i + 1]));
  }
  if (mags.size() < 2) throw InvalidArgument("slope spike needs at least two segments");
  double local = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < mags.size(); ++i) {
    if (std::abs(mids[i] - centre) <= half_window) {
      local = std::max(local, mags[i]);
      any = true;
    }
  }
  if (!any) throw InvalidArgument("no segment inside the spike window");
  std::vector<double> sorted = mags;
  const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
  std::nth_element(sorted.begin(), mid, sorted.end());
  double median = *mid;
  if (sorted.size() % 2 == 0) median = 0.5 * (median + *std::max_element(sorted.begin(), mid));
  if (median == 0.0) return local == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return local / median;
}

EstimatorPoint estimator_point(const EigenBasis& basis, double t_max) {
  const auto w = integrate_window(basis, t_max);
  EstimatorPoint pt{};
  pt.omega = basis.params.omega_big;
  pt.ratio_full = std::numeric_limits<double>::quiet_NaN();
  pt.ratio_no_cross = guarded(w.with_xi_1, w.with_xi_2);
  pt.ratio_no_xi = guarded(w.bare_1, w.bare_2);
  pt.ratio_static = static_sum_ratio(basis);
  const auto f1 = peak_features(component_profile(basis, Head::first));
  const auto f2 = peak_features(component_profile(basis, Head::second));
  if (!f1 || !f2) throw NumericalError("degenerate component profile");
  pt.ratio_peak = peak_estimate_ratio(*f1, *f2);
  return pt;
}

void write_estimator_csv(std::ostream& out, std::span<const EstimatorPoint> points) {
  csv::header(out, "omega,ratio_full,ratio_no_cross,ratio_no_xi,ratio_static,ratio_peak");
  for (const auto& p : points)
    csv::row(out, {p.omega, p.ratio_full, p.ratio_no_cross, p.ratio_no_xi, p.ratio_static,
                   p.ratio_peak});
}

}  // namespace sse
