#include <algorithm>
#include <cmath>

#include "sse/errors.hpp"
#include "sse/spectral.hpp"

namespace sse {

namespace {

struct Segment {
  double lo;
  double hi;
};

// Maximal runs of samples with y >= level, extended to the linearly
// interpolated crossings on each side.
std::vector<Segment> superlevel_segments(const std::vector<double>& f,
                                         const std::vector<double>& y, double level) {
  std::vector<Segment> out;
  const std::size_t n = y.size();
  std::size_t i = 0;
  while (i < n) {
    if (y[i] < level) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && y[j + 1] >= level) ++j;
    const double lo =
        i == 0 ? f[0] : f[i - 1] + (level - y[i - 1]) * (f[i] - f[i - 1]) / (y[i] - y[i - 1]);
    const double hi =
        j == n - 1 ? f[j] : f[j] + (level - y[j]) * (f[j + 1] - f[j]) / (y[j + 1] - y[j]);
    out.push_back({lo, hi});
    i = j + 1;
  }
  return out;
}

}  // namespace

double PeakFeatures::max_height() const {
  return heights.empty() ? 0.0 : *std::max_element(heights.begin(), heights.end());
}

std::optional<PeakFeatures> peak_features(const ComponentProfile& profile) {
  const std::size_t n = profile.points.size();
  std::vector<double> f(n), y(n);
  for (std::size_t k = 0; k < n; ++k) {
    f[k] = profile.points[k].freq;
    y[k] = profile.points[k].value * profile.points[k].value;
  }
  if (n == 0) return std::nullopt;
  const double top = *std::max_element(y.begin(), y.end());
  if (top < 1e-14) return std::nullopt;
  const double half = top / 2.0;

  // Local maxima at or above half height. A plateau counts once, at its
  // first sample; the ends count when they exceed their single neighbour.
  std::vector<std::size_t> maxima;
  for (std::size_t k = 0; k < n; ++k) {
    if (y[k] < half) continue;
    const bool rises = k == 0 || y[k] > y[k - 1];
    std::size_t r = k;
    while (r + 1 < n && y[r + 1] == y[k]) ++r;
    const bool falls = r == n - 1 || y[r + 1] < y[k];
    if (rises && falls) maxima.push_back(k);
    k = r;
  }
  if (maxima.empty()) maxima.push_back(static_cast<std::size_t>(
      std::max_element(y.begin(), y.end()) - y.begin()));

  PeakFeatures out;
  std::vector<std::size_t> peaks{maxima.front()};
  if (maxima.size() >= 2) peaks.push_back(maxima.back());
  out.peak_count = static_cast<int>(peaks.size());
  for (std::size_t k : peaks) {
    out.heights.push_back(y[k]);
    out.peak_freqs.push_back(f[k]);
    out.offsets.push_back(std::abs(f[k] - profile.omega0));
  }
  if (out.peak_count == 2) {
    const double dip = *std::min_element(y.begin() + static_cast<std::ptrdiff_t>(peaks[0]),
                                         y.begin() + static_cast<std::ptrdiff_t>(peaks[1]) + 1);
    out.half_height_split = dip < half;
  }
  for (const auto& s : superlevel_segments(f, y, half)) out.total_width += s.hi - s.lo;
  return out;
}

double find_split_threshold(const SystemParams& p, double omega_lo, double omega_hi, double tol) {
  if (!(omega_lo < omega_hi) || !(tol > 0.0))
    throw InvalidArgument("find_split_threshold needs omega_lo < omega_hi and tol > 0");
  if (!(p.gamma() > 0.0)) throw NumericalError("no bath coupling: split threshold cannot be bracketed");
  auto count_at = [&](double omega) {
    const auto feats = peak_features(
        component_profile(diagonalize(build_matrix(with_omega(p, omega))), Head::second));
    if (!feats) throw NumericalError("degenerate component-2 profile");
    return feats->peak_count;
  };
  if (count_at(omega_lo) != 1 || count_at(omega_hi) != 2)
    throw NumericalError("split threshold is not bracketed by the given interval");
  double lo = omega_lo, hi = omega_hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (count_at(mid) == 1 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace sse
