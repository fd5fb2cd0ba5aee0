#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include "sse/csv.hpp"
#include "sse/errors.hpp"
#include "sse/parallel.hpp"
#include "sse/reduction.hpp"

namespace sse {

NoisyEnsemble simulate_noisy(const NhParams& p, const NoiseSpec& noise, double t_max,
                             std::array<cplx, 2> init, unsigned threads) {
  p.validate();
  if (!(noise.dt > 0.0)) throw InvalidArgument("noise dt must be > 0");
  if (p.gamma * noise.dt > 1e-2 || p.omega_big * noise.dt > 1e-2)
    throw InvalidArgument("SDE step rejected: need gamma*dt <= 1e-2 and Omega*dt <= 1e-2");
  if (!(noise.temperature >= 0.0)) throw InvalidArgument("temperature must be >= 0");
  if (noise.n_realizations < 1) throw InvalidArgument("need at least one realization");
  if (!(t_max > 0.0)) throw InvalidArgument("t_max must be > 0");

  const auto steps = static_cast<std::size_t>(std::ceil(t_max / noise.dt - 1e-9));
  const double h = t_max / static_cast<double>(steps);
  const std::size_t stride =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(noise.record_dt / h + 1e-9)));
  const double sigma = std::sqrt(p.gamma * noise.temperature * h / 2.0);
  const double g = p.gamma, w = p.omega_big;
  const cplx mi{0.0, -1.0};

  NoisyEnsemble ens;
  ens.grid = {0.0, h * static_cast<double>(stride), steps / stride + 1};
  ens.omega0 = p.omega0;
  ens.realizations.resize(noise.n_realizations);
  parallel_for(noise.n_realizations, threads, [&](std::size_t r) {
    std::seed_seq seq{static_cast<std::uint32_t>(noise.seed),
                      static_cast<std::uint32_t>(noise.seed >> 32), static_cast<std::uint32_t>(r),
                      static_cast<std::uint32_t>(static_cast<std::uint64_t>(r) >> 32), 0x5eedu};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    Trajectory& tr = ens.realizations[r];
    tr.grid = ens.grid;
    tr.a1.reserve(ens.grid.count);
    tr.a2.reserve(ens.grid.count);
    cplx u1 = init[0], u2 = init[1];
    auto record = [&](std::size_t step) {
      const cplx carrier = std::polar(1.0, -p.omega0 * h * static_cast<double>(step));
      tr.a1.push_back(carrier * u1);
      tr.a2.push_back(carrier * u2);
    };
    record(0);
    for (std::size_t s = 1; s <= steps; ++s) {
      const double xr = normal(rng);
      const double xi = normal(rng);
      const cplx n1 = u1 + (-g * u1 + mi * w * u2) * h + sigma * cplx{xr, xi};
      u2 = u2 + mi * w * u1 * h;
      u1 = n1;
      if (s % stride == 0) record(s);
    }
  });
  return ens;
}

namespace {

std::size_t next_smooth(std::size_t n) {
  for (;; ++n) {
    std::size_t m = n;
    for (std::size_t f : {2u, 3u, 5u})
      while (m % f == 0) m /= f;
    if (m == 1) return n;
  }
}

}  // namespace

Spectrum estimate_spectrum(const NoisyEnsemble& ens, double gamma, double discard) {
  if (!(gamma > 0.0)) throw InvalidArgument("spectrum resolution needs gamma > 0");
  if (ens.realizations.empty()) throw InvalidArgument("empty ensemble");
  const double h = ens.grid.dt;
  const auto need = static_cast<std::size_t>(std::ceil(20.0 * std::numbers::pi / (gamma * h)));
  const std::size_t len = next_smooth(std::max<std::size_t>(need, 2));
  const auto first = static_cast<std::size_t>(std::ceil(discard / h - 1e-9));
  if (first >= ens.grid.count || ens.grid.count - first < len)
    throw NumericalError("insufficient samples for the requested spectral resolution");
  const std::size_t hop = len / 2;

  std::vector<double> window(len);
  double wsum2 = 0.0;
  for (std::size_t n = 0; n < len; ++n) {
    window[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                      static_cast<double>(len)));
    wsum2 += window[n] * window[n];
  }

  Eigen::FFT<double> fft;
  std::vector<cplx> in(len), out(len);
  std::vector<double> acc1(len, 0.0), acc2(len, 0.0);
  std::size_t segments = 0;
  for (const auto& tr : ens.realizations) {
    for (std::size_t s = first; s + len <= ens.grid.count; s += hop) {
      for (int which = 0; which < 2; ++which) {
        const auto& x = which == 0 ? tr.a1 : tr.a2;
        for (std::size_t n = 0; n < len; ++n) {
          const double t = ens.grid.at(s + n);
          // conj(demodulated sample): the forward transform then yields
          // conj(sum w x exp(+i w t)), whose modulus is what we want.
          in[n] = std::conj(x[s + n] * std::polar(1.0, ens.omega0 * t)) * window[n];
        }
        fft.fwd(out, in);
        auto& acc = which == 0 ? acc1 : acc2;
        for (std::size_t k = 0; k < len; ++k) acc[k] += std::norm(out[k]);
      }
      ++segments;
    }
  }

  Spectrum sp;
  sp.resolution = 2.0 * std::numbers::pi / (static_cast<double>(len) * h);
  sp.segments = segments;
  const double scale = h / (wsum2 * static_cast<double>(segments) * 2.0 * std::numbers::pi);
  const auto n = static_cast<std::ptrdiff_t>(len);
  for (std::ptrdiff_t m = -(n / 2); m <= (n - 1) / 2; ++m) {
    const std::size_t k = static_cast<std::size_t>(m < 0 ? m + n : m);
    sp.freq.push_back(ens.omega0 + sp.resolution * static_cast<double>(m));
    sp.psd_a1.push_back(acc1[k] * scale);
    sp.psd_a2.push_back(acc2[k] * scale);
  }
  return sp;
}

SplitDetection detect_split(const Spectrum& s, double gamma, double omega0) {
  if (s.freq.empty()) throw InvalidArgument("empty spectrum");
  const double df = s.resolution;
  const auto centre = static_cast<std::size_t>(
      std::min_element(s.freq.begin(), s.freq.end(),
                       [&](double a, double b) { return std::abs(a - omega0) < std::abs(b - omega0); }) -
      s.freq.begin());
  const std::size_t reach = std::min({centre, s.freq.size() - 1 - centre,
                                      static_cast<std::size_t>(std::floor(3.0 * gamma / df))});
  if (reach < 1) throw NumericalError("spectrum too coarse for split detection");

  std::vector<double> folded(reach + 1);
  for (std::size_t m = 0; m <= reach; ++m)
    folded[m] = 0.5 * (s.psd_a2[centre + m] + s.psd_a2[centre - m]);

  const auto half_width = static_cast<std::ptrdiff_t>(std::ceil(0.1 * gamma / df));
  const auto last = static_cast<std::ptrdiff_t>(reach);
  auto reflect = [&](std::ptrdiff_t i) {
    if (i < 0) i = -i;
    if (i > last) i = 2 * last - i;
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, last));
  };
  std::vector<double> smooth(reach + 1);
  for (std::ptrdiff_t m = 0; m <= last; ++m) {
    double acc = 0.0;
    for (std::ptrdiff_t j = -half_width; j <= half_width; ++j) acc += folded[reflect(m + j)];
    smooth[static_cast<std::size_t>(m)] = acc / static_cast<double>(2 * half_width + 1);
  }
  const auto arg =
      static_cast<std::size_t>(std::max_element(smooth.begin(), smooth.end()) - smooth.begin());

  SplitDetection d;
  d.split = arg != 0;
  if (d.split) {
    const double off = df * static_cast<double>(arg);
    d.peak_freqs = {s.freq[centre] - off, s.freq[centre] + off};
  } else {
    d.peak_freqs = {s.freq[centre]};
  }
  return d;
}

SplitDetection spectrum_split_detect(const NhParams& p, const NoiseSpec& noise, double t_max,
                                     unsigned threads) {
  if (!(noise.temperature > 0.0))
    throw InvalidArgument("noise-free spectrum estimation refused: temperature must be > 0");
  if (!(p.gamma > 0.0)) throw InvalidArgument("spectrum split detection needs gamma > 0");
  NoiseSpec spec = noise;
  if (spec.record_dt <= 0.0)
    spec.record_dt = std::numbers::pi / (8.0 * (p.omega_big + p.gamma));
  const NoisyEnsemble ens = simulate_noisy(p, spec, t_max, {cplx{}, cplx{}}, threads);
  Spectrum s = estimate_spectrum(ens, p.gamma, 10.0 / p.gamma);
  SplitDetection d = detect_split(s, p.gamma, p.omega0);
  d.spectrum = std::move(s);
  return d;
}

double find_noisy_split_threshold(NhParams p, const NoiseSpec& noise, double t_max,
                                  double omega_lo, double omega_hi, double tol, unsigned threads) {
  if (!(omega_lo < omega_hi) || !(tol > 0.0))
    throw InvalidArgument("bisection needs omega_lo < omega_hi and tol > 0");
  auto split_at = [&](double w) {
    p.omega_big = w;
    return spectrum_split_detect(p, noise, t_max, threads).split;
  };
  if (split_at(omega_lo) || !split_at(omega_hi))
    throw NumericalError("noisy split is not bracketed by the given interval");
  double lo = omega_lo, hi = omega_hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (split_at(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
  csv::header(out, "freq,psd_a1,psd_a2");
  for (std::size_t i = 0; i < s.freq.size(); ++i) csv::row(out, {s.freq[i], s.psd_a1[i], s.psd_a2[i]});
}

}  // namespace sse
