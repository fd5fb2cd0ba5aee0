#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sse/dynamics.hpp"
#include "sse/model.hpp"

namespace sse {

/// Markovian two-mode model: da1/dt = (-i w0 - gamma) a1 - i Omega a2 + xi,
/// da2/dt = -i w0 a2 - i Omega a1.
struct NhParams {
  double gamma = 0.0;
  double omega_big = 0.0;
  double omega0 = 0.0;

  void validate() const;
};

NhParams reduce(const SystemParams& p);

struct NhEigensystem {
  cplx lambda_plus;
  cplx lambda_minus;
  std::array<cplx, 2> e_plus;
  std::array<cplx, 2> e_minus;
};

/// Closed form. For Omega = 0 the basis is diagonal: e+ = (0, 1) with
/// lambda+ = -i w0, e- = (1, 0) with lambda- = -gamma - i w0.
NhEigensystem nh_eigensystem(const NhParams& p);

/// |Omega - gamma/2| below this fraction of gamma is propagated in closed
/// matrix-exponential form instead of by eigen-expansion.
inline constexpr double ep_window = 1e-6;

/// Exact solution of the noise-free 2x2 system on the grid.
Trajectory nh_propagate(const NhParams& p, std::array<cplx, 2> init, const TimeGrid& grid);

/// ||a_j^x(t)| - |a_j^y(t)|| / scale for both heads on a shared grid.
struct ModulusDeviation {
  TimeGrid grid;
  std::vector<double> head1;
  std::vector<double> head2;

  /// Largest deviation of either head over samples with t in [t0, t1];
  /// NaN when no sample falls inside.
  double max_in(double t0, double t1) const;
};

ModulusDeviation modulus_deviation(const Trajectory& x, const Trajectory& y, double scale);

/// <|a1|>/<|a2|> for e+ initial conditions per Omega over [0, t_max].
RatioCurve nh_ratio_curve(double gamma, double omega0, std::span<const double> omega_grid,
                          double t_max);

/// Split onset of the second oscillator's spectrum for two independently
/// damped oscillators at temperatures T1, T2. Throws NumericalError outside
/// the formula's domain.
double noisy_split_threshold(double gamma1, double gamma2, double t1, double t2);

struct NoiseSpec {
  double temperature = 1.0;
  std::uint64_t seed = 1;
  double dt = 0.0;
  std::size_t n_realizations = 64;
  /// Spacing of recorded samples; rounded down to a multiple of dt. Zero
  /// records every step.
  double record_dt = 0.0;
};

struct NoisyEnsemble {
  TimeGrid grid;
  double omega0 = 0.0;
  std::vector<Trajectory> realizations;
};

/// Euler-Maruyama in the frame rotating at omega0 (the carrier is restored
/// at record time). Requires gamma*dt <= 1e-2 and Omega*dt <= 1e-2.
NoisyEnsemble simulate_noisy(const NhParams& p, const NoiseSpec& noise, double t_max,
                             std::array<cplx, 2> init = {cplx{}, cplx{}}, unsigned threads = 1);

struct Spectrum {
  std::vector<double> freq;  // ascending, absolute angular frequency
  std::vector<double> psd_a1;
  std::vector<double> psd_a2;
  double resolution = 0.0;
  std::size_t segments = 0;
};

/// Welch estimate averaged over realizations: Hann window, 50% overlap,
/// segments long enough for bin spacing <= gamma/10, samples before
/// `discard` dropped. PSD(w) = |sum_n w_n x_n exp(+i w t_n)|^2 scaled to
/// density, so exp(-i w0 t) peaks at w0. The signal is demodulated by the
/// ensemble's omega0 first, so bins are centred on omega0. Throws
/// NumericalError when fewer samples than one segment remain.
Spectrum estimate_spectrum(const NoisyEnsemble& ens, double gamma, double discard);

struct SplitDetection {
  bool split = false;
  std::vector<double> peak_freqs;
  Spectrum spectrum;
};

/// Split decision on the a2 spectrum. The PSD is folded about w0, smoothed
/// over +-gamma/10 and called split when its maximum sits off w0.
SplitDetection detect_split(const Spectrum& s, double gamma, double omega0);

SplitDetection spectrum_split_detect(const NhParams& p, const NoiseSpec& noise, double t_max,
                                     unsigned threads = 1);

/// Bisection of the split flag over Omega with common random numbers.
double find_noisy_split_threshold(NhParams p, const NoiseSpec& noise, double t_max,
                                  double omega_lo, double omega_hi, double tol,
                                  unsigned threads = 1);

void write_spectrum_csv(std::ostream& out, const Spectrum& s);

}  // namespace sse
