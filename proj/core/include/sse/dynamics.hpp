#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "sse/model.hpp"
#include "sse/spectral.hpp"
#include "sse/time_grid.hpp"

namespace sse {

struct ModeCoefficients {
  std::vector<cplx> coeffs;
  std::uint64_t basis_id = 0;

  double norm2() const;
};

ModeCoefficients project_initial(const EigenBasis& basis, const InitialState& init);

enum class BathOutput { none, norm, full };

struct Trajectory {
  TimeGrid grid;
  std::vector<cplx> a1;
  std::vector<cplx> a2;
  std::vector<double> norm2;  // total norm per sample when requested
  Eigen::MatrixXcd bath;      // column i is the bath state at sample i when requested
  std::uint64_t params_id = 0;

  std::size_t size() const { return a1.size(); }
};

/// a_j(t) = sum_k C_k (e_k)_j exp(-i f_k t).
Trajectory propagate(const EigenBasis& basis, const ModeCoefficients& c, const TimeGrid& grid,
                     BathOutput bath = BathOutput::none);

/// Largest admissible RK4 step: 0.1 / (|omega0| + N*dw/2 + Omega + g*sqrt(N)).
double max_ode_step(const SystemParams& p);

/// Classical RK4 on the full system. Records every `record_every` steps.
/// Throws InvalidArgument when dt exceeds max_ode_step.
Trajectory integrate_ode(const SystemParams& p, const InitialState& init, double t_max, double dt,
                         std::size_t record_every = 1, BathOutput bath = BathOutput::none);

/// Averaging step: 2*pi / (20 * (N*dw/2 + Omega + gamma)).
double sampling_step(const SystemParams& p);

/// Uniform grid on [start, stop] with step no larger than sampling_step.
TimeGrid sampling_grid(const SystemParams& p, double stop, double start = 0.0);

/// Head response kernels in the rotating frame:
///   S_ij(t) = sum_k (e_k)_i (e_k)_j exp(-i (f_k - omega0) t).
/// For bath-free initial states a1 = exp(-i omega0 t)(a1 S11 + a2 S12) and
/// a2 = exp(-i omega0 t)(a1 S12 + a2 S22).
struct HeadKernels {
  TimeGrid grid;
  std::vector<cplx> s11;
  std::vector<cplx> s12;
  std::vector<cplx> s22;
  std::uint64_t basis_id = 0;
};

HeadKernels head_kernels(const EigenBasis& basis, const TimeGrid& grid);

struct AbsMeans {
  double a1;
  double a2;
};

/// Trapezoid time averages of |a1| and |a2|. Throws InvalidArgument when empty.
AbsMeans time_average_abs(const Trajectory& traj);

/// <|a1|>/<|a2|> with a division guard at 1e-14 (NumericalError).
double guarded_ratio(const AbsMeans& m);

/// Ratio of time averages over [0, t_max] from spectral propagation.
double amplitude_ratio(const SystemParams& p, const InitialState& init, double t_max);

/// Same, reusing precomputed kernels (bath-free initial state).
double amplitude_ratio(const HeadKernels& k, cplx a1, cplx a2);

enum class InitMode { random, unit, eigenplus };

struct EnsembleSpec {
  InitMode mode = InitMode::random;
  std::size_t n_states = 200;
  std::uint64_t seed = 1;
};

struct EnsembleStats {
  double mean;
  double dispersion;  // sample standard deviation, 0 for a single state
};

/// Head amplitudes (exp(i theta1), exp(i theta2)) of state `index` of a
/// seeded ensemble; every index has its own stream.
std::pair<cplx, cplx> random_phase_state(std::uint64_t seed, std::size_t index);

/// Mean and dispersion of amplitude_ratio over n_states random-phase states.
EnsembleStats ensemble_ratio(const SystemParams& p, std::size_t n_states, double t_max,
                             std::uint64_t seed, unsigned threads = 1);

/// arg a1 - arg a2 in (-pi, pi]; nullopt where either modulus is <= 1e-14.
std::vector<std::optional<double>> phase_difference(const Trajectory& traj);

struct RatioPoint {
  double omega;
  double ratio;
  double dispersion;
};

struct RatioCurve {
  std::vector<RatioPoint> points;
  std::size_t n_bath = 0;
  double t_max_in_tr = 0.0;
  std::size_t ensemble_size = 0;
  std::uint64_t seed = 0;
  InitMode mode = InitMode::random;
};

/// One ratio per Omega. Omega points are computed in parallel; ensemble
/// members are reduced in index order so the result is thread-count independent.
RatioCurve ratio_sweep(const SystemParams& p, std::span<const double> omega_grid,
                       double t_max_in_tr, const EnsembleSpec& spec, unsigned threads = 1);

struct CurveSlope {
  double omega_mid;
  double slope;
};

std::vector<CurveSlope> finite_difference_slopes(const RatioCurve& curve);

/// Midpoint of the steepest finite-difference segment.
double knee_omega(const RatioCurve& curve);

/// Largest slope among segments whose midpoint lies in [lo, hi].
double max_slope_in(const RatioCurve& curve, double lo, double hi);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_ratio_csv(std::ostream& out, const RatioCurve& curve);

}  // namespace sse
