#include "sse/dynamics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "sse/csv.hpp"
#include "sse/errors.hpp"

namespace sse {

TimeGrid TimeGrid::covering(double start, double stop, std::size_t count) {
  if (count == 0) throw InvalidArgument("time grid needs at least one sample");
  if (count == 1) return {start, 0.0, 1};
  if (!(stop > start)) throw InvalidArgument("time grid needs stop > start");
  return {start, (stop - start) / static_cast<double>(count - 1), count};
}

TimeGrid TimeGrid::with_max_step(double start, double stop, double max_dt) {
  if (!(max_dt > 0.0)) throw InvalidArgument("time step must be > 0");
  if (!(stop >= start)) throw InvalidArgument("time grid needs stop >= start");
  if (stop == start) return {start, 0.0, 1};
  const auto intervals = static_cast<std::size_t>(std::ceil((stop - start) / max_dt));
  return covering(start, stop, intervals + 1);
}

double trapezoid(std::span<const double> y, double dt) {
  if (y.size() < 2) return 0.0;
  double s = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) s += y[i];
  return s * dt;
}

double trapezoid_mean(std::span<const double> y, double dt) {
  if (y.empty()) throw InvalidArgument("cannot average an empty series");
  if (y.size() == 1) return y.front();
  return trapezoid(y, dt) / (dt * static_cast<double>(y.size() - 1));
}

double ModeCoefficients::norm2() const {
  double s = 0.0;
  for (const auto& c : coeffs) s += std::norm(c);
  return s;
}

ModeCoefficients project_initial(const EigenBasis& basis, const InitialState& init) {
  init.validate_for(basis.params);
  if (basis.vectors.rows() != static_cast<Eigen::Index>(basis.params.n_bath + 2))
    throw InvalidArgument("basis dimension does not match its parameters");
  ModeCoefficients m;
  m.basis_id = basis.id;
  m.coeffs.resize(static_cast<std::size_t>(basis.size()));
  for (Eigen::Index k = 0; k < basis.size(); ++k) {
    const auto col = basis.vectors.col(k);
    cplx c = init.a1_0 * col(0) + init.a2_0 * col(1);
    for (std::size_t m2 = 0; m2 < init.bath_0.size(); ++m2)
      c += init.bath_0[m2] * col(static_cast<Eigen::Index>(m2) + 2);
    m.coeffs[static_cast<std::size_t>(k)] = c;
  }
  return m;
}

Trajectory propagate(const EigenBasis& basis, const ModeCoefficients& c, const TimeGrid& grid,
                     BathOutput bath) {
  if (c.basis_id != basis.id || c.coeffs.size() != static_cast<std::size_t>(basis.size()))
    throw InvalidArgument("mode coefficients do not belong to this basis");
  const Eigen::Index n = basis.size();
  Trajectory tr;
  tr.grid = grid;
  tr.params_id = basis.id;
  tr.a1.resize(grid.count);
  tr.a2.resize(grid.count);
  if (bath != BathOutput::none) tr.norm2.resize(grid.count);
  if (bath == BathOutput::full) tr.bath.resize(n - 2, static_cast<Eigen::Index>(grid.count));

  const Eigen::VectorXcd coeffs =
      Eigen::Map<const Eigen::VectorXcd>(c.coeffs.data(), n);
  const Eigen::MatrixXcd vectors = basis.vectors.cast<cplx>();
  Eigen::VectorXcd amp(n);
  for (std::size_t i = 0; i < grid.count; ++i) {
    const double t = grid.at(i);
    for (Eigen::Index k = 0; k < n; ++k) amp(k) = coeffs(k) * std::polar(1.0, -basis.offsets(k) * t);
    const cplx carrier = std::polar(1.0, -basis.params.omega0 * t);
    cplx s1{}, s2{};
    for (Eigen::Index k = 0; k < n; ++k) {
      s1 += basis.vectors(0, k) * amp(k);
      s2 += basis.vectors(1, k) * amp(k);
    }
    tr.a1[i] = carrier * s1;
    tr.a2[i] = carrier * s2;
    if (bath != BathOutput::none) {
      const Eigen::VectorXcd state = vectors * amp;
      tr.norm2[i] = state.squaredNorm();
      if (bath == BathOutput::full) tr.bath.col(static_cast<Eigen::Index>(i)) = carrier * state.tail(n - 2);
    }
  }
  return tr;
}

double max_ode_step(const SystemParams& p) {
  const double n = static_cast<double>(p.n_bath);
  const double fmax = std::abs(p.omega0) + n * p.delta_omega / 2.0 + p.omega_big + p.g * std::sqrt(n);
  return 0.1 / fmax;
}

namespace {

// y = -i H x using the arrowhead-plus-edge structure.
void apply_generator(const SystemParams& p, const Eigen::VectorXd& diag, const Eigen::VectorXcd& x,
                     Eigen::VectorXcd& y) {
  const Eigen::Index nb = static_cast<Eigen::Index>(p.n_bath);
  const cplx mi{0.0, -1.0};
  const cplx bath_sum = x.tail(nb).sum();
  y(0) = mi * (p.omega0 * x(0) + p.omega_big * x(1) + p.g * bath_sum);
  y(1) = mi * (p.omega0 * x(1) + p.omega_big * x(0));
  y.tail(nb) = mi * (diag.array() * x.tail(nb).array() + p.g * x(0)).matrix();
}

}  // namespace

Trajectory integrate_ode(const SystemParams& p, const InitialState& init, double t_max, double dt,
                         std::size_t record_every, BathOutput bath) {
  p.validate();
  init.validate_for(p);
  if (!(t_max >= 0.0)) throw InvalidArgument("t_max must be >= 0");
  if (!(dt > 0.0) || dt > max_ode_step(p) * (1.0 + 1e-12))
    throw InvalidArgument("RK4 step rejected: dt must be in (0, " + csv::num(max_ode_step(p)) + "]");
  if (record_every < 1) throw InvalidArgument("record_every must be >= 1");

  const auto steps = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
  const double h = steps == 0 ? 0.0 : t_max / static_cast<double>(steps);
  const Eigen::Index nb = static_cast<Eigen::Index>(p.n_bath);
  Eigen::VectorXd diag(nb);
  for (Eigen::Index k = 0; k < nb; ++k) diag(k) = bath_frequency(p, static_cast<std::size_t>(k) + 1);

  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(nb + 2);
  x(0) = init.a1_0;
  x(1) = init.a2_0;
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(init.bath_0.size()); ++k)
    x(k + 2) = init.bath_0[static_cast<std::size_t>(k)];

  Trajectory tr;
  tr.grid = {0.0, h * static_cast<double>(record_every), steps / record_every + 1};
  tr.params_id = params_id(p);
  tr.a1.reserve(tr.grid.count);
  tr.a2.reserve(tr.grid.count);
  if (bath == BathOutput::full) tr.bath.resize(nb, static_cast<Eigen::Index>(tr.grid.count));
  auto record = [&] {
    const auto i = static_cast<Eigen::Index>(tr.a1.size());
    tr.a1.push_back(x(0));
    tr.a2.push_back(x(1));
    if (bath != BathOutput::none) tr.norm2.push_back(x.squaredNorm());
    if (bath == BathOutput::full) tr.bath.col(i) = x.tail(nb);
  };

  Eigen::VectorXcd k1(nb + 2), k2(nb + 2), k3(nb + 2), k4(nb + 2), tmp(nb + 2);
  record();
  for (std::size_t s = 1; s <= steps; ++s) {
    apply_generator(p, diag, x, k1);
    tmp = x + (h / 2.0) * k1;
    apply_generator(p, diag, tmp, k2);
    tmp = x + (h / 2.0) * k2;
    apply_generator(p, diag, tmp, k3);
    tmp = x + h * k3;
    apply_generator(p, diag, tmp, k4);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (s % record_every == 0) record();
  }
  return tr;
}

double sampling_step(const SystemParams& p) {
  const double fmax = p.bandwidth() / 2.0 + p.omega_big + p.gamma();
  return 2.0 * std::numbers::pi / (20.0 * fmax);
}

TimeGrid sampling_grid(const SystemParams& p, double stop, double start) {
  return TimeGrid::with_max_step(start, stop, sampling_step(p));
}

HeadKernels head_kernels(const EigenBasis& basis, const TimeGrid& grid) {
  constexpr std::size_t resync = 256;
  const Eigen::Index n = basis.size();
  const Eigen::ArrayXd e1 = basis.vectors.row(0).transpose().array();
  const Eigen::ArrayXd e2 = basis.vectors.row(1).transpose().array();
  const Eigen::ArrayXd w11 = e1 * e1, w12 = e1 * e2, w22 = e2 * e2;
  const Eigen::ArrayXd phi = basis.offsets.array();
  const Eigen::ArrayXd step_re = (phi * grid.dt).cos();
  const Eigen::ArrayXd step_im = -(phi * grid.dt).sin();

  HeadKernels out;
  out.grid = grid;
  out.basis_id = basis.id;
  out.s11.resize(grid.count);
  out.s12.resize(grid.count);
  out.s22.resize(grid.count);
  Eigen::ArrayXd re(n), im(n), next(n);
  for (std::size_t i = 0; i < grid.count; ++i) {
    if (i % resync == 0) {
      const Eigen::ArrayXd arg = -phi * grid.at(i);
      re = arg.cos();
      im = arg.sin();
    }
    out.s11[i] = {(w11 * re).sum(), (w11 * im).sum()};
    out.s12[i] = {(w12 * re).sum(), (w12 * im).sum()};
    out.s22[i] = {(w22 * re).sum(), (w22 * im).sum()};
    next = re * step_re - im * step_im;
    im = re * step_im + im * step_re;
    re = next;
  }
  return out;
}

AbsMeans time_average_abs(const Trajectory& traj) {
  if (traj.a1.empty()) throw InvalidArgument("empty trajectory");
  std::vector<double> m1(traj.a1.size()), m2(traj.a2.size());
  for (std::size_t i = 0; i < m1.size(); ++i) {
    m1[i] = std::abs(traj.a1[i]);
    m2[i] = std::abs(traj.a2[i]);
  }
  return {trapezoid_mean(m1, traj.grid.dt), trapezoid_mean(m2, traj.grid.dt)};
}

double guarded_ratio(const AbsMeans& m) {
  if (m.a2 < 1e-14) throw NumericalError("time-averaged |a2| below 1e-14");
  return m.a1 / m.a2;
}

double amplitude_ratio(const SystemParams& p, const InitialState& init, double t_max) {
  const EigenBasis basis = diagonalize(build_matrix(p));
  const TimeGrid grid = sampling_grid(p, t_max);
  if (init.bath_0.empty()) return amplitude_ratio(head_kernels(basis, grid), init.a1_0, init.a2_0);
  return guarded_ratio(time_average_abs(propagate(basis, project_initial(basis, init), grid)));
}

double amplitude_ratio(const HeadKernels& k, cplx a1, cplx a2) {
  const std::size_t n = k.s11.size();
  if (n == 0) throw InvalidArgument("empty kernel series");
  std::vector<double> m1(n), m2(n);
  for (std::size_t i = 0; i < n; ++i) {
    m1[i] = std::abs(a1 * k.s11[i] + a2 * k.s12[i]);
    m2[i] = std::abs(a1 * k.s12[i] + a2 * k.s22[i]);
  }
  return guarded_ratio({trapezoid_mean(m1, k.grid.dt), trapezoid_mean(m2, k.grid.dt)});
}

std::vector<std::optional<double>> phase_difference(const Trajectory& traj) {
  std::vector<std::optional<double>> out(traj.a1.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (std::abs(traj.a1[i]) <= 1e-14 || std::abs(traj.a2[i]) <= 1e-14) continue;
    double d = std::arg(traj.a1[i] * std::conj(traj.a2[i]));
    if (d <= -std::numbers::pi) d = std::numbers::pi;
    out[i] = d;
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const auto dphi = phase_difference(traj);
  csv::header(out, "t,abs_a1,abs_a2,dphi");
  for (std::size_t i = 0; i < traj.a1.size(); ++i)
    csv::row(out, {traj.grid.at(i), std::abs(traj.a1[i]), std::abs(traj.a2[i]),
                   dphi[i].value_or(std::numeric_limits<double>::quiet_NaN())});
}

}  // namespace sse
