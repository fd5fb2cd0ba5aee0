#include "sse/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sse/errors.hpp"

namespace sse {

void NhParams::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be >= 0");
  if (!(omega_big >= 0.0) || !std::isfinite(omega_big))
    throw InvalidArgument("omega_big must be >= 0");
  if (!std::isfinite(omega0)) throw InvalidArgument("omega0 must be finite");
}

NhParams reduce(const SystemParams& p) { return {p.gamma(), p.omega_big, p.omega0}; }

NhEigensystem nh_eigensystem(const NhParams& p) {
  p.validate();
  const double g = p.gamma, w = p.omega_big, w0 = p.omega0;
  NhEigensystem es;
  if (w == 0.0) {
    es.lambda_plus = {0.0, -w0};
    es.lambda_minus = {-g, -w0};
    es.e_plus = {cplx{0.0, 0.0}, cplx{1.0, 0.0}};
    es.e_minus = {cplx{1.0, 0.0}, cplx{0.0, 0.0}};
    return es;
  }
  const double disc = g * g - 4.0 * w * w;
  if (disc > 0.0) {
    // Real split of the decay rates; the carrier is shared.
    const double s = std::sqrt(disc);
    const double mu_plus = -2.0 * w * w / (g + s);  // (-g + s)/2 without cancellation
    const double mu_minus = -(g + s) / 2.0;
    es.lambda_plus = {mu_plus, -w0};
    es.lambda_minus = {mu_minus, -w0};
    es.e_plus = {cplx{0.0, mu_plus / w}, cplx{1.0, 0.0}};
    es.e_minus = {cplx{0.0, mu_minus / w}, cplx{1.0, 0.0}};
  } else {
    // Shared decay rate; first components have unit modulus.
    const double r = std::sqrt(-disc);
    es.lambda_plus = {-g / 2.0, -w0 + r / 2.0};
    es.lambda_minus = {-g / 2.0, -w0 - r / 2.0};
    es.e_plus = {std::polar(1.0, std::atan2(-g, -r)), cplx{1.0, 0.0}};
    es.e_minus = {std::polar(1.0, std::atan2(-g, r)), cplx{1.0, 0.0}};
  }
  return es;
}

namespace {

// cosh(sqrt(z)) and sinh(sqrt(z))/sqrt(z) for real z of either sign.
void cosh_sinhc(double z, double& c, double& sc) {
  if (std::abs(z) < 1e-6) {
    c = 1.0 + z / 2.0 + z * z / 24.0;
    sc = 1.0 + z / 6.0 + z * z / 120.0;
  } else if (z > 0.0) {
    const double r = std::sqrt(z);
    c = std::cosh(r);
    sc = std::sinh(r) / r;
  } else {
    const double r = std::sqrt(-z);
    c = std::cos(r);
    sc = std::sin(r) / r;
  }
}

}  // namespace

Trajectory nh_propagate(const NhParams& p, std::array<cplx, 2> init, const TimeGrid& grid) {
  p.validate();
  Trajectory tr;
  tr.grid = grid;
  tr.a1.resize(grid.count);
  tr.a2.resize(grid.count);
  const double g = p.gamma, w = p.omega_big;
  const bool near_ep = g > 0.0 && std::abs(w - g / 2.0) < ep_window * g;

  if (near_ep) {
    // exp(Mt) = exp(lbar t) (cosh(sqrt(d) t) I + t sinhc K), K^2 = d I.
    const cplx lbar{-g / 2.0, -p.omega0};
    const double d = g * g / 4.0 - w * w;
    const cplx mi{0.0, -1.0};
    for (std::size_t i = 0; i < grid.count; ++i) {
      const double t = grid.at(i);
      double c = 0.0, sc = 0.0;
      cosh_sinhc(d * t * t, c, sc);
      const cplx e = std::exp(lbar * t);
      const cplx k1 = -g / 2.0 * init[0] + mi * w * init[1];
      const cplx k2 = mi * w * init[0] + g / 2.0 * init[1];
      tr.a1[i] = e * (c * init[0] + t * sc * k1);
      tr.a2[i] = e * (c * init[1] + t * sc * k2);
    }
    return tr;
  }

  const NhEigensystem es = nh_eigensystem(p);
  // Solve [e+ e-] (c+, c-)^T = init.
  const cplx det = es.e_plus[0] * es.e_minus[1] - es.e_minus[0] * es.e_plus[1];
  const cplx cp = (init[0] * es.e_minus[1] - es.e_minus[0] * init[1]) / det;
  const cplx cm = (es.e_plus[0] * init[1] - init[0] * es.e_plus[1]) / det;
  for (std::size_t i = 0; i < grid.count; ++i) {
    const double t = grid.at(i);
    const cplx fp = cp * std::exp(es.lambda_plus * t);
    const cplx fm = cm * std::exp(es.lambda_minus * t);
    tr.a1[i] = fp * es.e_plus[0] + fm * es.e_minus[0];
    tr.a2[i] = fp * es.e_plus[1] + fm * es.e_minus[1];
  }
  return tr;
}

RatioCurve nh_ratio_curve(double gamma, double omega0, std::span<const double> omega_grid,
                          double t_max) {
  if (omega_grid.empty()) throw InvalidArgument("omega grid is empty");
  if (!(t_max > 0.0)) throw InvalidArgument("t_max must be > 0");
  RatioCurve curve;
  curve.ensemble_size = 1;
  curve.mode = InitMode::eigenplus;
  for (double w : omega_grid) {
    const NhParams p{gamma, w, omega0};
    const auto e = nh_eigensystem(p).e_plus;
    const double fmax = std::max(w + gamma, 1.0 / t_max);
    const TimeGrid grid = TimeGrid::with_max_step(0.0, t_max, 2.0 * std::numbers::pi / (20.0 * fmax));
    const Trajectory tr = nh_propagate(p, e, grid);
    curve.points.push_back({w, guarded_ratio(time_average_abs(tr)), 0.0});
  }
  return curve;
}

ModulusDeviation modulus_deviation(const Trajectory& x, const Trajectory& y, double scale) {
  if (!(x.grid == y.grid) || x.size() != y.size())
    throw InvalidArgument("modulus deviation needs trajectories on the same grid");
  if (!(scale > 0.0)) throw InvalidArgument("modulus deviation scale must be > 0");
  ModulusDeviation d{x.grid, {}, {}};
  d.head1.resize(x.size());
  d.head2.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    d.head1[i] = std::abs(std::abs(x.a1[i]) - std::abs(y.a1[i])) / scale;
    d.head2[i] = std::abs(std::abs(x.a2[i]) - std::abs(y.a2[i])) / scale;
  }
  return d;
}

double ModulusDeviation::max_in(double t0, double t1) const {
  double m = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < head1.size(); ++i) {
    const double t = grid.at(i);
    if (t < t0 || t > t1) continue;
    const double v = std::max(head1[i], head2[i]);
    m = std::isnan(m) ? v : std::max(m, v);
  }
  return m;
}

double noisy_split_threshold(double g1, double g2, double t1, double t2) {
  const double weight = g2 * t2 + 2.0 * g1 * t1;
  if (!(weight > 0.0)) throw NumericalError("split formula: nonpositive denominator");
  const double num = g2 * g2 * g1 * t1 + g1 * g1 * g1 * t1 - 2.0 * g1 * g1 * g2 * t2 -
                     2.0 * g2 * g2 * g1 * t2;
  const double b = g1 * (g1 * g1 + g2 * g2) * t1 - 2.0 * g1 * g2 * (g1 + g2) * t2;
  const double rad = 4.0 * g2 * g1 * g1 * g1 * g1 * t2 * weight + b * b;
  if (rad < 0.0) throw NumericalError("split formula: negative radicand");
  const double omega2 = (num + std::sqrt(rad)) / (2.0 * weight);
  if (!(omega2 > 0.0)) throw NumericalError("split formula: no positive split coupling");
  return std::sqrt(omega2);
}

}  // namespace sse
