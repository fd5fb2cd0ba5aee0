#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "sse/csv.hpp"
#include "sse/dynamics.hpp"
#include "sse/errors.hpp"
#include "sse/parallel.hpp"
#include "sse/reduction.hpp"

namespace sse {

std::pair<cplx, cplx> random_phase_state(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(index) >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const double t1 = angle(rng);
  const double t2 = angle(rng);
  return {std::polar(1.0, t1), std::polar(1.0, t2)};
}

namespace {

EnsembleStats reduce_in_order(const std::vector<double>& r) {
  double sum = 0.0;
  for (double x : r) sum += x;
  const double mean = sum / static_cast<double>(r.size());
  if (r.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : r) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(r.size() - 1))};
}

EnsembleStats ensemble_over(const HeadKernels& k, std::size_t n_states, std::uint64_t seed,
                            unsigned threads) {
  std::vector<double> r(n_states);
  parallel_for(n_states, threads, [&](std::size_t i) {
    const auto [a1, a2] = random_phase_state(seed, i);
    r[i] = amplitude_ratio(k, a1, a2);
  });
  return reduce_in_order(r);
}

}  // namespace

EnsembleStats ensemble_ratio(const SystemParams& p, std::size_t n_states, double t_max,
                             std::uint64_t seed, unsigned threads) {
  if (n_states < 1) throw InvalidArgument("ensemble needs at least one state");
  const EigenBasis basis = diagonalize(build_matrix(p));
  return ensemble_over(head_kernels(basis, sampling_grid(p, t_max)), n_states, seed, threads);
}

RatioCurve ratio_sweep(const SystemParams& p, std::span<const double> omega_grid,
                       double t_max_in_tr, const EnsembleSpec& spec, unsigned threads) {
  if (omega_grid.empty()) throw InvalidArgument("omega grid is empty");
  if (!std::is_sorted(omega_grid.begin(), omega_grid.end()))
    throw InvalidArgument("omega grid must be ascending");
  if (!(t_max_in_tr > 0.0)) throw InvalidArgument("t_max must be > 0");
  if (spec.mode == InitMode::random && spec.n_states < 1)
    throw InvalidArgument("ensemble needs at least one state");
  if (spec.mode == InitMode::eigenplus && omega_grid.front() <= 0.0)
    throw InvalidArgument("eigenplus initial state needs Omega > 0");

  RatioCurve curve;
  curve.n_bath = p.n_bath;
  curve.t_max_in_tr = t_max_in_tr;
  curve.ensemble_size = spec.mode == InitMode::random ? spec.n_states : 1;
  curve.seed = spec.seed;
  curve.mode = spec.mode;
  curve.points.resize(omega_grid.size());
  const double t_max = t_max_in_tr * p.t_return();

  parallel_for(omega_grid.size(), threads, [&](std::size_t i) {
    const SystemParams q = with_omega(p, omega_grid[i]);
    const HeadKernels k = head_kernels(diagonalize(build_matrix(q)), sampling_grid(q, t_max));
    EnsembleStats s{};
    switch (spec.mode) {
      case InitMode::random:
        s = ensemble_over(k, spec.n_states, spec.seed, 1);
        break;
      case InitMode::unit:
        s = {amplitude_ratio(k, 1.0, 1.0), 0.0};
        break;
      case InitMode::eigenplus: {
        const auto e = nh_eigensystem(reduce(q)).e_plus;
        s = {amplitude_ratio(k, e[0], e[1]), 0.0};
        break;
      }
    }
    curve.points[i] = {omega_grid[i], s.mean, s.dispersion};
  });
  return curve;
}

std::vector<CurveSlope> finite_difference_slopes(const RatioCurve& curve) {
  std::vector<CurveSlope> out;
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    const auto& a = curve.points[i];
    const auto& b = curve.points[i + 1];
    if (b.omega == a.omega) continue;
    out.push_back({0.5 * (a.omega + b.omega), (b.ratio - a.ratio) / (b.omega - a.omega)});
  }
  return out;
}

double knee_omega(const RatioCurve& curve) {
  const auto s = finite_difference_slopes(curve);
  if (s.empty()) throw InvalidArgument("knee needs at least two distinct points");
  return std::max_element(s.begin(), s.end(),
                          [](const CurveSlope& x, const CurveSlope& y) { return x.slope < y.slope; })
      ->omega_mid;
}

double max_slope_in(const RatioCurve& curve, double lo, double hi) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& s : finite_difference_slopes(curve))
    if (s.omega_mid >= lo && s.omega_mid <= hi) best = std::max(best, s.slope);
  if (!std::isfinite(best)) throw InvalidArgument("no curve segment inside the slope window");
  return best;
}

void write_ratio_csv(std::ostream& out, const RatioCurve& curve) {
  csv::header(out, "omega,ratio,dispersion,n_bath,t_max_TR,ensemble,seed");
  for (const auto& pt : curve.points) {
    out << csv::num(pt.omega) << ',' << csv::num(pt.ratio) << ',' << csv::num(pt.dispersion)
        << ',' << curve.n_bath << ',' << csv::num(curve.t_max_in_tr) << ','
        << curve.ensemble_size << ',' << curve.seed << '\n';
  }
}

}  // namespace sse
