#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "../oracles/oracles.hpp"
#include "../support/desk.hpp"
#include "sse/dynamics.hpp"
#include "sse/errors.hpp"

namespace {

using sse::cplx;
using sse::InitialState;
using sse::SystemParams;

SystemParams make(std::size_t n, double dw, double g, double omega, double w0 = 0.0) {
  SystemParams p;
  p.n_bath = n;
  p.delta_omega = dw;
  p.g = g;
  p.omega_big = omega;
  p.omega0 = w0;
  return p;
}

sse::EigenBasis basis_of(const SystemParams& p) { return sse::diagonalize(sse::build_matrix(p)); }

TEST(ProjectInitial, EigenvectorGivesUnitCoefficients) {
  const auto b = basis_of(sse::test::desk(30, 0.8));
  const Eigen::Index m = 7;
  InitialState s;
  s.a1_0 = b.vectors(0, m);
  s.a2_0 = b.vectors(1, m);
  for (Eigen::Index i = 2; i < b.vectors.rows(); ++i) s.bath_0.emplace_back(b.vectors(i, m));
  const auto c = sse::project_initial(b, s);
  for (std::size_t k = 0; k < c.coeffs.size(); ++k)
    EXPECT_NEAR(std::abs(c.coeffs[k] - (static_cast<Eigen::Index>(k) == m ? 1.0 : 0.0)), 0.0, 1e-12);
}

TEST(ProjectInitial, ReconstructsHeadsAndNorm) {
  const auto b = basis_of(sse::test::desk(60, 1.3));
  const auto c = sse::project_initial(b, InitialState::heads(1.0, 0.0));
  cplx r1{}, r2{};
  for (Eigen::Index k = 0; k < b.size(); ++k) {
    r1 += c.coeffs[static_cast<std::size_t>(k)] * b.vectors(0, k);
    r2 += c.coeffs[static_cast<std::size_t>(k)] * b.vectors(1, k);
  }
  EXPECT_NEAR(std::abs(r1 - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(r2), 0.0, 1e-12);
  const auto c2 = sse::project_initial(b, InitialState::heads({0.6, 0.2}, {-0.3, 0.9}));
  EXPECT_NEAR(c2.norm2(), 0.36 + 0.04 + 0.09 + 0.81, 1e-10);
}

TEST(ProjectInitial, DimensionMismatch) {
  const auto b = basis_of(sse::test::desk(10));
  InitialState s;
  s.bath_0.resize(9);
  EXPECT_THROW(sse::project_initial(b, s), sse::InvalidArgument);
}

TEST(Propagate, ReproducesInitialStateAtZero) {
  const auto b = basis_of(sse::test::desk(80, 0.7));
  const auto init = InitialState::heads({0.3, -0.4}, {0.5, 0.1});
  const auto tr = sse::propagate(b, sse::project_initial(b, init), {0.0, 1.0, 1});
  EXPECT_LE(std::abs(tr.a1[0] - init.a1_0), 1e-12);
  EXPECT_LE(std::abs(tr.a2[0] - init.a2_0), 1e-12);
}

TEST(Propagate, ClosedRabiPair) {
  const auto p = make(3, 0.5, 0.0, std::numbers::pi / 2.0);
  const auto b = basis_of(p);
  const auto tr = sse::propagate(b, sse::project_initial(b, InitialState::heads(1.0, 0.0)),
                                 sse::TimeGrid::covering(0.0, 1.0, 11));
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double t = tr.grid.at(i);
    EXPECT_NEAR(std::abs(tr.a1[i] - std::cos(p.omega_big * t)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(tr.a2[i] - cplx(0.0, -std::sin(p.omega_big * t))), 0.0, 1e-12);
  }
  EXPECT_NEAR(std::abs(tr.a1.back()), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(tr.a2.back() - cplx(0.0, -1.0)), 0.0, 1e-12);
}

TEST(Propagate, RejectsForeignCoefficients) {
  const auto b1 = basis_of(sse::test::desk(10, 0.5));
  const auto b2 = basis_of(sse::test::desk(10, 0.6));
  EXPECT_THROW(sse::propagate(b2, sse::project_initial(b1, {}), {0, 1, 2}), sse::InvalidArgument);
}

TEST(Propagate, NormConservedOverLongHorizon) {
  const auto p = sse::test::desk(50, 0.5);
  const auto b = basis_of(p);
  const auto init = InitialState::heads(1.0, 1.0);
  const auto tr = sse::propagate(b, sse::project_initial(b, init),
                                 sse::TimeGrid::covering(0.0, 25.0 * p.t_return(), 2001),
                                 sse::BathOutput::norm);
  for (double n2 : tr.norm2) EXPECT_LE(std::abs(n2 - 2.0), 1e-10 * 2.0);
}

TEST(Propagate, GlobalPhaseInvariance) {
  const auto p = sse::test::desk(60, 1.1);
  const auto b = basis_of(p);
  const auto grid = sse::TimeGrid::covering(0.0, 2.0 * p.t_return(), 501);
  const cplx a1{0.8, 0.1}, a2{-0.2, 0.7}, ph = std::polar(1.0, 1.234);
  const auto x = sse::propagate(b, sse::project_initial(b, InitialState::heads(a1, a2)), grid);
  const auto y = sse::propagate(b, sse::project_initial(b, InitialState::heads(ph * a1, ph * a2)), grid);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(std::abs(x.a1[i]), std::abs(y.a1[i]), 1e-12);
    EXPECT_NEAR(std::abs(x.a2[i]), std::abs(y.a2[i]), 1e-12);
  }
}

TEST(Propagate, CarrierInvariance) {
  auto p = sse::test::desk(60, 0.9);
  auto q = p;
  q.omega0 = 1e3 * p.gamma();
  const auto grid = sse::TimeGrid::covering(0.0, 3.0 * p.t_return(), 701);
  const auto init = InitialState::heads(1.0, {0.0, 1.0});
  const auto bp = basis_of(p), bq = basis_of(q);
  const auto x = sse::propagate(bp, sse::project_initial(bp, init), grid);
  const auto y = sse::propagate(bq, sse::project_initial(bq, init), grid);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(std::abs(x.a1[i]), std::abs(y.a1[i]), 1e-10);
    EXPECT_NEAR(std::abs(x.a2[i]), std::abs(y.a2[i]), 1e-10);
  }
}

TEST(IntegrateOde, DecoupledHeadsKeepModulus) {
  const auto p = make(4, 0.1, 0.0, 0.0);
  const double dt = sse::max_ode_step(p);
  const auto tr = sse::integrate_ode(p, InitialState::heads({0.6, 0.8}, {0.0, 1.0}), 1e4 * dt, dt);
  ASSERT_EQ(tr.size(), 10001u);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_NEAR(std::abs(tr.a1[i]), 1.0, 1e-10);
    EXPECT_NEAR(std::abs(tr.a2[i]), 1.0, 1e-10);
  }
}

TEST(IntegrateOde, StepRejection) {
  const auto p = sse::test::desk(50, 0.5);
  EXPECT_THROW(sse::integrate_ode(p, {}, 1.0, 1.01 * sse::max_ode_step(p)), sse::InvalidArgument);
  EXPECT_THROW(sse::integrate_ode(p, {}, 1.0, 0.0), sse::InvalidArgument);
}

TEST(IntegrateOde, MatchesSpectralWithCarrier) {
  // Nonzero carrier through the full-H integrator against the rotating-frame basis.
  auto p = sse::test::desk(20, 0.7);
  p.omega0 = 3.0;
  const double t_max = 0.5 * p.t_return();
  const double dt = sse::max_ode_step(p) / 8.0;
  const auto init = InitialState::heads(1.0, {0.0, 1.0});
  const auto ode = sse::integrate_ode(p, init, t_max, dt, 50);
  const auto b = basis_of(p);
  const auto spec = sse::propagate(b, sse::project_initial(b, init), ode.grid);
  for (std::size_t i = 0; i < ode.size(); ++i) {
    EXPECT_LE(std::abs(ode.a1[i] - spec.a1[i]), 1e-6);
    EXPECT_LE(std::abs(ode.a2[i] - spec.a2[i]), 1e-6);
  }
}

TEST(IntegrateOde, NormDriftAtPreconditionStep) {
  // Each eigenmode is scaled per step by the RK4 stability polynomial, so the
  // norm drift is known exactly: sum_k |c_k|^2 |R(-i f_k h)|^(2n).
  const auto p = sse::test::desk(50, 0.5);
  const double dt = sse::max_ode_step(p);
  const auto init = InitialState::heads(1.0, 1.0);
  const auto tr = sse::integrate_ode(p, init, p.t_return(), dt, 1, sse::BathOutput::norm);
  const auto b = basis_of(p);
  const auto c = sse::project_initial(b, init);
  const double h = tr.grid.dt;
  auto predicted = [&](std::size_t steps) {
    double n2 = 0.0;
    for (Eigen::Index k = 0; k < b.size(); ++k) {
      const cplx z{0.0, -b.freq(k) * h};
      const cplx r = 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0;
      n2 += std::norm(c.coeffs[static_cast<std::size_t>(k)]) * std::pow(std::norm(r), static_cast<double>(steps));
    }
    return n2;
  };
  double drift = 0.0;
  for (std::size_t i = 0; i < tr.norm2.size(); i += 50) {
    EXPECT_NEAR(tr.norm2[i], predicted(i), 1e-12) << i;
    drift = std::max(drift, std::abs(tr.norm2[i] - 2.0) / 2.0);
  }
  EXPECT_GT(drift, 0.0);
  EXPECT_LT(drift, 1e-7);
}

TEST(HeadKernels, MatchDirectSums) {
  const auto p = sse::test::desk(120, 1.1);
  const auto b = basis_of(p);
  const auto grid = sse::sampling_grid(p, 3.0 * p.t_return());
  const auto k = sse::head_kernels(b, grid);
  const Eigen::VectorXd e1 = b.vectors.row(0).transpose(), e2 = b.vectors.row(1).transpose();
  const Eigen::VectorXd w11 = e1.cwiseProduct(e1), w12 = e1.cwiseProduct(e2), w22 = e2.cwiseProduct(e2);
  for (std::size_t i = 0; i < grid.count; i += 97) {
    const double t = grid.at(i);
    EXPECT_LE(std::abs(k.s11[i] - sse::oracle::direct_phasor_sum(w11, b.offsets, t)), 1e-12);
    EXPECT_LE(std::abs(k.s12[i] - sse::oracle::direct_phasor_sum(w12, b.offsets, t)), 1e-12);
    EXPECT_LE(std::abs(k.s22[i] - sse::oracle::direct_phasor_sum(w22, b.offsets, t)), 1e-12);
  }
  const auto last = grid.count - 1;
  EXPECT_LE(std::abs(k.s11[last] - sse::oracle::direct_phasor_sum(w11, b.offsets, grid.at(last))), 1e-12);
}

TEST(HeadKernels, AgreeWithPropagate) {
  const auto p = sse::test::desk(80, 0.6);
  const auto b = basis_of(p);
  const auto grid = sse::TimeGrid::covering(0.0, 2.0 * p.t_return(), 300);
  const cplx a1{0.3, 0.4}, a2{-0.5, 0.2};
  const auto k = sse::head_kernels(b, grid);
  const auto tr = sse::propagate(b, sse::project_initial(b, InitialState::heads(a1, a2)), grid);
  for (std::size_t i = 0; i < grid.count; ++i) {
    EXPECT_LE(std::abs(a1 * k.s11[i] + a2 * k.s12[i] - tr.a1[i]), 1e-12);
    EXPECT_LE(std::abs(a1 * k.s12[i] + a2 * k.s22[i] - tr.a2[i]), 1e-12);
  }
}

TEST(SamplingGrid, PolicyStep) {
  const auto p = sse::test::desk(400, 1.0);
  const double expect = 2.0 * std::numbers::pi / (20.0 * (0.5 + p.omega_big + p.gamma()));
  EXPECT_DOUBLE_EQ(sse::sampling_step(p), expect);
  const auto g = sse::sampling_grid(p, 100.0);
  EXPECT_LE(g.dt, expect);
  EXPECT_DOUBLE_EQ(g.stop(), 100.0);
  EXPECT_EQ(g.count, static_cast<std::size_t>(std::ceil(100.0 / expect)) + 1);
}

TEST(TimeAverage, AbsSineMean) {
  sse::Trajectory tr;
  tr.grid = sse::TimeGrid::covering(0.0, 2.0 * std::numbers::pi, 10000);
  for (std::size_t i = 0; i < tr.grid.count; ++i) {
    tr.a1.emplace_back(std::sin(tr.grid.at(i)));
    tr.a2.emplace_back(0.25, 0.0);
  }
  const auto m = sse::time_average_abs(tr);
  EXPECT_NEAR(m.a1, 2.0 / std::numbers::pi, 1e-6);
  EXPECT_DOUBLE_EQ(m.a2, 0.25);
}

TEST(TimeAverage, EmptyTrajectory) {
  EXPECT_THROW(sse::time_average_abs(sse::Trajectory{}), sse::InvalidArgument);
}

TEST(TimeAverage, IsolatedSecondOscillator) {
  const auto p = sse::test::desk(40, 0.0);
  const auto b = basis_of(p);
  const auto tr = sse::propagate(b, sse::project_initial(b, InitialState::heads(1.0, {0.0, 0.5})),
                                 sse::sampling_grid(p, 2.0 * p.t_return()));
  EXPECT_NEAR(sse::time_average_abs(tr).a2, 0.5, 1e-12);
}

TEST(AmplitudeRatio, SymmetricClosedPair) {
  for (double t_max : {1.0, 37.0, 500.0}) {
    const double r = sse::amplitude_ratio(make(6, 0.05, 0.0, 0.3), InitialState::heads(1.0, 1.0), t_max);
    EXPECT_NEAR(r, 1.0, 1e-12) << t_max;
  }
}

TEST(AmplitudeRatio, DivisionGuard) {
  sse::HeadKernels k;
  k.grid = {0.0, 1.0, 3};
  k.s11.assign(3, 1.0);
  k.s12.assign(3, 0.0);
  k.s22.assign(3, 0.0);
  EXPECT_THROW(sse::amplitude_ratio(k, 1.0, 0.0), sse::NumericalError);
}

TEST(AmplitudeRatio, BathInitialStateUsesFullPropagation) {
  const auto p = sse::test::desk(30, 1.0);
  InitialState s = InitialState::heads(1.0, 1.0);
  const double heads_only = sse::amplitude_ratio(p, s, 2.0 * p.t_return());
  s.bath_0.assign(30, 0.0);
  EXPECT_NEAR(sse::amplitude_ratio(p, s, 2.0 * p.t_return()), heads_only, 1e-10);
}

TEST(Ensemble, RandomPhasesHaveUnitModulusAndOwnStreams) {
  const auto [a, b] = sse::random_phase_state(42, 0);
  EXPECT_NEAR(std::abs(a), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(b), 1.0, 1e-15);
  const auto again = sse::random_phase_state(42, 0);
  EXPECT_EQ(a, again.first);
  EXPECT_NE(a, sse::random_phase_state(42, 1).first);
  EXPECT_NE(a, sse::random_phase_state(43, 0).first);
}

TEST(Ensemble, DeterministicAndThreadIndependent) {
  const auto p = sse::test::desk(50, 1.0);
  const auto x = sse::ensemble_ratio(p, 40, 3.0 * p.t_return(), 9, 1);
  const auto y = sse::ensemble_ratio(p, 40, 3.0 * p.t_return(), 9, 4);
  EXPECT_EQ(x.mean, y.mean);
  EXPECT_EQ(x.dispersion, y.dispersion);
  EXPECT_GT(x.dispersion, 0.0);
  EXPECT_THROW(sse::ensemble_ratio(p, 0, 1.0, 1), sse::InvalidArgument);
}

TEST(Ensemble, DecoupledPairIsStatisticallySymmetric) {
  const auto s = sse::ensemble_ratio(make(8, 0.05, 0.0, 0.4), 400, 200.0, 3);
  EXPECT_NEAR(s.mean, 1.0, 3.0 * s.dispersion / std::sqrt(400.0));
}

TEST(PhaseDifference, ClosedPair) {
  const auto p = make(4, 0.05, 0.0, 0.4);
  const auto b = basis_of(p);
  const auto grid = sse::TimeGrid::covering(0.0, 30.0, 301);
  const auto same = sse::phase_difference(
      sse::propagate(b, sse::project_initial(b, InitialState::heads(1.0, 1.0)), grid));
  for (const auto& d : same) {
    ASSERT_TRUE(d.has_value());
    EXPECT_NEAR(*d, 0.0, 1e-12);
  }
  const auto quad = sse::phase_difference(
      sse::propagate(b, sse::project_initial(b, InitialState::heads(1.0, {0.0, 1.0})), grid));
  for (const auto& d : quad) {
    if (!d) continue;  // a zero of one amplitude
    // a1 conj(a2) = -i cos(2 Omega t): quadrature with a sign that follows the beat
    EXPECT_NEAR(std::abs(*d), std::numbers::pi / 2.0, 1e-9);
  }
}

TEST(PhaseDifference, UndefinedAndPrincipalRange) {
  sse::Trajectory tr;
  tr.grid = {0.0, 1.0, 3};
  tr.a1 = {0.0, -1.0, 1.0};
  tr.a2 = {1.0, 1.0, cplx(0.0, 1.0)};
  const auto d = sse::phase_difference(tr);
  EXPECT_FALSE(d[0].has_value());
  EXPECT_DOUBLE_EQ(*d[1], std::numbers::pi);
  EXPECT_DOUBLE_EQ(*d[2], -std::numbers::pi / 2.0);
}

TEST(PhaseDifference, VariesBetweenRevivalsBelowThreshold) {
  const auto p = sse::test::desk(200, 0.5);
  const auto b = basis_of(p);
  const auto grid = sse::TimeGrid::covering(1.2 * p.t_return(), 1.8 * p.t_return(), 400);
  const auto d = sse::phase_difference(
      sse::propagate(b, sse::project_initial(b, InitialState::heads(1.0, 1.0)), grid));
  double lo = 10, hi = -10;
  for (const auto& x : d)
    if (x) lo = std::min(lo, *x), hi = std::max(hi, *x);
  EXPECT_GT(hi - lo, 0.05);
}

TEST(RatioSweep, ValidationAndOrdering) {
  const auto p = sse::test::desk(40);
  const std::vector<double> none, unsorted{0.2, 0.1};
  EXPECT_THROW(sse::ratio_sweep(p, none, 1.0, {}), sse::InvalidArgument);
  EXPECT_THROW(sse::ratio_sweep(p, unsorted, 1.0, {}), sse::InvalidArgument);
  const std::vector<double> with_zero{0.0, 0.01};
  EXPECT_THROW(sse::ratio_sweep(p, with_zero, 1.0, {sse::InitMode::eigenplus, 1, 1}),
               sse::InvalidArgument);
}

TEST(RatioSweep, ThreadIndependentAndPositive) {
  const auto p = sse::test::desk(40);
  std::vector<double> grid;
  for (int i = 1; i <= 6; ++i) grid.push_back(0.4 * i * p.omega_sse());
  const sse::EnsembleSpec spec{sse::InitMode::random, 20, 5};
  const auto a = sse::ratio_sweep(p, grid, 2.0, spec, 1);
  const auto b = sse::ratio_sweep(p, grid, 2.0, spec, 3);
  ASSERT_EQ(a.points.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(a.points[i].ratio, b.points[i].ratio);
    EXPECT_EQ(a.points[i].dispersion, b.points[i].dispersion);
    EXPECT_EQ(a.points[i].omega, grid[i]);
    EXPECT_GT(a.points[i].ratio, 0.0);
    EXPECT_GE(a.points[i].dispersion, 0.0);
  }
  EXPECT_EQ(a.n_bath, 40u);
  EXPECT_EQ(a.ensemble_size, 20u);
}

TEST(RatioSweep, DecoupledUnitInitIsSymmetric) {
  auto p = sse::test::desk(20);
  p.g = 0.0;
  const std::vector<double> grid{0.01, 0.02, 0.05};
  const auto c = sse::ratio_sweep(p, grid, 1.0, {sse::InitMode::unit, 1, 1});
  for (const auto& pt : c.points) EXPECT_NEAR(pt.ratio, 1.0, 1e-12);
}

TEST(CurveSlopes, KneeAndWindowedMaximum) {
  sse::RatioCurve c;
  c.points = {{0.0, 0.1, 0}, {1.0, 0.2, 0}, {2.0, 0.8, 0}, {3.0, 0.9, 0}, {4.0, 0.95, 0}};
  const auto s = sse::finite_difference_slopes(c);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_DOUBLE_EQ(s[1].slope, 0.6);
  EXPECT_DOUBLE_EQ(sse::knee_omega(c), 1.5);
  EXPECT_DOUBLE_EQ(sse::max_slope_in(c, 2.0, 4.0), 0.1);
  EXPECT_THROW(sse::max_slope_in(c, 10.0, 11.0), sse::InvalidArgument);
}

TEST(Csv, TrajectoryAndRatioSchemas) {
  sse::Trajectory tr;
  tr.grid = {0.0, 0.5, 2};
  tr.a1 = {1.0, 0.0};
  tr.a2 = {1.0, 1.0};
  std::ostringstream out;
  sse::write_trajectory_csv(out, tr);
  EXPECT_EQ(out.str(), "t,abs_a1,abs_a2,dphi\n0,1,1,0\n0.5,0,1,nan\n");
  sse::RatioCurve c;
  c.points = {{0.1, 0.5, 0.25}};
  c.n_bath = 7;
  c.t_max_in_tr = 25;
  c.ensemble_size = 200;
  c.seed = 3;
  std::ostringstream rc;
  sse::write_ratio_csv(rc, c);
  EXPECT_EQ(rc.str(),
            "omega,ratio,dispersion,n_bath,t_max_TR,ensemble,seed\n"
            "0.10000000000000001,0.5,0.25,7,25,200,3\n");
}

}  // namespace
