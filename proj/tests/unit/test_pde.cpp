#include "kvsync/galerkin.hpp"
#include "kvsync/pde.hpp"
#include "kvsync/stationary.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace kvsync;

namespace {

ModelParams make(double gamma, double F, double h = 0.0) {
  ModelParams p;
  p.coupling = gamma;
  p.tilt = F;
  p.field = h;
  return p;
}

EvolveConfig fixed_horizon(double t_max) {
  EvolveConfig c;
  c.t_max = t_max;
  c.steady_tol = -1.0;
  return c;
}

AngularDensity rich_init(int N) {
  FourierSeries s = AngularDensity::uniform(N).series();
  s.set(1, cplx{0.02, -0.03});
  s.set(2, cplx{-0.01, 0.015});
  s.set(3, cplx{0.005, 0.0});
  return AngularDensity(s);
}

}  // namespace

TEST(OrderParameter, Examples) {
  EXPECT_EQ(order_parameter(AngularDensity::uniform(8)), 0.0);
  FourierSeries s = AngularDensity::uniform(8).series();
  s.set(1, 0.1 * cplx{0.0, -1.0 / kTwoPi});
  EXPECT_NEAR(order_parameter(AngularDensity(s)), 0.1, 1e-15);

  const int N = 64;
  FourierSeries vm(N);
  for (int n = 0; n <= N; ++n) vm.set(n, std::exp(-n * n / 200.0) / kTwoPi);
  const AngularDensity peak(vm);
  const double r = order_parameter(peak);
  EXPECT_NEAR(r, std::exp(-0.005), 1e-14);
  const auto v = peak.sample(1024);
  double c = 0.0, sn = 0.0;
  for (int j = 0; j < 1024; ++j) {
    c += std::cos(kTwoPi * j / 1024) * v[j];
    sn += std::sin(kTwoPi * j / 1024) * v[j];
  }
  EXPECT_NEAR(std::hypot(c, sn) * kTwoPi / 1024, r, 1e-12);
}

TEST(OrderParameter, SpatialUniformIsZero) {
  EXPECT_EQ(order_parameter(SpatialAngularDensity::uniform(4, 8)), 0.0);
  const auto h = SpatialAngularDensity::homogeneous(rich_init(8), 4);
  EXPECT_NEAR(order_parameter(h), order_parameter(rich_init(8)), 1e-15);
}

TEST(EvolveAngular, HeatKernelWithoutInteraction) {
  ModelParams p = make(1.0, 0.5);
  p.coupling = 0.0;
  const auto init = rich_init(29);
  const auto tr = evolve_angular(p, init, fixed_horizon(1.0));
  for (int n = 1; n <= 3; ++n) {
    EXPECT_NEAR(std::abs(tr.final_state[n]), std::abs(init[n]) * std::exp(-n * n * 1.0), 1e-8) << n;
  }
}

TEST(EvolveAngular, BelowAndAboveThreshold) {
  for (double F : {0.0, 0.5, 1.0}) {
    EvolveConfig c;
    c.t_max = 300.0;
    const auto low = evolve_angular(make(1.5, F), sine_bump_density(29), c);
    EXPECT_LT(low.order_params.back(), 1e-3) << F;
    const auto high = evolve_angular(make(3.5, F), sine_bump_density(29), c);
    EXPECT_GT(high.order_params.back(), 0.05) << F;
  }
}

TEST(EvolveAngular, MassConservedAndOrderBounded) {
  const auto tr = evolve_angular(make(3.0, 0.7, 0.3), sine_bump_density(29), fixed_horizon(30.0));
  EXPECT_LT(tr.max_mass_error, 1e-13);
  for (double r : tr.order_params) {
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 1.0);
  }
}

TEST(EvolveAngular, RotatingFrameEquivalence) {
  const double T = 20.0, F = 0.5;
  const auto rest = evolve_angular(make(3.0, 0.0), sine_bump_density(29), fixed_horizon(T));
  const auto moving = evolve_angular(make(3.0, F), sine_bump_density(29), fixed_horizon(T));
  FourierSeries back(29);
  for (int n = 0; n <= 29; ++n) back.set(n, moving.final_state[n] * std::polar(1.0, n * F * T));
  EXPECT_GT(order_parameter(rest.final_state), 0.05);
  EXPECT_LT(l1_distance(AngularDensity(back), rest.final_state), 1e-6);
}

TEST(EvolveAngular, TimeStepConvergence) {
  auto c = fixed_horizon(20.0);
  const double r1 = evolve_angular(make(3.0, 0.5, 0.1), sine_bump_density(29), c).order_params.back();
  c.dt *= 0.5;
  const double r2 = evolve_angular(make(3.0, 0.5, 0.1), sine_bump_density(29), c).order_params.back();
  EXPECT_LT(std::abs(r1 - r2), 1e-8);
}

TEST(EvolveAngular, PerturbationRateMatchesEigenvalue) {
  ModelParams p = make(2.0, 0.5, 0.1);
  const double gc = critical_coupling_numeric(0.1, p).gamma_c;
  for (double f : {0.98, 1.02}) {
    p.coupling = f * gc;
    const cplx lam = eigen_branch(p, continuation_grid(0.1)).lambdas.back();
    SelfConsistencyConfig sc;
    sc.tol = 1e-14;
    sc.damping = 0.5;
    const auto base = solve_stationary_homogeneous(p, sc, perturbative_state(p, 0.1, 29)).density;
    FourierSeries s = base.series();
    s.set(1, s[1] + cplx{1e-6, 0.0});
    auto c = fixed_horizon(150.0);
    c.record_every = 0.5;
    c.record_states = true;
    const auto a = evolve_angular(p, AngularDensity(s), c);
    const auto b = evolve_angular(p, base, c);
    // least-squares slope of log|difference| over t in [50, 150], many oscillation periods
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t j = 0; j < a.times.size(); ++j) {
      if (a.times[j] < 50.0) continue;
      const double t = a.times[j], y = std::log(l1_distance(a.states[j], b.states[j]));
      sx += t, sy += y, sxx += t * t, sxy += t * y, ++n;
    }
    const double rate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    EXPECT_EQ(rate > 0.0, lam.real() > 0.0);
    EXPECT_LT(std::abs(rate - lam.real()), 0.05 * std::abs(lam.real())) << "gamma " << p.coupling;
  }
}

TEST(EvolveAngular, ConvergesEarlyToSteadyState) {
  EvolveConfig c;
  c.t_max = 300.0;
  const auto tr = evolve_angular(make(3.0, 0.0), sine_bump_density(29), c);
  EXPECT_TRUE(tr.converged);
  EXPECT_LT(tr.final_time, 300.0);
}

TEST(EvolveAngular, RejectsBadConfig) {
  EvolveConfig c;
  c.n_theta = 7;
  EXPECT_THROW(evolve_angular(make(1.0, 0.0), sine_bump_density(3), c), std::invalid_argument);
  c = EvolveConfig{};
  c.dt = 0.0;
  EXPECT_THROW(evolve_angular(make(1.0, 0.0), sine_bump_density(29), c), std::invalid_argument);
}

TEST(EvolveSpatial, UnnormalisedBelowThresholdDecays) {
  ModelParams p = ModelParams::make(NormalizationVariant::Unnormalised, 0.2, 1);
  p.speed = 0.1;
  p.coupling = 4.5;
  EvolveConfig c;
  c.n_x = 16;
  c.n_theta = 16;
  c.dt = 1e-2;
  c.t_max = 60.0;
  const auto tr = evolve_spatial(p, cosine_wave_density(c.n_x / 2 - 1, c.n_theta / 2 - 1), c);
  EXPECT_LT(tr.order_params.back(), 1e-3);
  EXPECT_LT(tr.max_mass_error, 1e-13);
}

TEST(EvolveSpatial, FullyNormalisedOrdersAboveThreshold) {
  ModelParams p = ModelParams::make(NormalizationVariant::FullyNormalised, 0.2, 1);
  p.speed = 0.1;
  p.coupling = 2.5;
  EvolveConfig c;
  c.n_x = 16;
  c.n_theta = 16;
  c.dt = 1e-2;
  c.t_max = 100.0;
  // the symmetric wave alone leaves the homogeneous first harmonic at roundoff level on this grid
  auto init = cosine_wave_density(c.n_x / 2 - 1, c.n_theta / 2 - 1);
  init.set(0, 1, cplx{1e-4, 0.0});
  const auto tr = evolve_spatial(p, init, c);
  EXPECT_GT(tr.order_params.back(), 0.05);
}

TEST(EvolveSpatial, HomogeneousDataStaysHomogeneous) {
  ModelParams p = ModelParams::make(NormalizationVariant::PartialTheta, 0.2, 1);
  p.coupling = 6.0;
  EvolveConfig c;
  c.n_x = 8;
  c.n_theta = 16;
  c.dt = 1e-2;
  c.t_max = 5.0;
  c.steady_tol = -1.0;
  const auto init = SpatialAngularDensity::homogeneous(sine_bump_density(7), 3);
  const auto tr = evolve_spatial(p, init, c);
  EXPECT_LT(tr.final_state.spatial_inhomogeneity(), 1e-12);
}
