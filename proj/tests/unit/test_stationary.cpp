#include "kvsync/kato.hpp"
#include "kvsync/pde.hpp"
#include "kvsync/stationary.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace kvsync;

namespace {

ModelParams make(double G, double gamma, double h, double F) {
  ModelParams p;
  p.gamma_noise = G;
  p.coupling = gamma;
  p.field = h;
  p.tilt = F;
  return p;
}

AngularDensity cosine_seed(int N, double amp) {
  FourierSeries s = AngularDensity::uniform(N).series();
  s.set(1, cplx{amp / 2.0 / kTwoPi, 0.0});
  return AngularDensity(s);
}

}  // namespace

TEST(PeriodicIntegral, FlatPotential) {
  const ModelParams p = make(1.0, 1.0, 0.0, 0.0);
  const auto pot = angular_potential(AngularDensity::uniform(8), p);
  for (auto rule : {QuadratureRule::Spectral, QuadratureRule::Trapezoid}) {
    SelfConsistencyConfig cfg;
    cfg.rule = rule;
    const auto I = periodic_integral(pot, p, cfg);
    for (std::size_t j = 0; j < I.values.size(); j += 37) EXPECT_NEAR(I.at(j), kTwoPi, 1e-13);
  }
}

TEST(PeriodicIntegral, LinearTiltClosedForm) {
  const ModelParams p = make(1.0, 1.0, 0.0, 1.0);
  const auto pot = angular_potential(AngularDensity::uniform(8), p);
  const double exact = 1.0 - std::exp(-kTwoPi);
  const auto I = periodic_integral(pot, p, SelfConsistencyConfig{});
  for (std::size_t j = 0; j < I.values.size(); j += 31) EXPECT_NEAR(I.at(j), exact, 1e-13);
  EXPECT_NEAR(periodic_integral_at(pot, p, 1.234, SelfConsistencyConfig{}), exact, 1e-13);
}

TEST(PeriodicIntegral, TrapezoidConvergesOnNodeDoubling) {
  const ModelParams p = make(1.0, 1.0, 0.0, 1.0);
  const auto pot = angular_potential(AngularDensity::uniform(8), p);
  const double exact = 1.0 - std::exp(-kTwoPi);
  SelfConsistencyConfig cfg;
  cfg.rule = QuadratureRule::Trapezoid;
  cfg.quad_points = 256;
  const double e1 = std::abs(periodic_integral(pot, p, cfg).at(0) - exact);
  cfg.quad_points = 512;
  const double e2 = std::abs(periodic_integral(pot, p, cfg).at(0) - exact);
  EXPECT_GT(e1, 0.0);
  EXPECT_NEAR(e1 / e2, 4.0, 0.05);
}

TEST(PeriodicIntegral, PeriodicInTheta) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const ModelParams p = make(0.3 + u(rng), 0.5 + 3.0 * u(rng), u(rng), 2.0 * u(rng));
    const auto rho = random_density(rng, 8);
    const auto pot = angular_potential(rho, p);
    const double th = kTwoPi * u(rng);
    const double a = periodic_integral_at(pot, p, th, SelfConsistencyConfig{});
    const double b = periodic_integral_at(pot, p, th + kTwoPi, SelfConsistencyConfig{});
    EXPECT_NEAR(a, b, 1e-13 * std::abs(a));
  }
}

TEST(PeriodicIntegral, SurvivesLargeAmplitudes) {
  const ModelParams p = make(0.01, 1.0, 20.0, 1.0);
  const auto pot = angular_potential(AngularDensity::uniform(8), p);
  const auto I = periodic_integral(pot, p, SelfConsistencyConfig{});
  for (double v : I.values) EXPECT_TRUE(std::isfinite(v) && v > 0.0);
  EXPECT_TRUE(std::isfinite(I.log_scale));
}

TEST(SelfConsistencyMap, UniformIsFixedWithoutField) {
  for (double F : {0.0, 0.5, 2.0}) {
    const ModelParams p = make(1.0, 3.0, 0.0, F);
    const auto out = selfconsistency_map(AngularDensity::uniform(16), p, SelfConsistencyConfig{});
    EXPECT_LT(l1_distance(out, AngularDensity::uniform(16)), 1e-13);
  }
}

TEST(SelfConsistencyMap, ContractionAtLargeNoise) {
  const ModelParams p = make(10.0, 1.0, 0.1, 0.5);
  std::mt19937_64 rng(42);
  for (int pair = 0; pair < 20; ++pair) {
    const auto a = random_density(rng, 16);
    const auto b = random_density(rng, 16);
    const double before = l1_distance(a, b);
    const double after = l1_distance(selfconsistency_map(a, p, {}), selfconsistency_map(b, p, {}));
    EXPECT_LT(after / before, 1.0);
  }
}

TEST(SelfConsistencyMap, PreservesMass) {
  std::mt19937_64 rng(5);
  const ModelParams p = make(0.5, 2.5, 0.3, 0.4);
  const auto out = selfconsistency_map(random_density(rng, 16), p, {});
  EXPECT_EQ(out[0].real(), kUniformDensity);
}

TEST(SolveStationary, BelowThresholdUniformInOneIteration) {
  const ModelParams p = make(1.0, 1.5, 0.0, 0.5);
  const auto r = solve_stationary_homogeneous(p, {}, AngularDensity::uniform(16));
  EXPECT_EQ(r.iterations, 1);
  EXPECT_LT(l1_distance(r.density, AngularDensity::uniform(16)), 1e-12);
}

TEST(SolveStationary, WeakFieldMatchesPerturbativeMoments) {
  const ModelParams p = make(1.0, 2.0, 0.1, 0.5);
  const auto r = solve_stationary_homogeneous(p, {}, AngularDensity::uniform(16));
  const auto m = moments(r.density, 1);
  EXPECT_NEAR(m.cos_moment, 0.0, 0.01);
  EXPECT_NEAR(m.sin_moment, 0.1, 0.01);
}

TEST(SolveStationary, SynchronizedProfileAgreesWithTimeIntegration) {
  const ModelParams p = make(0.2, 3.5, 0.0, 0.0);
  SelfConsistencyConfig cfg;
  cfg.tol = 1e-12;
  const auto fixed = solve_stationary_homogeneous(p, cfg, cosine_seed(29, 0.1));
  EXPECT_GT(moments(fixed.density, 1).magnitude(), 0.05);

  EvolveConfig ec;
  ec.t_max = 300.0;
  ec.steady_tol = 1e-12;
  const auto tr = evolve_angular(p, cosine_seed(29, 0.1), ec);
  EXPECT_LT(l1_distance(fixed.density, tr.final_state), 1e-6);
}

TEST(SolveStationary, ResidualOfFixedPoints) {
  std::mt19937_64 rng(42);
  for (const auto& p : {make(1.0, 2.0, 0.1, 0.5), make(1.0, 3.0, 0.0, 0.0), make(0.5, 1.5, 0.5, 0.0)}) {
    const auto r = solve_stationary_homogeneous(p, {}, cosine_seed(32, 0.2));
    const auto res = stationarity_residual(r.density, p);
    EXPECT_LT(res.max_abs(), 1e-7);
    EXPECT_EQ(r.density[0].real(), kUniformDensity);
  }
}

TEST(SolveStationary, UniqueFixedPointAtLargeNoise) {
  const ModelParams p = make(10.0, 1.0, 0.1, 0.5);
  std::mt19937_64 rng(42);
  SelfConsistencyConfig cfg;
  cfg.tol = 1e-13;
  const auto ref = solve_stationary_homogeneous(p, cfg, AngularDensity::uniform(16)).density;
  for (int trial = 0; trial < 10; ++trial) {
    const auto r = solve_stationary_homogeneous(p, cfg, random_density(rng, 16));
    EXPECT_LT(l1_distance(r.density, ref), 1e-8);
  }
}

TEST(SolveStationary, PerturbativeSlope) {
  ModelParams p = make(1.0, 1.0, 0.0, 0.5);
  std::vector<double> hs{0.02, 0.05, 0.1}, errs;
  SelfConsistencyConfig cfg;
  cfg.tol = 1e-13;
  for (double h : hs) {
    p.field = h;
    const auto r = solve_stationary_homogeneous(p, cfg, AngularDensity::uniform(16));
    errs.push_back(l1_distance(r.density, perturbative_state(p, h, 16)));
  }
  const double slope = (std::log(errs[2]) - std::log(errs[0])) / (std::log(hs[2]) - std::log(hs[0]));
  EXPECT_GE(slope, 1.9);
}

TEST(SolveStationary, ReportsNonConvergence) {
  SelfConsistencyConfig cfg;
  cfg.max_iter = 2;
  try {
    solve_stationary_homogeneous(make(0.2, 3.5, 0.0, 0.0), cfg, cosine_seed(16, 0.1));
    FAIL();
  } catch (const NonConvergenceError<AngularDensity>& e) {
    EXPECT_EQ(e.iterations(), 2);
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(SolveStationarySpatial, HomogeneousInitMatchesHomogeneousSolver) {
  for (const auto& p : {make(1.0, 2.0, 0.1, 0.5), make(1.0, 3.0, 0.2, 0.0)}) {
    const auto hom = solve_stationary_homogeneous(p, {}, cosine_seed(16, 0.2));
    const auto sp = solve_stationary_spatial(p, top_hat_kernel(p, 3), {},
                                             SpatialAngularDensity::homogeneous(cosine_seed(16, 0.2), 3));
    EXPECT_LT(sp.density.spatial_inhomogeneity(), 1e-10);
    EXPECT_LT(l1_distance(sp.density.spatial_mean(), hom.density), 1e-10);
  }
}

TEST(SolveStationarySpatial, SpatialPerturbationDecaysBelowThreshold) {
  const ModelParams p = make(1.0, 1.5, 0.1, 0.5);
  SpatialAngularDensity init = SpatialAngularDensity::uniform(3, 16);
  init.set(1, 1, cplx{0.0, -0.01});
  const auto sp = solve_stationary_spatial(p, top_hat_kernel(p, 3), {}, init);
  EXPECT_LT(sp.density.spatial_inhomogeneity(), 1e-9);
  EXPECT_LT(sp.density.local_mass_defect(), 1e-13);
}

TEST(SolveStationarySpatial, RejectsTransport) {
  ModelParams p = make(1.0, 1.5, 0.0, 0.0);
  p.speed = 0.1;
  EXPECT_THROW(solve_stationary_spatial(p, top_hat_kernel(p, 2), {}, SpatialAngularDensity::uniform(2, 8)),
               std::invalid_argument);
}
