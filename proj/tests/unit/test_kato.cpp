#include "kvsync/kato.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace kvsync;

namespace {

ModelParams make(double G, double gamma, double F) {
  ModelParams p;
  p.gamma_noise = G;
  p.coupling = gamma;
  p.tilt = F;
  return p;
}

}  // namespace

TEST(Rho1, AtZeroAlphaIsSine) {
  const auto r = rho1(make(1.0, 2.0, 0.5));
  for (double th : {0.0, 0.8, 2.0, 4.4}) EXPECT_NEAR(r(th), std::sin(th) / kPi, 1e-15);
  EXPECT_EQ(r[0], cplx{});
}

TEST(Rho1, SolvesFirstOrderEquation) {
  for (const auto& p : {make(1.0, 2.0, 0.5), make(0.7, 1.1, 1.3), make(1.0, 3.0, 0.2)}) {
    const auto r = rho1(p);
    const auto d1 = r.derivative();
    const auto d2 = d1.derivative();
    const double half = 0.5 * p.coupling * p.kappa0;
    // Gamma r'' - F r' + (gamma kappa0 / 2) r ... projected on the first harmonic, sourced by cos/(2 pi)
    for (int j = 0; j < 64; ++j) {
      const double th = kTwoPi * j / 64;
      const double lhs = p.gamma_noise * d2(th) - p.tilt * d1(th) + half * r(th) + std::cos(th) / kTwoPi;
      EXPECT_NEAR(lhs, 0.0, 1e-12);
    }
  }
}

TEST(Rho1, DecaysWithTilt) {
  const double a = rho1(make(1.0, 3.0, 10.0)).max_abs();
  const double b = rho1(make(1.0, 3.0, 20.0)).max_abs();
  EXPECT_NEAR(a / b, 2.0, 0.05);
}

TEST(Rho1, SingularAtZeroAlphaAndTilt) {
  EXPECT_THROW(rho1(make(1.0, 2.0, 0.0)), SingularParametersError);
}

TEST(PerturbativeState, Examples) {
  const auto p = make(1.0, 2.0, 0.5);
  EXPECT_LT(l1_distance(perturbative_state(p, 0.0, 4), AngularDensity::uniform(4)), 1e-15);
  const auto s = perturbative_state(p, 0.1, 4);
  const auto m = moments(s, 1);
  EXPECT_NEAR(m.cos_moment, 0.0, 1e-15);
  EXPECT_NEAR(m.sin_moment, 0.1, 1e-15);
  EXPECT_EQ(s[0].real(), kUniformDensity);
}

TEST(Lambda2, ValueAtZeroAlpha) {
  const cplx l2 = lambda2(make(1.0, 2.0, 0.5));
  EXPECT_NEAR(l2.real(), -1.0769230769230769, 1e-12);
  EXPECT_NEAR(l2.imag(), 0.38461538461538464, 1e-12);
}

TEST(Lambda2, RealPartClosedFormAtZeroAlpha) {
  for (double F : {0.1, 0.5, 1.0, 3.0}) {
    for (double G : {0.5, 1.0, 2.0}) {
      const double expected = -G * (3 * F * F + 8 * G * G) / (2 * F * F * (16 * G * G + F * F));
      EXPECT_NEAR(lambda2(make(G, 2.0 * G, F)).real(), expected, 1e-13 * std::abs(expected));
    }
  }
}

TEST(Lambda2, ProductPathMatchesClosedForm) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = make(u(rng), 2.0 * u(rng), u(rng));
    const cplx a = lambda2_product(p);
    const cplx b = lambda2_closed_form(p.alpha(), p.tilt, p.gamma_noise);
    EXPECT_LT(std::abs(a - b), 1e-13 * std::max(1.0, std::abs(b)));
  }
}

TEST(Lambda2, ConjugateUnderTiltReversal) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double F = u(rng), G = u(rng);
    // at alpha = 0 the closed form is analytic in F; evaluate at -F directly
    const cplx plus = lambda2_closed_form(0.0, F, G);
    const cplx num = cplx{-F, -2.0 * G} * cplx{-F, G};
    const cplx minus = -num / (2.0 * F * F * cplx{4.0 * G, -F});
    EXPECT_LT(std::abs(minus - std::conj(plus)), 1e-13 * std::abs(plus));
  }
}

TEST(Lambda2, RejectsZeroTilt) { EXPECT_THROW(lambda2(make(1.0, 2.0, 0.0)), SingularParametersError); }

TEST(Coefficients, FourierPiecesMatchClosedForms) {
  const auto p = make(1.0, 2.4, 0.7);
  const auto pc = perturbation_coeffs(p);
  const auto [a, b] = coupling_coefficients_from_fourier(p);
  const double al = p.alpha();
  const cplx a_cf = cplx{p.tilt, -(2.0 * p.gamma_noise + al)} / cplx{p.tilt, al};
  const cplx b_cf = -cplx{p.tilt, p.gamma_noise} / (2.0 * cplx{p.tilt, -al});
  EXPECT_LT(std::abs(a - a_cf), 1e-13);
  EXPECT_LT(std::abs(b - b_cf), 1e-13);
  EXPECT_LT(std::abs(pc.a_coeff - a_cf), 1e-13);
  EXPECT_EQ(pc.lambda0, (cplx{al, -p.tilt}));
}

TEST(GammaCPerturbative, Examples) {
  using M = PerturbativeMode;
  EXPECT_EQ(gamma_c_perturbative(0.0, 0.5, 1.0, M::LeadingOrder).gamma_c, 2.0);
  EXPECT_NEAR(gamma_c_perturbative(0.0, 0.5, 1.0, M::SelfConsistentAlpha).gamma_c, 2.0, 1e-11);
  EXPECT_NEAR(gamma_c_perturbative(0.1, 0.5, 1.0, M::LeadingOrder).gamma_c, 2.0215385, 1e-7);
  EXPECT_EQ(gamma_c_perturbative(-0.1, 0.5, 1.0, M::LeadingOrder).gamma_c,
            gamma_c_perturbative(0.1, 0.5, 1.0, M::LeadingOrder).gamma_c);
  EXPECT_THROW(gamma_c_perturbative(0.1, 0.0, 1.0, M::LeadingOrder), SingularParametersError);
}

TEST(GammaCPerturbative, SelfConsistentRootSolvesEquation) {
  const double h = 0.2, F = 0.5, G = 1.0;
  const auto t = gamma_c_perturbative(h, F, G, PerturbativeMode::SelfConsistentAlpha);
  const double alpha = 0.5 * t.gamma_c - G;
  EXPECT_NEAR(alpha + h * h * lambda2_closed_form(alpha, F, G).real(), 0.0, 1e-11);
}

TEST(Confinement, PositiveAndDecaysLikeInverseSquare) {
  for (double F : {0.1, 0.5, 2.0})
    for (double G : {0.3, 1.0, 4.0}) EXPECT_GT(confinement_coefficient(F, G), 0.0);
  EXPECT_NEAR(confinement_coefficient(0.5, 1.0), 2.153846153846154, 1e-12);
  const double r = confinement_coefficient(2000.0, 1.0) / confinement_coefficient(1000.0, 1.0);
  EXPECT_NEAR(r, 0.25, 1e-4);
  for (double F : {10.0, 100.0, 1000.0}) EXPECT_LT(confinement_coefficient(F, 1.0) * F * F, 3.0 + 1e-9);
}
