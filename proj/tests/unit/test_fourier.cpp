#include "kvsync/fourier.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace kvsync;

TEST(FourierSeries, NegativeModesMirrorPositive) {
  FourierSeries s(3);
  s.set(2, cplx{0.1, -0.3});
  EXPECT_EQ(s[-2], std::conj(s[2]));
  EXPECT_EQ(s[5], cplx{});
}

TEST(FourierSeries, EvaluationMatchesDefinition) {
  FourierSeries s(2);
  s.set(0, 0.5);
  s.set(1, cplx{0.2, 0.1});
  s.set(2, cplx{0.0, -0.05});
  for (double th : {0.0, 0.7, 2.1, 5.9}) {
    const double expected = 0.5 + 2.0 * (cplx{0.2, 0.1} * std::polar(1.0, th)).real() +
                            2.0 * (cplx{0.0, -0.05} * std::polar(1.0, 2.0 * th)).real();
    EXPECT_NEAR(s(th), expected, 1e-14);
  }
}

TEST(FourierSeries, SampleRoundTrip) {
  FourierSeries s(4);
  s.set(0, 0.3);
  s.set(1, cplx{0.1, 0.2});
  s.set(4, cplx{-0.05, 0.01});
  const auto v = s.sample(64);
  const auto back = FourierSeries::from_samples(v, 4);
  for (int n = -4; n <= 4; ++n) EXPECT_NEAR(std::abs(back[n] - s[n]), 0.0, 1e-15);
}

TEST(FourierSeries, DerivativeIsExact) {
  FourierSeries s(3);
  s.set(1, cplx{0.0, -0.5});  // sin theta
  s.set(3, cplx{0.25, 0.0});  // 0.5 cos 3 theta
  const auto d = s.derivative();
  for (double th : {0.3, 1.4, 4.0}) EXPECT_NEAR(d(th), std::cos(th) - 1.5 * std::sin(3.0 * th), 1e-14);
}

TEST(FourierSeries, ProductOfHarmonics) {
  FourierSeries c(1), s(1);
  c.set(1, 0.5);                // cos
  s.set(1, cplx{0.0, -0.5});    // sin
  const auto p = c.multiply(s);  // sin(2 theta) / 2
  for (double th : {0.2, 1.1, 3.3}) EXPECT_NEAR(p(th), 0.5 * std::sin(2.0 * th), 1e-15);
}

TEST(PeriodicTrapezoid, IntegratesTrigPolynomialExactly) {
  const int m = 32;
  std::vector<double> v(m);
  for (int j = 0; j < m; ++j) v[j] = 1.0 + std::cos(3.0 * kTwoPi * j / m);
  EXPECT_NEAR(periodic_trapezoid(v), kTwoPi, 1e-14);
}
