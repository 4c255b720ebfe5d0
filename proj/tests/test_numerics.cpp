#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "gmix/estimate.hpp"
#include "gmix/numerics.hpp"
#include "support/oracles.hpp"

using namespace gmix;

TEST(LogGamma, KnownValues) {
  EXPECT_NEAR(log_gamma(1.0), 0.0, 1e-15);
  EXPECT_NEAR(log_gamma(0.5), 0.5 * std::log(std::numbers::pi), 1e-14);
  EXPECT_NEAR(log_gamma(0.5), 0.5723649429, 1e-10);
  EXPECT_NEAR(log_gamma(4.0), std::log(6.0), 1e-14);
  EXPECT_NEAR(log_gamma(171.5), 709.1431630309, 1e-8);
}

TEST(LogGamma, RejectsNonPositive) {
  EXPECT_THROW(log_gamma(0.0), DomainError);
  EXPECT_THROW(log_gamma(-2.5), DomainError);
}

TEST(BetaFn, ValuesAndSymmetry) {
  EXPECT_NEAR(beta_fn(1.0, 1.0), 1.0, 1e-15);
  // direct integral of sqrt(x)(1 - x) over [0, 1]
  const double oracle = oracle::simpson([](double x) { return std::sqrt(x) * (1.0 - x); }, 0.0, 1.0, 2000000);
  EXPECT_NEAR(oracle, 4.0 / 15.0, 1e-8);
  EXPECT_NEAR(beta_fn(1.5, 2.0), 4.0 / 15.0, 1e-14);
  for (double a : {0.3, 1.7, 12.0})
    for (double b : {0.9, 4.2, 300.0}) EXPECT_NEAR(beta_fn(a, b), beta_fn(b, a), 1e-15 * beta_fn(a, b));
  EXPECT_THROW(beta_fn(0.0, 1.0), DomainError);
  EXPECT_THROW(beta_fn(1.0, -1.0), DomainError);
}

TEST(GaussianNorm, FrozenAndOracleValues) {
  EXPECT_NEAR(gaussian_norm(2.0), 1.0, 1e-15);
  // E Z^4 by quadrature of z^4 phi(z)
  const double ez4 = 2.0 * oracle::simpson([](double z) { return std::pow(z, 4) * normal_pdf(z); }, 0.0, 40.0);
  EXPECT_NEAR(ez4, 3.0, 1e-10);
  EXPECT_NEAR(gaussian_norm(4.0), std::pow(3.0, 0.25), 1e-12);
  EXPECT_NEAR(gaussian_norm(4.0), 1.3160740, 1e-7);
  const double ez1 = 2.0 * oracle::simpson([](double z) { return z * normal_pdf(z); }, 0.0, 40.0);
  EXPECT_NEAR(gaussian_norm(1.0), ez1, 1e-10);
  EXPECT_NEAR(gaussian_norm(1.0), 0.7978845608, 1e-10);
}

TEST(GaussianNorm, ContinuousAtZero) {
  EXPECT_NEAR(gaussian_norm(1e-6), gaussian_norm(0.0), 1e-5);
  EXPECT_NEAR(gaussian_norm(-1e-6), gaussian_norm(0.0), 1e-5);
  // E log|Z| by quadrature; z = s^2 removes the logarithmic singularity at 0
  const double elog = 2.0 * oracle::simpson(
                                [](double s) { return s > 0 ? 2.0 * s * std::log(s * s) * normal_pdf(s * s) : 0.0; },
                                0.0, 7.0, 400000);
  EXPECT_NEAR(std::log(gaussian_norm(0.0)), elog, 1e-9);
}

TEST(GaussianNorm, EvenMomentsAreDoubleFactorials) {
  double double_factorial = 1.0;
  for (int k = 1; k <= 8; ++k) {
    double_factorial *= (2 * k - 1);
    const double p = 2.0 * k;
    EXPECT_NEAR(std::pow(gaussian_norm(p), p) / double_factorial, 1.0, 1e-10) << "k=" << k;
  }
}

TEST(GaussianNorm, DomainError) {
  EXPECT_THROW(gaussian_norm(-1.0), DomainError);
  EXPECT_THROW(gaussian_norm(-3.0), DomainError);
  EXPECT_NO_THROW(gaussian_norm(-0.99));
}

TEST(ExpPowerConstant, Values) {
  EXPECT_EQ(exp_power_constant(1.0), 0.5);
  EXPECT_NEAR(exp_power_constant(2.0), 1.0 / std::sqrt(std::numbers::pi), 1e-15);
  EXPECT_NEAR(exp_power_constant(0.5), 0.25, 1e-15);
  EXPECT_THROW(exp_power_constant(0.0), DomainError);
  for (double p : {0.4, 1.3, 3.0}) {
    // int e^{-t^p} dt, with u = t^p when the integrand has a cusp at 0
    const double mass =
        p < 1.0 ? 2.0 / p * oracle::simpson([p](double u) { return std::pow(u, 1.0 / p - 1.0) * std::exp(-u); }, 0.0,
                                            200.0, 2000000)
                : 2.0 * oracle::simpson([p](double t) { return std::exp(-std::pow(t, p)); }, 0.0, 50.0, 2000000);
    EXPECT_NEAR(exp_power_constant(p) * mass, 1.0, 1e-6) << p;
  }
}

TEST(HalfGaussianMass, Values) {
  EXPECT_EQ(half_gaussian_mass(0.0), 0.0);
  EXPECT_EQ(half_gaussian_mass(kInf), 0.5);
  const double oracle = oracle::simpson([](double x) { return normal_pdf(x); }, 0.0, 1.0, 20000);
  EXPECT_NEAR(half_gaussian_mass(1.0), oracle, 1e-14);
  EXPECT_NEAR(half_gaussian_mass(1.0), 0.3413447461, 1e-10);
  EXPECT_THROW(half_gaussian_mass(-0.1), DomainError);
}

TEST(Integrate, ClosedForms) {
  EXPECT_NEAR(integrate([](double t) { return std::exp(-t); }, 0.0, kInf), 1.0, 1e-10);
  const double second = integrate([](double t) { return 0.5 * std::exp(-std::abs(t)) * t * t; }, -kInf, kInf);
  EXPECT_NEAR(second, 2.0, 2e-10);
  EXPECT_NEAR(integrate([](double x) { return std::sqrt(x) * (1.0 - x); }, 0.0, 1.0), 4.0 / 15.0, 1e-10);
  EXPECT_NEAR(integrate([](double x) { return x; }, 1.0, 0.0), -0.5, 1e-14);
}

TEST(Integrate, ReportsNonConvergence) {
  QuadratureOptions tight;
  tight.max_subdivisions = 1;
  tight.rel_tol = 1e-14;
  tight.abs_tol = 1e-16;
  EXPECT_THROW(integrate([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, tight), ConvergenceError);
  QuadratureOptions bad;
  bad.rel_tol = 0.0;
  EXPECT_THROW(integrate([](double x) { return x; }, 0.0, 1.0, bad), DomainError);
}

TEST(WeightedMean, UnitWeightsMatchSampleStatistics) {
  const std::vector<double> xs{1.0, 2.0, 4.0, 7.0};
  const auto m = weighted_mean(xs);
  EXPECT_DOUBLE_EQ(m.mean, 3.5);
  // sqrt(sum (x - mean)^2) / n
  EXPECT_NEAR(m.std_error, std::sqrt(6.25 + 2.25 + 0.25 + 12.25) / 4.0, 1e-15);
  EXPECT_DOUBLE_EQ(m.effective_size, 4.0);
}

TEST(WeightedMean, SelfNormalizes) {
  const std::vector<double> xs{1.0, 3.0};
  const std::vector<double> ws{3.0, 1.0};
  EXPECT_DOUBLE_EQ(weighted_mean(xs, ws).mean, 1.5);
  EXPECT_THROW(weighted_mean(std::vector<double>{}), std::invalid_argument);
}
