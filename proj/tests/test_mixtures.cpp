#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "gmix/mixtures.hpp"
#include "support/oracles.hpp"

using namespace gmix;

namespace {

constexpr double kKsLevel = 1e-3;

std::vector<double> mixture_products(const MixtureFamily& f, std::size_t n, std::uint64_t seed,
                                     std::vector<double>* weights) {
  const auto ys = sample_mixing_factor(f, n, RandomStream(seed, 1));
  RandomStream zs(seed, 2);
  std::vector<double> out(n);
  if (weights) weights->resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = ys[i].value * zs.normal();
    if (weights) (*weights)[i] = ys[i].weight;
  }
  return out;
}

}  // namespace

TEST(MixtureFamily, Validation) {
  EXPECT_THROW(MixtureFamily::exponential_power(0.0), DomainError);
  EXPECT_THROW(MixtureFamily::exponential_power(2.5), DomainError);
  EXPECT_THROW(MixtureFamily::symmetric_stable(-1.0), DomainError);
  EXPECT_THROW(MixtureFamily::symmetric_stable(2.01), DomainError);
  EXPECT_THROW(MixtureFamily::discrete({1.0, 2.0}, {0.5, 0.4}), DomainError);
  EXPECT_THROW(MixtureFamily::discrete({1.0, -2.0}, {0.5, 0.5}), DomainError);
  EXPECT_THROW(MixtureFamily::discrete({}, {}), DomainError);
  EXPECT_THROW(MixtureFamily::gaussian(0.0), DomainError);
  EXPECT_NO_THROW(MixtureFamily::discrete({1.0, 2.0}, {0.5, 0.5}));
  EXPECT_EQ(MixtureFamily::exponential_power(1.5).name(), "exp-power(1.5)");
  EXPECT_EQ(MixtureFamily::symmetric_stable(1).name(), "stable(1)");
}

TEST(SampleDirect, StableTwoIsNormalVarianceTwo) {
  const auto xs = sample_direct(MixtureFamily::symmetric_stable(2.0), 100000, RandomStream(1));
  const auto ks = oracle::ks_one_sample(xs, [](double x) { return normal_cdf(x / std::numbers::sqrt2); });
  EXPECT_GT(ks.p_value, kKsLevel);
}

TEST(SampleDirect, StableOneIsCauchy) {
  const auto xs = sample_direct(MixtureFamily::symmetric_stable(1.0), 100000, RandomStream(2));
  const auto ks = oracle::ks_one_sample(xs, [](double x) { return 0.5 + std::atan(x) / std::numbers::pi; });
  EXPECT_GT(ks.p_value, kKsLevel);
}

TEST(SampleDirect, ExpPowerOneIsLaplace) {
  const auto xs = sample_direct(MixtureFamily::exponential_power(1.0), 100000, RandomStream(3));
  const auto ks = oracle::ks_one_sample(
      xs, [](double x) { return x < 0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x); });
  EXPECT_GT(ks.p_value, kKsLevel);
}

TEST(SampleDirect, MatchesLibraryCdf) {
  for (auto f : {MixtureFamily::exponential_power(0.6), MixtureFamily::exponential_power(1.7),
                 MixtureFamily::discrete({0.5, 3.0}, {0.7, 0.3}), MixtureFamily::gaussian(2.0)}) {
    const auto xs = sample_direct(f, 100000, RandomStream(4));
    const auto ks = oracle::ks_one_sample(xs, [&f](double x) { return cdf(f, x); });
    EXPECT_GT(ks.p_value, kKsLevel) << f.name();
  }
  const auto f = MixtureFamily::symmetric_stable(1.5);
  const auto xs = sample_direct(f, 5000, RandomStream(4));
  EXPECT_GT(oracle::ks_one_sample(xs, [&f](double x) { return cdf(f, x); }).p_value, kKsLevel);
}

TEST(SampleDirect, Reproducible) {
  const auto f = MixtureFamily::symmetric_stable(0.7);
  EXPECT_EQ(sample_direct(f, 70000, RandomStream(8, 3)), sample_direct(f, 70000, RandomStream(8, 3)));
  EXPECT_NE(sample_direct(f, 100, RandomStream(8, 3)), sample_direct(f, 100, RandomStream(8, 4)));
}

TEST(MixingFactor, ExpPowerOneIsSqrtTwoExponential) {
  const auto ys = sample_mixing_factor(MixtureFamily::exponential_power(1.0), 100000, RandomStream(5));
  std::vector<double> half_sq;
  for (const auto& y : ys) {
    ASSERT_DOUBLE_EQ(y.weight, 1.0);
    half_sq.push_back(y.value * y.value / 2.0);
  }
  const auto ks = oracle::ks_one_sample(half_sq, [](double t) { return t <= 0 ? 0.0 : 1.0 - std::exp(-t); });
  EXPECT_GT(ks.p_value, kKsLevel);
}

TEST(MixingFactor, HalfStableLaplaceTransform) {
  RandomStream rs(6);
  const int n = 200000;
  std::vector<double> ws(n);
  for (double& w : ws) w = positive_stable(0.5, rs);
  for (double t : {0.5, 1.0, 2.0}) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = std::exp(-t * ws[static_cast<std::size_t>(i)]);
    const auto m = weighted_mean(v);
    EXPECT_NEAR(m.mean, std::exp(-std::sqrt(t)), 3.0 * m.std_error) << t;
  }
}

TEST(MixingFactor, MellinTransformOfPositiveStable) {
  for (double alpha : {0.25, 0.5, 0.75, 0.95}) {
    RandomStream rs(7, static_cast<std::uint64_t>(alpha * 100));
    const int n = 200000;
    std::vector<double> v(n);
    for (double& x : v) x = 1.0 / std::sqrt(positive_stable(alpha, rs));
    const auto m = weighted_mean(v);
    const double expected = std::tgamma(1.0 + 1.0 / (2.0 * alpha)) / std::tgamma(1.5);
    EXPECT_NEAR(m.mean, expected, 3.0 * m.std_error) << alpha;
  }
}

TEST(MixingFactor, ProductMatchesDirectDraws) {
  for (auto f : {MixtureFamily::symmetric_stable(0.8), MixtureFamily::symmetric_stable(1.5),
                 MixtureFamily::discrete({0.5, 3.0}, {0.7, 0.3}), MixtureFamily::gaussian(1.3)}) {
    const auto prod = mixture_products(f, 100000, 10, nullptr);
    const auto direct = sample_direct(f, 100000, RandomStream(11));
    EXPECT_GT(oracle::ks_two_sample(prod, direct).p_value, kKsLevel) << f.name();
  }
  for (double p : {0.7, 1.0, 1.5}) {
    const auto f = MixtureFamily::exponential_power(p);
    std::vector<double> w;
    const auto prod = mixture_products(f, 100000, 12, &w);
    std::vector<std::pair<double, double>> weighted;
    for (std::size_t i = 0; i < prod.size(); ++i) weighted.emplace_back(prod[i], w[i]);
    const auto direct = sample_direct(f, 100000, RandomStream(13));
    EXPECT_GT(oracle::ks_two_sample_weighted(direct, weighted).p_value, kKsLevel) << f.name();
  }
}

TEST(MixingFactor, ExpPowerMixtureIdentity) {
  for (double p : {0.6, 1.0, 1.5}) {
    const auto f = MixtureFamily::exponential_power(p);
    const auto ys = sample_mixing_factor(f, 400000, RandomStream(14));
    std::vector<double> w(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) w[i] = ys[i].weight;
    for (double x : {0.0, 1.0, 2.0}) {
      std::vector<double> v(ys.size());
      for (std::size_t i = 0; i < ys.size(); ++i) v[i] = normal_pdf(x / ys[i].value) / ys[i].value;
      const auto m = weighted_mean(v, w);
      EXPECT_NEAR(m.mean, density(f, x), 3.0 * m.std_error) << "p=" << p << " x=" << x;
    }
  }
}

TEST(Density, ClosedForms) {
  EXPECT_DOUBLE_EQ(density(MixtureFamily::exponential_power(1.0), 0.0), 0.5);
  EXPECT_NEAR(density(MixtureFamily::symmetric_stable(1.0), 0.0), 1.0 / std::numbers::pi, 1e-16);
  EXPECT_NEAR(density(MixtureFamily::symmetric_stable(1.0), 2.0), 1.0 / (5.0 * std::numbers::pi), 1e-16);
  EXPECT_NEAR(density(MixtureFamily::symmetric_stable(2.0), 0.0), 1.0 / (2.0 * std::sqrt(std::numbers::pi)), 1e-16);
  EXPECT_NEAR(density(MixtureFamily::gaussian(2.0), 1.0), normal_pdf(0.5) / 2.0, 1e-16);
}

TEST(Density, StableMatchesFourierOracle) {
  for (double p : {0.3, 0.5, 0.8, 1.3, 1.5, 1.9}) {
    for (double x : {0.0, 0.7, 2.0, 4.0, 7.5, 20.0}) {
      // t = u^4 smooths the t^p cusp at the origin
      const double cutoff = std::pow(40.0, 0.25 / p);
      const double ref = oracle::simpson(
                             [&](double u) {
                               const double t = u * u * u * u;
                               return 4.0 * u * u * u * std::cos(t * x) * std::exp(-std::pow(t, p));
                             },
                             0.0, cutoff, 4000000) /
                         std::numbers::pi;
      const double got = symmetric_stable_density(p, x);
      EXPECT_NEAR(got, ref, 1e-9 + 1e-7 * ref) << "p=" << p << " x=" << x;
    }
  }
}

TEST(Density, StableAgreesAtOneAndTwo) {
  for (double x : {0.0, 0.5, 3.0}) {
    EXPECT_NEAR(detail::stable_density_fourier(1.0, x), 1.0 / (std::numbers::pi * (1.0 + x * x)), 1e-12);
    EXPECT_NEAR(detail::stable_density_fourier(2.0, x), std::exp(-x * x / 4.0) / (2.0 * std::sqrt(std::numbers::pi)),
                1e-12);
  }
}

TEST(Density, TailSeriesAgreesWithQuadrature) {
  for (double p : {0.3, 0.5, 0.9}) {
    for (double x : {3.0, 6.0, 15.0}) {
      const auto s = detail::stable_density_tail_series(p, x);
      ASSERT_TRUE(s.has_value());
      EXPECT_NEAR(*s, detail::stable_density_zolotarev(p, x), 1e-13) << p << " " << x;
    }
  }
}

TEST(Density, AngularFormAgreesWithFourier) {
  for (double p : {0.5, 0.8, 1.3, 1.5, 1.8})
    for (double x : {0.05, 0.7, 2.0, 5.0}) {
      const double f = detail::stable_density_fourier(p, x);
      EXPECT_NEAR(detail::stable_density_zolotarev(p, x), f, 1e-10 * f) << p << " " << x;
    }
}

TEST(Density, Symmetry) {
  for (auto f : {MixtureFamily::exponential_power(0.7), MixtureFamily::discrete({1.0, 2.0}, {0.2, 0.8}),
                 MixtureFamily::gaussian(0.3), MixtureFamily::symmetric_stable(1.0)})
    for (double x : {0.1, 1.0, 5.0}) EXPECT_EQ(density(f, x), density(f, -x));
  for (double x : {0.1, 1.0, 5.0})
    EXPECT_NEAR(density(MixtureFamily::symmetric_stable(1.2), x), density(MixtureFamily::symmetric_stable(1.2), -x),
                1e-13);
}

TEST(Density, Normalization) {
  for (double p : {0.5, 1.0, 1.5, 2.0}) {
    for (auto f : {MixtureFamily::exponential_power(p), MixtureFamily::symmetric_stable(p)}) {
      QuadratureOptions opts;
      opts.rel_tol = 1e-11;
      const double inner = integrate([&f](double x) { return density(f, x); }, 0.0, 3.0, opts);
      const double outer = integrate([&f](double x) { return density(f, x); }, 3.0, kInf, opts);
      EXPECT_NEAR(2.0 * (inner + outer), 1.0, 1e-8) << f.name();
    }
  }
  const auto d = MixtureFamily::discrete({0.5, 3.0}, {0.7, 0.3});
  EXPECT_NEAR(integrate([&d](double x) { return density(d, x); }, -kInf, kInf), 1.0, 1e-10);
}

TEST(Cdf, ConsistentWithDensity) {
  for (auto f : {MixtureFamily::exponential_power(0.8), MixtureFamily::symmetric_stable(1.5),
                 MixtureFamily::symmetric_stable(1.0)}) {
    EXPECT_NEAR(cdf(f, 0.0), 0.5, 1e-15);
    const double mass = integrate([&f](double x) { return density(f, x); }, -1.0, 2.0);
    EXPECT_NEAR(cdf(f, 2.0) - cdf(f, -1.0), mass, 1e-9) << f.name();
  }
}

TEST(Moments, ClosedFormsAgainstQuadrature) {
  const auto lap = MixtureFamily::exponential_power(1.0);
  EXPECT_NEAR(abs_moment(lap, 2.0), 2.0, 1e-13);
  EXPECT_NEAR(abs_moment(lap, 3.0), 6.0, 1e-12);
  EXPECT_NEAR(lap.variance(), 2.0, 1e-13);
  const auto f = MixtureFamily::exponential_power(1.4);
  const double ref = 2.0 * oracle::simpson([&f](double x) { return std::pow(x, 0.5) * density(f, x); }, 0.0, 60.0,
                                           2000000);
  EXPECT_NEAR(abs_moment(f, 0.5), ref, 1e-6);
  EXPECT_EQ(abs_moment(MixtureFamily::symmetric_stable(1.5), 1.5), kInf);
  EXPECT_EQ(MixtureFamily::symmetric_stable(1.5).moment_limit(), 1.5);
  EXPECT_EQ(MixtureFamily::symmetric_stable(2.0).moment_limit(), kInf);
  EXPECT_NEAR(abs_moment(MixtureFamily::symmetric_stable(2.0), 2.0), 2.0, 1e-13);
  EXPECT_THROW(abs_moment(lap, -1.0), DomainError);
}

TEST(Moments, StableAgainstMonteCarlo) {
  const std::size_t n = 400000;
  for (double p : {0.8, 1.5}) {
    const auto f = MixtureFamily::symmetric_stable(p);
    const auto xs = sample_direct(f, n, RandomStream(20));
    std::vector<double> pw(n), lg(n);
    const double r = p / 4.0;
    for (std::size_t i = 0; i < n; ++i) {
      pw[i] = std::pow(std::abs(xs[i]), r);
      lg[i] = std::log(std::abs(xs[i]));
    }
    const auto m1 = weighted_mean(pw), m2 = weighted_mean(lg);
    EXPECT_NEAR(m1.mean, abs_moment(f, r), 4.0 * m1.std_error) << p;
    EXPECT_NEAR(m2.mean, log_abs_mean(f), 4.0 * m2.std_error) << p;
  }
  // Cauchy: E log|X| = 0
  EXPECT_NEAR(log_abs_mean(MixtureFamily::symmetric_stable(1.0)), 0.0, 1e-16);
}

TEST(Moments, ExpPowerLogMeanAgainstQuadrature) {
  for (double p : {0.5, 1.0, 1.8}) {
    const auto f = MixtureFamily::exponential_power(p);
    const double ref = 2.0 * oracle::simpson_half_line(
                                 [&f](double x) { return x > 0 ? std::log(x) * density(f, x) : 0.0; }, 2000000);
    EXPECT_NEAR(log_abs_mean(f), ref, 1e-5) << p;
    EXPECT_NEAR(abs_norm(f, 0.0), std::exp(ref), 1e-5) << p;
  }
}

TEST(CompleteMonotonicity, ExpPowerAndGaussianPass) {
  const auto grid = log_spaced_grid(1e-3, 50.0, 60);
  for (double p : {0.5, 1.0, 1.5, 2.0}) {
    const auto f = MixtureFamily::exponential_power(p);
    const auto res = complete_monotonicity_check([&f](double x) { return density(f, std::sqrt(x)); }, grid, 6);
    EXPECT_TRUE(res.passed) << p;
  }
  const auto res = complete_monotonicity_check([](double x) { return normal_pdf(std::sqrt(x)); }, grid, 8);
  EXPECT_TRUE(res.passed);
}

TEST(CompleteMonotonicity, StablePasses) {
  const auto grid = log_spaced_grid(1e-2, 30.0, 25);
  for (double p : {0.7, 1.0, 1.5}) {
    const auto f = MixtureFamily::symmetric_stable(p);
    const auto res = complete_monotonicity_check([&f](double x) { return density(f, std::sqrt(x)); }, grid, 4);
    EXPECT_TRUE(res.passed) << p;
  }
}

TEST(CompleteMonotonicity, CubicExponentFailsAtSecondOrder) {
  const auto grid = log_spaced_grid(1e-3, 50.0, 60);
  const auto res =
      complete_monotonicity_check([](double x) { return std::exp(-std::pow(std::sqrt(x), 3.0)); }, grid, 6);
  ASSERT_FALSE(res.passed);
  ASSERT_TRUE(res.violation.has_value());
  EXPECT_EQ(res.violation->order, 2);
  EXPECT_LT(res.violation->x, 0.1);
  // second derivative e^{-x^{3/2}} (9x/4 - 3/(4 sqrt x)) is negative below x = 1/3
  EXPECT_LT(res.violation->x, 1.0 / 3.0);
}

TEST(CompleteMonotonicity, RejectsBadInput) {
  const std::vector<double> grid{1.0, 0.5};
  EXPECT_THROW(complete_monotonicity_check([](double x) { return x; }, grid, 3), std::invalid_argument);
  const auto ok = log_spaced_grid(1.0, 2.0, 3);
  EXPECT_THROW(complete_monotonicity_check([](double x) { return x; }, ok, 1), std::invalid_argument);
}
