#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "gmix/convex.hpp"
#include "support/oracles.hpp"

using namespace gmix;

namespace {

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace

TEST(SymmetricConvexBody, MembershipIsSymmetric) {
  const auto k = SymmetricConvexBody::slabs(2, {{{1.0, 1.0}, 1.0}, {{1.0, -2.0}, 1.5}});
  RandomStream rs(1);
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> x{2.0 * rs.normal(), 2.0 * rs.normal()};
    const std::vector<double> y{-x[0], -x[1]};
    EXPECT_EQ(k.contains(x), k.contains(y));
  }
  EXPECT_TRUE(k.contains(std::vector<double>{0.5, 0.5}));
  EXPECT_FALSE(k.contains(std::vector<double>{0.6, 0.5}));
}

TEST(SymmetricConvexBody, Inradius) {
  EXPECT_DOUBLE_EQ(SymmetricConvexBody::slab({3.0, 4.0}, 2.0).inradius(), 0.4);
  EXPECT_DOUBLE_EQ(SymmetricConvexBody::cube(3, 0.7).inradius(), 0.7);
  EXPECT_EQ(SymmetricConvexBody::whole_space(2).inradius(), kInf);
  const auto ellipse = SymmetricConvexBody::diagonal_image(SymmetricConvexBody::ball(2, 2.0), {0.5, 3.0});
  EXPECT_DOUBLE_EQ(ellipse.inradius(), 1.0);
  const auto box = SymmetricConvexBody::diagonal_image(SymmetricConvexBody::cube(2), {0.5, 3.0});
  EXPECT_DOUBLE_EQ(box.inradius(), 0.5);
  EXPECT_TRUE(box.contains(std::vector<double>{0.5, -3.0}));
  EXPECT_FALSE(box.contains(std::vector<double>{0.51, 0.0}));
}

TEST(SymmetricConvexBody, RejectsInvalidInput) {
  EXPECT_THROW(SymmetricConvexBody::slab({0.0, 0.0}, 1.0), DomainError);
  EXPECT_THROW(SymmetricConvexBody::slab({1.0, 0.0}, 0.0), DomainError);
  EXPECT_THROW(SymmetricConvexBody::slabs(2, {{{1.0}, 1.0}}), std::invalid_argument);
  EXPECT_THROW(SymmetricConvexBody::ball(2, -1.0), DomainError);
  EXPECT_THROW(SymmetricConvexBody::diagonal_image(SymmetricConvexBody::cube(2), {1.0, 0.0}), DomainError);
  EXPECT_THROW(SymmetricConvexBody::cube(2).contains(std::vector<double>{1.0}), std::invalid_argument);
}

TEST(CertifiedSubset, SlabDominance) {
  EXPECT_TRUE(certified_subset(SymmetricConvexBody::cube(2, 1.0), SymmetricConvexBody::cube(2, 2.0)));
  EXPECT_FALSE(certified_subset(SymmetricConvexBody::cube(2, 2.0), SymmetricConvexBody::cube(2, 1.0)));
  EXPECT_TRUE(certified_subset(SymmetricConvexBody::slab({2.0, 0.0}, 1.0), SymmetricConvexBody::slab({-1.0, 0.0}, 0.5)));
  EXPECT_FALSE(certified_subset(SymmetricConvexBody::ball(2), SymmetricConvexBody::cube(2)));
}

TEST(GaussianMeasure, ClosedForms) {
  const RandomStream rs(2);
  EXPECT_EQ(gaussian_measure(SymmetricConvexBody::whole_space(2), 10, rs).value, 1.0);
  const double oracle = 2.0 * oracle::simpson(std_normal_pdf, 0.0, 1.0, 20000);
  const auto axis = gaussian_measure(SymmetricConvexBody::slab({1.0, 0.0}, 1.0), 10, rs);
  EXPECT_NEAR(axis.value, oracle, 1e-12);
  EXPECT_NEAR(axis.value, 0.6826895, 1e-7);
  EXPECT_EQ(axis.std_error, 0.0);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(gaussian_measure(SymmetricConvexBody::slab({r, r}, 1.0), 10, rs).value, oracle, 1e-12);
  // disc of radius 1.5: P(chi^2_2 <= 2.25) = 1 - e^{-1.125}
  EXPECT_NEAR(gaussian_measure(SymmetricConvexBody::ball(2, 1.5), 10, rs).value, 1.0 - std::exp(-1.125), 1e-14);
}

TEST(GaussianMeasure, MonteCarloMatchesProductForBox) {
  const std::vector<double> w{0.5, 1.0, 2.0};
  const auto e = gaussian_measure(SymmetricConvexBody::box(w), 200000, RandomStream(3));
  double expected = 1.0;
  for (double c : w) expected *= 2.0 * oracle::simpson(std_normal_pdf, 0.0, c, 20000);
  EXPECT_GT(e.std_error, 0.0);
  EXPECT_NEAR(e.value, expected, 3.0 * e.std_error);
}

TEST(GaussianMeasure, MonotoneUnderDiagonalScaling) {
  const auto k = SymmetricConvexBody::slabs(2, {{{1.0, 1.0}, 1.0}, {{1.0, -2.0}, 1.5}, {{0.0, 1.0}, 0.8}});
  const auto zs = gaussian_samples(2, 100000, RandomStream(4));
  std::vector<std::vector<double>> hits;
  for (double t : {0.5, 1.0, 2.0, 4.0}) {
    const auto body = SymmetricConvexBody::diagonal_image(k, {t, 1.0});
    std::vector<double> h(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) h[i] = body.contains(zs.row(i)) ? 1.0 : 0.0;
    hits.push_back(std::move(h));
  }
  for (std::size_t s = 0; s + 1 < hits.size(); ++s) {
    std::vector<double> diff(zs.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = hits[s + 1][i] - hits[s][i];
    const auto d = weighted_mean(diff);
    EXPECT_GE(d.mean, -3.0 * d.std_error) << s;
  }
}

TEST(MixtureMeasure, LaplaceInterval) {
  const double oracle = oracle::simpson([](double t) { return 0.5 * std::exp(-std::abs(t)); }, -1.0, 1.0, 20000);
  EXPECT_NEAR(oracle, 1.0 - std::exp(-1.0), 1e-12);
  const auto mu = ProductMixtureMeasure::iid(MixtureFamily::exponential_power(1.0), 1);
  const auto k = SymmetricConvexBody::cube(1);
  for (auto method : {MeasureMethod::direct, MeasureMethod::mixing}) {
    const auto e = mixture_measure(mu, k, 200000, RandomStream(5), method);
    EXPECT_NEAR(e.value, oracle, 3.0 * e.std_error);
  }
  EXPECT_EQ(mixture_measure(mu, SymmetricConvexBody::whole_space(1), 100, RandomStream(5)).value, 1.0);
}

TEST(MixtureMeasure, BoxFactorizes) {
  const ProductMixtureMeasure mu{{MixtureFamily::exponential_power(0.7), MixtureFamily::symmetric_stable(1.0),
                                  MixtureFamily::discrete({0.5, 2.0}, {0.3, 0.7})}};
  const std::vector<double> w{1.0, 2.0, 1.5};
  // Cauchy CDF in closed form; the other factors from the library's one-dimensional CDFs
  const double expected = (2.0 * cdf(mu.factors[0], 1.0) - 1.0) * (2.0 * std::atan(2.0) / std::numbers::pi) *
                          (2.0 * cdf(mu.factors[2], 1.5) - 1.0);
  for (auto method : {MeasureMethod::direct, MeasureMethod::mixing}) {
    const auto e = mixture_measure(mu, SymmetricConvexBody::box(w), 200000, RandomStream(6), method);
    EXPECT_NEAR(e.value, expected, 3.0 * e.std_error) << static_cast<int>(method);
  }
}

TEST(MixtureMeasure, ContainmentIsMonotone) {
  const auto mu = ProductMixtureMeasure::iid(MixtureFamily::symmetric_stable(1.5), 2);
  const auto small = SymmetricConvexBody::slabs(2, {{{1.0, 1.0}, 1.0}, {{1.0, -1.0}, 0.5}});
  const auto large = SymmetricConvexBody::slabs(2, {{{2.0, 2.0}, 3.0}, {{1.0, -1.0}, 0.9}});
  ASSERT_TRUE(certified_subset(small, large));
  const auto a = mixture_measure(mu, small, 50000, RandomStream(7));
  const auto b = mixture_measure(mu, large, 50000, RandomStream(7));
  EXPECT_LE(a.value, b.value);
}

TEST(MixtureMeasure, DiagonalImageMatchesRescaledGaussianFactors) {
  const auto k = SymmetricConvexBody::slabs(2, {{{1.0, 1.0}, 1.0}, {{1.0, -2.0}, 1.5}});
  const std::vector<double> d{2.0, 0.5};
  const auto image = mixture_measure(ProductMixtureMeasure::iid(MixtureFamily::gaussian(), 2),
                                     SymmetricConvexBody::diagonal_image(k, d), 50000, RandomStream(8));
  const ProductMixtureMeasure rescaled{{MixtureFamily::gaussian(1.0 / d[0]), MixtureFamily::gaussian(1.0 / d[1])}};
  const auto direct = mixture_measure(rescaled, k, 50000, RandomStream(8));
  EXPECT_NEAR(image.value, direct.value, 1e-12);
}

TEST(SpectralStable, CoordinateAtomsGiveIndependentCoordinates) {
  const SpectralStableVector x{1.2, {{{1.0, 0.0}, 1.0}, {{0.0, 1.0}, 1.0}}};
  const auto s = spectral_stable_sample(x, 100000, RandomStream(9));
  // quadrant and box probabilities factorize
  std::vector<double> both(s.size()), first(s.size()), second(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    first[i] = s.row(i)[0] > 0.7 ? 1.0 : 0.0;
    second[i] = std::abs(s.row(i)[1]) < 0.4 ? 1.0 : 0.0;
    both[i] = first[i] * second[i];
  }
  const double p1 = weighted_mean(first).mean, p2 = weighted_mean(second).mean;
  const auto pb = weighted_mean(both);
  EXPECT_NEAR(pb.mean, p1 * p2, 4.0 * pb.std_error);
}

TEST(SpectralStable, GaussianCovariance) {
  const double r = 1.0 / std::sqrt(2.0);
  const SpectralStableVector x{2.0, {{{1.0, 0.0}, 1.0}, {{r, r}, 0.5}}};
  const auto s = spectral_stable_sample(x, 200000, RandomStream(10));
  // 2 sum m_k u_k u_k^T
  const double expected[2][2] = {{2.5, 0.5}, {0.5, 0.5}};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      std::vector<double> prod(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) prod[i] = s.row(i)[a] * s.row(i)[b];
      const auto m = weighted_mean(prod);
      EXPECT_NEAR(m.mean, expected[a][b], 3.0 * m.std_error) << a << b;
    }
}

TEST(SpectralStable, OneAtomLivesOnALine) {
  const SpectralStableVector x{0.8, {{{0.6, -0.8}, 2.0}}};
  const auto s = spectral_stable_sample(x, 1000, RandomStream(11));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto row = s.row(i);
    EXPECT_NEAR(row[0] * -0.8 - row[1] * 0.6, 0.0, 1e-12 * (std::abs(row[0]) + std::abs(row[1])));
  }
}

TEST(SpectralStable, ProjectionsAreCauchyWithSpectralScale) {
  const double r = 1.0 / std::sqrt(2.0);
  const SpectralStableVector x{1.0, {{{1.0, 0.0}, 1.0}, {{r, r}, 2.0}, {{0.0, 1.0}, 0.5}}};
  const auto s = spectral_stable_sample(x, 50000, RandomStream(12));
  const double theta[2] = {0.6, 0.8};
  // scale sum m_k |<theta, u_k>|
  const double scale = 1.0 * 0.6 + 2.0 * (0.6 + 0.8) * r + 0.5 * 0.8;
  std::vector<double> proj(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) proj[i] = theta[0] * s.row(i)[0] + theta[1] * s.row(i)[1];
  const auto ks = oracle::ks_one_sample(proj, [scale](double t) { return 0.5 + std::atan(t / scale) / std::numbers::pi; });
  EXPECT_GT(ks.p_value, 1e-3);
}

TEST(SpectralStable, Validation) {
  EXPECT_THROW(spectral_stable_sample(SpectralStableVector{2.5, {{{1.0}, 1.0}}}, 10, RandomStream(1)), DomainError);
  EXPECT_THROW(spectral_stable_sample(SpectralStableVector{1.0, {{{1.0}, 0.0}}}, 10, RandomStream(1)), DomainError);
  EXPECT_THROW(spectral_stable_sample(SpectralStableVector{1.0, {{{2.0}, 1.0}}}, 10, RandomStream(1)), DomainError);
  EXPECT_THROW(spectral_stable_sample(SpectralStableVector{1.0, {}}, 10, RandomStream(1)), std::invalid_argument);
}
