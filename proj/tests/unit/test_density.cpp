#include <gtest/gtest.h>

#include <cmath>

#include "enerkin/density.hpp"
#include "enerkin/error.hpp"

using namespace enerkin;

TEST(Density, ExponentialClosedForms) {
  const auto d = DensityFamily::exponential(2.0);
  EXPECT_DOUBLE_EQ(d.pdf(0.5), 2.0 * std::exp(-1.0));
  EXPECT_DOUBLE_EQ(d.cdf(0.5), 1.0 - std::exp(-1.0));
  EXPECT_DOUBLE_EQ(d.survival(30.0), std::exp(-60.0));
  EXPECT_DOUBLE_EQ(d.mean(), 0.5);
  EXPECT_EQ(d.pdf(-1.0), 0.0);
}

TEST(Density, ShiftedGammaMeanAndSupport) {
  const auto d = DensityFamily::shifted_gamma(2.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(d.mean(), 3.0);
  EXPECT_EQ(d.pdf(0.9), 0.0);
  EXPECT_EQ(d.support_lower(), 1.0);
  EXPECT_NEAR(d.pdf(2.0), std::exp(-1.0), 1e-15);
  double nu, beta, offset;
  ASSERT_TRUE(d.as_gamma(nu, beta, offset));
  EXPECT_EQ(nu, 2.0);
  EXPECT_EQ(offset, 1.0);
}

TEST(Density, RejectsBadParameters) {
  EXPECT_THROW(DensityFamily::gamma(0.0, 1.0), ValidationError);
  EXPECT_THROW(DensityFamily::gamma(1.0, -1.0), ValidationError);
  EXPECT_THROW(DensityFamily::exponential(0.0), ValidationError);
  EXPECT_THROW(DensityFamily::uniform(2.0, 1.0), ValidationError);
  EXPECT_THROW(DensityFamily::tabulated(1.0, {0.5, 0.5}), ValidationError);
  EXPECT_NO_THROW(DensityFamily::tabulated(1.0, {0.5, 0.5}, true));
  EXPECT_NO_THROW(DensityFamily::tabulated(2.0, {0.5, 0.5}));
}

TEST(Density, TabulatedPiecewiseConstant) {
  const auto d = DensityFamily::tabulated(2.0, {0.25, 0.75});
  EXPECT_EQ(d.pdf(0.5), 0.25);
  EXPECT_EQ(d.pdf(1.5), 0.75);
  EXPECT_DOUBLE_EQ(d.cdf(1.0), 0.25);
  EXPECT_DOUBLE_EQ(d.cdf(1.5), 0.625);
  EXPECT_DOUBLE_EQ(d.mean(), 0.25 * 0.5 + 0.75 * 1.5);
  EXPECT_EQ(d.cdf(5.0), 1.0);
}

TEST(Density, ShiftedWrapsBase) {
  const auto base = DensityFamily::uniform(0.0, 2.0);
  const auto d = DensityFamily::shifted(base, 1.0);
  EXPECT_EQ(d.pdf(0.5), 0.0);
  EXPECT_EQ(d.pdf(1.5), 0.5);
  EXPECT_DOUBLE_EQ(d.cdf(2.0), 0.5);
  EXPECT_DOUBLE_EQ(d.mean(), 2.0);
  double nu, beta, offset;
  EXPECT_FALSE(d.as_gamma(nu, beta, offset));
  const auto e = DensityFamily::shifted(DensityFamily::exponential(1.0), 0.5);
  ASSERT_TRUE(e.as_gamma(nu, beta, offset));
  EXPECT_EQ(nu, 1.0);
  EXPECT_EQ(offset, 0.5);
}

TEST(Density, SampleMomentsMatch) {
  for (const auto& d : {DensityFamily::exponential(1.5), DensityFamily::gamma(2.5, 2.0),
                        DensityFamily::uniform(1.0, 3.0),
                        DensityFamily::tabulated(3.0, {0.1, 0.2, 0.7}, true),
                        DensityFamily::shifted(DensityFamily::gamma(0.5, 1.0), 2.0)}) {
    Rng rng(5);
    const int n = 100000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = d.sample(rng);
      ASSERT_GE(x, d.support_lower());
      sum += x;
      sq += x * x;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sq / n - mean * mean);
    EXPECT_NEAR(mean, d.mean(), 4.0 * sd / std::sqrt(n)) << d.kind_name();
  }
}

TEST(Density, JsonRoundTrip) {
  for (const auto& d : {DensityFamily::exponential(1.5), DensityFamily::shifted_gamma(2.5, 2.0, 1.0),
                        DensityFamily::uniform(1.0, 3.0),
                        DensityFamily::tabulated(3.0, {0.1, 0.2, 0.7}, true),
                        DensityFamily::shifted(DensityFamily::gamma(0.5, 1.0), 2.0)}) {
    const auto j = d.to_json();
    EXPECT_EQ(DensityFamily::from_json(j).to_json(), j);
  }
  EXPECT_THROW(DensityFamily::from_json({{"kind", "lognormal"}}), ValidationError);
  EXPECT_THROW(DensityFamily::from_json({{"kind", "gamma"}, {"nu", 0}, {"beta", 1}}), ValidationError);
}
