#include "v2g/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "v2g/distributions.hpp"
#include "v2g/errors.hpp"

namespace v2g {
namespace {

TEST(SteadyMean, ConstantSeries) {
  const std::vector<double> t{0, 50, 300, 1440};
  const std::vector<double> v(4, 7.0);
  for (const double w : {0.0, 10.0, 200.0, 1439.0}) EXPECT_DOUBLE_EQ(steady_mean(t, v, w), 7.0);
}

TEST(SteadyMean, StepFunctionAfterWarmup) {
  const std::vector<double> t{0, 100, 200, 1440};
  const std::vector<double> v{0, 0, 10, 10};
  EXPECT_DOUBLE_EQ(steady_mean(t, v, 200), 10.0);
  // Warm-up inside a segment: [150, 200) at 0, [200, 1440) at 10.
  EXPECT_DOUBLE_EQ(steady_mean(t, v, 150), 10.0 * 1240 / 1290);
  // No warm-up: the time weights are 100, 100, 1240 over 1440.
  EXPECT_DOUBLE_EQ(steady_mean(t, v, 0), 10.0 * 1240 / 1440);
}

TEST(SteadyMean, Errors) {
  const std::vector<double> t{0, 100, 200};
  const std::vector<double> v{1, 2, 3};
  EXPECT_THROW(steady_mean(t, v, 200), InsufficientDataError);
  EXPECT_THROW(steady_mean(t, v, 500), InsufficientDataError);
  EXPECT_THROW(steady_mean({}, {}, 0), InsufficientDataError);
  EXPECT_THROW(steady_mean(t, std::vector<double>{1, 2}, 0), DomainError);
}

TEST(SteadyMean, NonnegativeForNonnegativeSeries) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 100);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> t{0}, v{u(rng)};
    for (int i = 0; i < 50; ++i) {
      t.push_back(t.back() + u(rng) + 0.01);
      v.push_back(u(rng));
    }
    ASSERT_GE(steady_mean(t, v, t[10]), 0.0);
  }
}

TEST(RelativeError, Examples) {
  EXPECT_NEAR(relative_error(95, 100), -0.05, 1e-15);
  EXPECT_EQ(relative_error(100, 100), 0.0);
  EXPECT_THROW(relative_error(5, 0), DomainError);
}

TEST(RelativeError, LiteralFormula) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1000, 1000);
  for (int i = 0; i < 10'000; ++i) {
    const double s = u(rng);
    double a = u(rng);
    if (a == 0) a = 1;
    ASSERT_NEAR(relative_error(s, a) * a, s - a, 1e-12 * std::max(1.0, std::abs(s - a)));
  }
}

TEST(KolmogorovSurvival, TabulatedQuantiles) {
  EXPECT_NEAR(kolmogorov_survival(1.2238478702170823), 0.10, 1e-6);
  EXPECT_NEAR(kolmogorov_survival(1.3580986393225507), 0.05, 1e-6);
  EXPECT_NEAR(kolmogorov_survival(1.6276236115189502), 0.01, 1e-6);
  EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
  EXPECT_NEAR(kolmogorov_survival(0.2), 1.0, 1e-12);
  EXPECT_LT(kolmogorov_survival(3.0), 1e-6);
}

TEST(KsExponential, ConstantSampleRejected) {
  const std::vector<double> xs(5000, 50.0);
  EXPECT_LT(ks_exponential(xs, 1.0 / 50).p_value, 1e-6);
}

TEST(KsExponential, TooFewSamples) {
  EXPECT_THROW(ks_exponential(std::vector<double>{}, 1.0), InsufficientDataError);
  EXPECT_THROW(ks_exponential(std::vector<double>(19, 1.0), 1.0), InsufficientDataError);
  EXPECT_THROW(ks_exponential(std::vector<double>(30, 1.0), 0.0), ConfigurationError);
}

TEST(KsExponential, StatisticAgainstBruteForce) {
  RandomStream s(12, 1);
  std::vector<double> xs(200);
  for (auto& x : xs) x = sample(Exponential{0.5}, s);
  // Maximize |F_n(x) - F(x)| by evaluating both one-sided limits at every sample.
  double d = 0.0;
  for (const double x : xs) {
    std::size_t below = 0, at_or_below = 0;
    for (const double y : xs) {
      below += y < x;
      at_or_below += y <= x;
    }
    const double f = 1 - std::exp(-0.5 * x);
    d = std::max({d, std::abs(below / 200.0 - f), std::abs(at_or_below / 200.0 - f)});
  }
  EXPECT_NEAR(ks_exponential(xs, 0.5).statistic, d, 1e-12);
}

TEST(KsExponential, CalibratedUnderNull) {
  const int trials = 1000;
  const double alpha = 0.01;
  RandomStream s(99, 5);
  std::vector<double> xs(5000);
  int rejections = 0;
  for (int t = 0; t < trials; ++t) {
    for (auto& x : xs) x = sample(Exponential{1.0 / 50}, s);
    rejections += ks_exponential(xs, 1.0 / 50).p_value <= alpha;
  }
  const double freq = rejections / double(trials);
  EXPECT_NEAR(freq, alpha, 2 * std::sqrt(alpha * (1 - alpha) / trials));
}

TEST(KsExponential, DetectsWrongRate) {
  RandomStream s(3, 3);
  std::vector<double> xs(5000);
  for (auto& x : xs) x = sample(Exponential{1.0 / 45}, s);
  EXPECT_LT(ks_exponential(xs, 1.0 / 50).p_value, 0.01);
}

TEST(Aggregate, Examples) {
  const SteadyStateEstimate a = aggregate(std::vector<double>{10, 10, 10});
  EXPECT_EQ(a.mean, 10);
  EXPECT_EQ(a.half_width, 0);
  EXPECT_EQ(a.replication_count, 3u);
  EXPECT_EQ(aggregate(std::vector<double>{9, 11}).mean, 10);
  EXPECT_THROW(aggregate(std::vector<double>{4}), InsufficientDataError);
  EXPECT_THROW(aggregate(std::vector<double>{}), InsufficientDataError);
}

TEST(Aggregate, StudentTHalfWidth) {
  // t_{0.975, 1} = 12.706204736..., sd of {9, 11} is sqrt(2).
  EXPECT_NEAR(aggregate(std::vector<double>{9, 11}).half_width, 12.706204736174707 * std::sqrt(2.0) /
                                                                   std::sqrt(2.0),
              1e-9);
  // t_{0.975, 29} = 2.045229642132703.
  std::vector<double> v(30);
  for (int i = 0; i < 30; ++i) v[i] = i;
  const double sd = std::sqrt(30.0 * 31.0 / 12.0);
  EXPECT_NEAR(aggregate(v).half_width, 2.045229642132703 * sd / std::sqrt(30.0), 1e-9);
}

}  // namespace
}  // namespace v2g
