#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "surecov/error.hpp"
#include "surecov/numeric.hpp"

using namespace surecov;

TEST(NormalCdf, ReferenceValues) {
  // 30-digit reference values
  const std::vector<std::pair<double, double>> ref = {
      {-8.0, 6.2209605742717841235e-16}, {-5.0, 2.8665157187919391167e-7},
      {-3.0, 0.0013498980316300945267},  {-1.0, 0.15865525393145705141},
      {-0.5, 0.30853753872598689636},    {0.0, 0.5},
      {0.5, 0.69146246127401310364},     {1.0, 0.84134474606854294859},
      {2.0, 0.9772498680518207928},      {3.0, 0.99865010196836990547},
      {5.0, 0.99999971334842812081},     {8.0, 0.9999999999999993779}};
  for (const auto& [x, phi] : ref) {
    EXPECT_LE(std::abs(normal_cdf(x) - phi), 1e-12 * phi) << "x = " << x;
  }
}

TEST(KsDistance, MatchesBruteForce) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0.3, 1.2);
  std::vector<double> xs(200);
  for (double& x : xs) x = z(rng);
  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  double d = 0.0;
  const double m = static_cast<double>(sorted.size());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const double f = 0.5 * std::erfc(-sorted[k] / std::sqrt(2.0));
    d = std::max({d, (k + 1) / m - f, f - k / m});
  }
  EXPECT_NEAR(ks_distance_normal(xs), d, 1e-15);
}

TEST(KsDistance, TwoPointSample) {
  // F_n jumps to 1/2 at 0 and to 1 at +inf-ish; sup distance is at x = 0
  EXPECT_NEAR(ks_distance_normal({0.0, 40.0}), 0.5, 1e-15);
  EXPECT_THROW(ks_distance_normal({1.0}), ConfigError);
}

TEST(PairwiseSum, ExactOnIntegersAndAccurate) {
  std::vector<double> v(10000);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = static_cast<double>(k);
  EXPECT_EQ(pairwise_sum(v), 49995000.0);
  std::vector<double> tenth(1000000, 0.1);
  EXPECT_NEAR(pairwise_sum(tenth), 100000.0, 1e-8);
  EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
}

TEST(Summarize, KnownValues) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const MomentSummary s = summarize(v);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.variance, 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.std_error, std::sqrt(5.0 / 12.0));
  const MomentSummary one = summarize(std::vector<double>{7.0});
  EXPECT_EQ(one.variance, 0.0);
  EXPECT_EQ(one.std_error, 0.0);
}

TEST(OlsSlope, Line) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{3, 5, 7, 9};
  EXPECT_NEAR(ols_slope(x, y), 2.0, 1e-14);
  const std::vector<double> flat{4, 4, 4, 4};
  EXPECT_EQ(ols_slope(x, flat), 0.0);
}

TEST(Seeds, DerivedSeedsDistinct) {
  EXPECT_EQ(derive_seed(1, 5), derive_seed(1, 5));
  EXPECT_NE(derive_seed(1, 5), derive_seed(1, 6));
  EXPECT_NE(derive_seed(1, 5), derive_seed(2, 5));
  // first splitmix64 output from state 0
  EXPECT_EQ(mix64(0), 0xE220A8397B1DCDAFULL);
}
