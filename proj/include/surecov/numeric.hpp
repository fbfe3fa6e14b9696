#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace surecov {

/// Pairwise (cascade) summation; rounding error grows as O(log n).
double pairwise_sum(std::span<const double> values);

/// Standard normal CDF through the complementary error function.
double normal_cdf(double x);

/// Kolmogorov-Smirnov distance sup_x |F_n(x) - Phi(x)| of a sample against
/// the standard normal. Requires at least two values.
double ks_distance_normal(std::vector<double> sample);

struct MomentSummary {
  double mean = 0.0;
  double variance = 0.0;  // unbiased, divisor n - 1
  double std_error = 0.0; // sqrt(variance / n)
};

/// Mean, unbiased variance and standard error; variance and SE are 0 for a
/// single value.
MomentSummary summarize(std::span<const double> values);

/// Least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for replication `index` of a run seeded with `base`. Depends only on
/// the pair, so scheduling order never changes a stream.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

}  // namespace surecov
