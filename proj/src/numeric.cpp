#include "surecov/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "surecov/error.hpp"

namespace surecov {

namespace {

constexpr std::size_t kPairwiseBlock = 32;

double pairwise_sum_impl(const double* first, std::size_t count) {
  if (count <= kPairwiseBlock) {
    double acc = 0.0;
    for (std::size_t k = 0; k < count; ++k) acc += first[k];
    return acc;
  }
  const std::size_t half = count / 2;
  return pairwise_sum_impl(first, half) + pairwise_sum_impl(first + half, count - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  return pairwise_sum_impl(values.data(), values.size());
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double ks_distance_normal(std::vector<double> sample) {
  if (sample.size() < 2) {
    throw ConfigError("KS distance is undefined for fewer than two values");
  }
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    const double f = normal_cdf(sample[k]);
    const double upper = static_cast<double>(k + 1) / n - f;
    const double lower = f - static_cast<double>(k) / n;
    d = std::max({d, upper, lower});
  }
  return d;
}

MomentSummary summarize(std::span<const double> values) {
  MomentSummary out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = pairwise_sum(values) / n;
  if (values.size() < 2) return out;
  std::vector<double> sq(values.size());
  std::transform(values.begin(), values.end(), sq.begin(),
                 [m = out.mean](double v) { return (v - m) * (v - m); });
  out.variance = pairwise_sum(sq) / (n - 1.0);
  out.std_error = std::sqrt(out.variance / n);
  return out;
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DimensionError("ols_slope: need two equally sized series of length >= 2");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  if (sxx == 0.0) throw DimensionError("ols_slope: x values are all equal");
  return sxy / sxx;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return mix64(mix64(base) ^ mix64(index ^ 0xd1b54a32d192ed03ULL));
}

}  // namespace surecov
