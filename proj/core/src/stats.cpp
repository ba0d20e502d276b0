#include "v2g/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "v2g/errors.hpp"

namespace v2g {

double steady_mean(std::span<const double> times, std::span<const double> values,
                   double warmup) {
  if (times.size() != values.size()) throw DomainError("steady_mean: length mismatch");
  if (times.empty() || !(times.back() > warmup))
    throw InsufficientDataError("steady_mean: no data after warm-up");
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double lo = std::max(times[i], warmup);
    const double hi = times[i + 1];
    if (hi > lo) area += values[i] * (hi - lo);
  }
  return area / (times.back() - std::max(times.front(), warmup));
}

double relative_error(double simulated, double analytical) {
  if (analytical == 0.0) throw DomainError("relative_error: analytical value is zero");
  return (simulated - analytical) / analytical;
}

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  // The alternating series converges slowly near 0, where the tail is ~1.
  if (x < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (k >= 10 && term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_exponential(std::span<const double> samples, double rate) {
  if (!(rate > 0.0)) throw ConfigurationError("ks_exponential: rate must be > 0");
  if (samples.size() < kMinKsSamples)
    throw InsufficientDataError("ks_exponential: need at least 20 samples");

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = sorted[i] > 0.0 ? -std::expm1(-rate * sorted[i]) : 0.0;
    const double above = static_cast<double>(i + 1) / n - cdf;
    const double below = cdf - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  const double root_n = std::sqrt(n);
  const double p = kolmogorov_survival((root_n + 0.12 + 0.11 / root_n) * d);
  return {.statistic = d, .p_value = p, .sample_size = sorted.size()};
}

SteadyStateEstimate aggregate(std::span<const double> replication_means) {
  const std::size_t n = replication_means.size();
  if (n < 2) throw InsufficientDataError("aggregate: need at least 2 replications");
  const double mean =
      std::accumulate(replication_means.begin(), replication_means.end(), 0.0) /
      static_cast<double>(n);
  double ss = 0.0;
  for (const double v : replication_means) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const boost::math::students_t t(static_cast<double>(n - 1));
  const double quantile = boost::math::quantile(boost::math::complement(t, 0.025));
  return {.mean = mean,
          .half_width = quantile * sd / std::sqrt(static_cast<double>(n)),
          .replication_count = n};
}

}  // namespace v2g
