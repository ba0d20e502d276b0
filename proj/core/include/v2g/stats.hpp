#pragma once

#include <cstddef>
#include <span>

namespace v2g {

/// Time-weighted mean of a piecewise-constant series over [warmup, last time].
/// values[i] holds on [times[i], times[i+1]). Throws InsufficientDataError if
/// nothing remains after the warm-up.
double steady_mean(std::span<const double> times, std::span<const double> values, double warmup);

/// (simulated - analytical) / analytical. Throws DomainError if analytical == 0.
double relative_error(double simulated, double analytical);

struct KsResult {
  double statistic;
  double p_value;
  std::size_t sample_size;
};

/// Kolmogorov distribution tail P(K > x) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 x^2).
double kolmogorov_survival(double x);

/// One-sample Kolmogorov-Smirnov test against Exponential(rate), with the
/// asymptotic p-value (Stephens' finite-n correction on the statistic).
/// Requires at least kMinKsSamples samples.
KsResult ks_exponential(std::span<const double> samples, double rate);

inline constexpr std::size_t kMinKsSamples = 20;

struct SteadyStateEstimate {
  double mean;
  double half_width;  // 95% Student-t confidence half-width
  std::size_t replication_count;
};

/// Across-replication mean and 95% half-width. Needs at least two values.
SteadyStateEstimate aggregate(std::span<const double> replication_means);

}  // namespace v2g
