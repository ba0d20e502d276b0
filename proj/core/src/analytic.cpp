#include "v2g/analytic.hpp"

#include <cmath>
#include <string>

#include "v2g/errors.hpp"

namespace v2g {
namespace {

constexpr double kSplitTolerance = 1e-9;

void require_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw ConfigurationError(std::string(name) + " must lie in [0, 1], got " + std::to_string(v));
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ConfigurationError(std::string(name) + " must be > 0, got " + std::to_string(v));
}

}  // namespace

void validate(const NetworkParams& p) {
  require_positive(p.lambda, "lambda");
  require_positive(p.mu1, "mu1");
  require_positive(p.mu2, "mu2");
  require_positive(p.mu3, "mu3");
  require_positive(p.p_ev, "p_ev");
  require_unit(p.p1, "p1");
  require_unit(p.p2, "p2");
  require_unit(p.p3, "p3");
  require_unit(p.q1, "q1");
  require_unit(p.q2, "q2");
  if (std::abs(p.p1 + p.p2 + p.p3 - 1.0) > kSplitTolerance)
    throw ConfigurationError("p1 + p2 + p3 must equal 1");
}

FlowRates compute_flows(const NetworkParams& p) {
  validate(p);
  FlowRates f{};
  f.lambda1 = p.p1 * p.lambda;
  f.lambda2 = p.p2 * p.lambda;
  f.lambda3 = p.p3 * p.lambda;
  f.lambda12 = (1.0 - p.q1) * f.lambda1;
  f.lambda23 = (1.0 - p.q2) * (f.lambda2 + f.lambda12);
  return f;
}

double occupancy_pmf(double arrival_rate, double service_rate, std::int64_t n) {
  if (!(service_rate > 0.0)) throw ConfigurationError("service_rate must be > 0");
  if (!(arrival_rate >= 0.0)) throw ConfigurationError("arrival_rate must be >= 0");
  if (n < 0) throw DomainError("occupancy count must be >= 0");
  const double a = arrival_rate / service_rate;
  if (a == 0.0) return n == 0 ? 1.0 : 0.0;
  const auto k = static_cast<double>(n);
  return std::exp(k * std::log(a) - a - std::lgamma(k + 1.0));
}

ExpectedCounts expected_counts(const NetworkParams& p) {
  validate(p);
  const double pass_rdq = p.p1 * p.q1;
  return {
      .l1 = p.p1 * p.lambda / p.mu1,
      .l2 = p.lambda * (p.p1 + p.p2 - pass_rdq) / p.mu2,
      .l3 = p.lambda *
            (1.0 - pass_rdq - p.p1 * p.q2 - p.p2 * p.q2 + pass_rdq * p.q2) / p.mu3,
  };
}

double departure_rate(const FlowRates& f, double q1, double q2) {
  return q1 * f.lambda1 + q2 * (f.lambda2 + f.lambda12) + (f.lambda3 + f.lambda23);
}

Capacities capacities(double p_ev, double l1, double l2, double l3) {
  if (p_ev < 0.0 || l1 < 0.0 || l2 < 0.0 || l3 < 0.0)
    throw DomainError("capacities: inputs must be >= 0");
  return {.c_rd = p_ev * (l1 + l2), .c_ru = p_ev * (l2 + l3)};
}

double charging_duration(double x_now, double x_target, double rate) {
  if (!(rate > 0.0)) throw ConfigurationError("charging rate must be > 0");
  if (x_target < x_now) throw DomainError("target SOC below current SOC");
  return (x_target - x_now) / rate;
}

AnalyticResult evaluate(const NetworkParams& p) {
  AnalyticResult r{};
  r.flows = compute_flows(p);
  r.counts = expected_counts(p);
  r.departure_rate = departure_rate(r.flows, p.q1, p.q2);
  r.capacities = capacities(p.p_ev, r.counts);
  return r;
}

}  // namespace v2g
