#pragma once

#include <cstdint>

namespace v2g {

// Steady-state closed forms for the three-queue M/M/inf network:
//
//   external Poisson(lambda) --p1--> RDQ  --(1-q1)--> RUDQ --(1-q2)--> RUQ --> out
//                            --p2--> RUDQ
//                            --p3--> RUQ
//
// RDQ holds EVs below their lower SOC target (regulation-down only), RUDQ those
// between the targets (up and down), RUQ those at or above the upper target
// (regulation-up only). All rates are per minute.

struct NetworkParams {
  double lambda;
  double p1, p2, p3;
  double q1, q2;
  double mu1, mu2, mu3;
  double p_ev;  // regulation power per EV, kW
};

/// Throws ConfigurationError naming the offending field.
void validate(const NetworkParams& params);

struct FlowRates {
  double lambda1;   // external arrivals to RDQ
  double lambda2;   // external arrivals to RUDQ
  double lambda3;   // external arrivals to RUQ
  double lambda12;  // RDQ -> RUDQ
  double lambda23;  // RUDQ -> RUQ
};

struct ExpectedCounts {
  double l1, l2, l3;
};

struct Capacities {
  double c_rd;  // kW
  double c_ru;  // kW
};

struct AnalyticResult {
  FlowRates flows;
  ExpectedCounts counts;
  double departure_rate;
  Capacities capacities;
};

FlowRates compute_flows(const NetworkParams& params);

/// Steady-state probability of n EVs in an M/M/inf queue: Poisson pmf with
/// mean arrival_rate / service_rate, evaluated in log space.
double occupancy_pmf(double arrival_rate, double service_rate, std::int64_t n);

ExpectedCounts expected_counts(const NetworkParams& params);

/// Total rate of EVs leaving the network; equals lambda by flow conservation.
double departure_rate(const FlowRates& flows, double q1, double q2);

Capacities capacities(double p_ev, double l1, double l2, double l3);
inline Capacities capacities(double p_ev, const ExpectedCounts& l) {
  return capacities(p_ev, l.l1, l.l2, l.l3);
}

/// Minutes needed to move SOC from x_now to x_target at a constant normalized
/// rate (fraction of capacity per minute).
double charging_duration(double x_now, double x_target, double rate);

AnalyticResult evaluate(const NetworkParams& params);

}  // namespace v2g
