// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "v2g/analytic.hpp"
#include "v2g/des_engine.hpp"
#include "v2g/experiment.hpp"
#include "v2g/scenario.hpp"
#include "v2g/smart_charge.hpp"
#include "v2g/stats.hpp"

namespace {

using namespace v2g;

constexpr std::uint64_t kSeed = 1;
constexpr int kReferenceReplications = 30;
constexpr double kSteadyTolerance = 0.05;   // criterion 2
constexpr double kKsAlpha = 0.01;           // criterion 3
constexpr std::size_t kKsMinSamples = 5000; // criterion 3
constexpr std::int64_t kPsiBound = 100;     // criterion 3
constexpr int kSweepReplications = 100;     // criterion 4
constexpr double kTransientBand = 0.10;     // criterion 5
constexpr double kTransientEarliest = 100.0;
constexpr double kTransientLatest = 400.0;
constexpr int kRandomConfigs = 1000;        // criterion 6

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Criterion 1 ------------------------------------------------------------------

Outcome closed_form_regression() {
  const Capacities c = capacities(6.0, 127.32, 296.55, 129.65);
  const bool rd = std::abs(c.c_rd - 2543.22) <= 1e-9;
  const bool ru = std::abs(c.c_ru - 2557.19) <= 0.02;
  return {rd && ru, fmt("C_RD=%.6f kW (want 2543.22), C_RU=%.6f kW (want 2557.19 +/- 0.02)",
                        c.c_rd, c.c_ru)};
}

// Shared reference replications for criteria 2, 3 and 5 -----------------------

struct ReferenceRuns {
  ScenarioConfig config = reference_scenario();
  std::vector<SimTrace> traces;

  ReferenceRuns() {
    for (int i = 0; i < kReferenceReplications; ++i)
      traces.push_back(run(config, derive_seed(kSeed, static_cast<std::uint64_t>(i)),
                           config.horizon, 1.0));
  }
};

Outcome steady_state(const ReferenceRuns& ref) {
  std::vector<SimCounters> counters;
  std::array<double, kQueueCount> mean{};
  for (const auto& t : ref.traces) {
    counters.push_back(t.counters);
    const ReplicationSummary s = summarize(t, ref.config.warmup);
    for (std::size_t k = 0; k < kQueueCount; ++k) mean[k] += s.n_mean[k] / ref.traces.size();
  }
  const EmpiricalFractions f = empirical_fractions(counters, ref.config, kSeed);
  NetworkParams params = network_params(ref.config, f.p1, f.p2, f.p3);
  params.q1 = f.q1;
  params.q2 = f.q2;
  const ExpectedCounts l = expected_counts(params);
  const std::array<double, kQueueCount> expected{l.l1, l.l2, l.l3};
  bool ok = true;
  std::string detail = fmt("p=(%.4f,%.4f,%.4f) q=(%.4f,%.4f);", f.p1, f.p2, f.p3, f.q1, f.q2);
  for (std::size_t k = 0; k < kQueueCount; ++k) {
    const double err = relative_error(mean[k], expected[k]);
    ok = ok && std::abs(err) <= kSteadyTolerance;
    detail += fmt(" n%zu=%.2f vs L%zu=%.2f (%+.2f%%)", k + 1, mean[k], k + 1, expected[k],
                  100.0 * err);
  }
  return {ok, detail};
}

Outcome exponential_adoption(const ReferenceRuns& ref) {
  const std::array<double, kQueueCount> mu{ref.config.mu1, ref.config.mu2, ref.config.mu3};
  bool ok = true;
  std::string detail;
  for (std::size_t k = 0; k < kQueueCount; ++k) {
    std::vector<double> pooled;
    std::int64_t psi_max = 0;
    for (const auto& t : ref.traces) {
      pooled.insert(pooled.end(), t.adopted[k].begin(), t.adopted[k].end());
      psi_max = std::max(psi_max, *std::max_element(t.psi[k].begin(), t.psi[k].end()));
    }
    const KsResult ks = ks_exponential(pooled, mu[k]);
    const bool pass = pooled.size() >= kKsMinSamples && ks.p_value > kKsAlpha && psi_max < kPsiBound;
    ok = ok && pass;
    detail += fmt(" Q%zu: n=%zu D=%.5f p=%.3f max|Psi|=%lld;", k + 1, ks.sample_size,
                  ks.statistic, ks.p_value, static_cast<long long>(psi_max));
  }
  return {ok, detail};
}

Outcome transient(const ReferenceRuns& ref) {
  const std::size_t samples = ref.traces.front().time.size();
  const auto& time = ref.traces.front().time;
  bool ok = true;
  std::string detail;
  for (std::size_t k = 0; k < kQueueCount; ++k) {
    std::vector<double> avg(samples, 0.0);
    for (const auto& t : ref.traces)
      for (std::size_t i = 0; i < samples; ++i)
        avg[i] += static_cast<double>(t.n[k][i]) / ref.traces.size();
    const double steady = steady_mean(time, avg, ref.config.warmup);
    double first = -1.0;
    for (std::size_t i = 0; i < samples; ++i) {
      if (std::abs(avg[i] - steady) <= kTransientBand * steady) {
        first = time[i];
        break;
      }
    }
    const bool pass = first >= kTransientEarliest && first <= kTransientLatest;
    ok = ok && pass;
    detail += fmt(" Q%zu steady=%.2f first-within-10%%=%.0f min;", k + 1, steady, first);
  }
  return {ok, detail};
}

// Criterion 4 ------------------------------------------------------------------

bool overlap(const SteadyStateEstimate& a, const SteadyStateEstimate& b) {
  return a.mean - a.half_width <= b.mean + b.half_width &&
         b.mean - b.half_width <= a.mean + a.half_width;
}

struct SweepCheck {
  SweepTarget target;
  std::vector<double> mean_minutes;  // 1/mu, increasing
  bool rd_depends;
  bool ru_depends;
};

Outcome sweep_trends() {
  const std::vector<SweepCheck> sweeps = {
      {SweepTarget::kMu1, {30, 50, 70}, true, false},
      {SweepTarget::kMu2, {50, 70, 90}, true, true},
      {SweepTarget::kMu3, {10, 30, 50}, false, true},
  };
  ScenarioConfig config = reference_scenario();
  config.replications = kSweepReplications;
  ExperimentOptions options;
  options.seed = kSeed;

  bool ok = true;
  std::ostringstream detail;
  for (const auto& s : sweeps) {
    std::vector<PointResult> points;
    for (const double m : s.mean_minutes)
      points.push_back(run_point(with_parameter(config, s.target, 1.0 / m), options, "sweep",
                                 to_string(s.target), 1.0 / m));
    bool trends = true;
    bool errors = true;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
      const auto& a = points[i];
      const auto& b = points[i + 1];
      const auto increases = [](double x, double y) { return y > x; };
      if (s.rd_depends) {
        trends = trends && increases(a.analytic.capacities.c_rd, b.analytic.capacities.c_rd) &&
                 increases(a.c_rd_sim.mean, b.c_rd_sim.mean);
      }
      if (s.ru_depends) {
        trends = trends && increases(a.analytic.capacities.c_ru, b.analytic.capacities.c_ru) &&
                 increases(a.c_ru_sim.mean, b.c_ru_sim.mean);
      }
      errors = errors && std::abs(b.err_rd) >= std::abs(a.err_rd) &&
               std::abs(b.err_ru) >= std::abs(a.err_ru);
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
      for (std::size_t j = i + 1; j < points.size(); ++j) {
        if (!s.rd_depends) trends = trends && overlap(points[i].c_rd_sim, points[j].c_rd_sim);
        if (!s.ru_depends) trends = trends && overlap(points[i].c_ru_sim, points[j].c_ru_sim);
      }
      errors = errors && points[i].err_rd < 0.0 && points[i].err_ru < 0.0;
    }
    ok = ok && trends && errors;
    detail << ' ' << to_string(s.target) << "[trend " << (trends ? "ok" : "BAD") << ", error "
           << (errors ? "ok" : "BAD") << ":";
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& p = points[i];
      detail << fmt(" 1/mu=%g C_RD=%.1f+/-%.1f C_RU=%.1f+/-%.1f E=(%+.4f,%+.4f)",
                    s.mean_minutes[i], p.c_rd_sim.mean, p.c_rd_sim.half_width, p.c_ru_sim.mean,
                    p.c_ru_sim.half_width, p.err_rd, p.err_ru);
    }
    detail << ']';
  }
  return {ok, detail.str()};
}

// Criterion 6 ------------------------------------------------------------------

ScenarioConfig random_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto between = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  ScenarioConfig c = reference_scenario();
  c.lambda = between(0.05, 2.0);
  c.frac_no_charge = u(rng);
  const double soc_mean = between(0.1, 0.9);
  c.soc_init = TruncatedNormal{soc_mean, between(0.05, 0.4), 0.0, 1.0};
  c.soc_high_rule = {between(0.1, 0.9), between(0.02, 0.3)};
  const double m_lo = between(0.1, 0.9);
  c.soc_low_rule = {m_lo, between(m_lo, 1.0)};
  const double stay_mean = between(60.0, 600.0);
  const double stay_sd = between(10.0, 150.0);
  c.stay = TruncatedNormal{stay_mean, stay_sd, 30.0, stay_mean + 4.0 * stay_sd};
  c.rate_bounds = {0.0, between(0.04, 0.2)};
  c.q1 = u(rng);
  c.q2 = u(rng);
  c.mu1 = 1.0 / between(5.0, 150.0);
  c.mu2 = 1.0 / between(5.0, 150.0);
  c.mu3 = 1.0 / between(5.0, 150.0);
  c.p_ev = between(1.0, 20.0);
  c.delta_t_reg = between(0.5, 5.0);
  c.horizon = std::floor(between(0.0, 400.0));
  c.warmup = 0.0;
  c.replications = 1;
  return c;
}

Outcome invariant_suite() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int flow = 0, draws = 0, population = 0, pmf = 0, rerun = 0, identities = 0, failures = 0;

  for (int i = 0; i < kRandomConfigs; ++i) {
    const ScenarioConfig c = random_config(rng);

    double a = u(rng), b = u(rng), d = u(rng);
    const double sum = a + b + d;
    NetworkParams params = network_params(c, a / sum, b / sum, 0.0);
    params.p3 = 1.0 - params.p1 - params.p2;
    const AnalyticResult ana = evaluate(params);
    if (std::abs(ana.departure_rate - params.lambda) > 1e-9) ++flow;

    const FlowRates& f = ana.flows;
    for (const auto [arr, svc] : {std::pair{f.lambda1, params.mu1},
                                  std::pair{f.lambda2 + f.lambda12, params.mu2},
                                  std::pair{f.lambda3 + f.lambda23, params.mu3}}) {
      const double mean = arr / svc;
      const auto top = static_cast<std::int64_t>(mean + 20.0 * std::sqrt(mean) + 60.0);
      double total = 0.0;
      for (std::int64_t n = 0; n <= top; ++n) total += occupancy_pmf(arr, svc, n);
      if (std::abs(total - 1.0) > 1e-9) ++pmf;
    }

    const std::uint64_t seed = rng();
    try {
      const SimTrace t = run(c, seed, c.horizon, 1.0);
      for (std::size_t s = 0; s < t.time.size(); ++s) {
        const auto residents = t.n[0][s] + t.n[1][s] + t.n[2][s];
        if (t.arrivals[s] != static_cast<std::uint64_t>(residents) + t.departures[s]) {
          ++population;
          break;
        }
      }
      for (std::size_t s = 0; s < t.time.size(); ++s) {
        const double n1 = static_cast<double>(t.n[0][s]);
        const double n2 = static_cast<double>(t.n[1][s]);
        const double n3 = static_cast<double>(t.n[2][s]);
        if (t.c_rd[s] != c.p_ev * (n1 + n2) || t.c_ru[s] != c.p_ev * (n2 + n3)) {
          ++identities;
          break;
        }
      }
      for (std::size_t k = 0; k < kQueueCount; ++k) {
        if (t.drawn[k] != t.adopted[k].size() + static_cast<std::uint64_t>(t.psi[k].back())) {
          ++draws;
          break;
        }
      }
      if (trace_csv(t) != trace_csv(run(c, seed, c.horizon, 1.0))) ++rerun;
    } catch (const std::exception&) {
      ++failures;
    }
  }
  const int violations = flow + draws + population + pmf + rerun + identities + failures;
  return {violations == 0,
          fmt("%d configs: flow=%d draws=%d population=%d pmf=%d rerun=%d identities=%d "
              "run-failures=%d",
              kRandomConfigs, flow, draws, population, pmf, rerun, identities, failures)};
}

}  // namespace

int main() {
  int failed = 0;
  const auto report = [&](const char* id, const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  };

  report("AC1", "closed-form capacity regression", closed_form_regression);
  const ReferenceRuns ref;
  report("AC2", "steady state matches analytic counts (30 reps, 5%)",
         [&] { return steady_state(ref); });
  report("AC3", "adopted service times exponential, reservoirs bounded",
         [&] { return exponential_adoption(ref); });
  report("AC4", "service-rate sweep trends (100 reps per point)", sweep_trends);
  report("AC5", "transient reaches 10% band within [100, 400] min",
         [&] { return transient(ref); });
  report("AC6", "invariants over randomized configurations", invariant_suite);

  std::printf("%d of 6 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
