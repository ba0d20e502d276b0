#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "v2g/analytic.hpp"
#include "v2g/des_engine.hpp"
#include "v2g/scenario.hpp"
#include "v2g/stats.hpp"

namespace v2g {

enum class SweepTarget { kMu1, kMu2, kMu3 };

const char* to_string(SweepTarget target) noexcept;

struct SweepSpec {
  SweepTarget target;
  std::vector<double> values;  // per minute, in the order given
};

/// Parses "mu1=1/30,1/50,0.0142857". Throws ConfigurationError.
SweepSpec parse_sweep(std::string_view text);

ScenarioConfig with_parameter(ScenarioConfig config, SweepTarget target, double value);

/// Fractions of arrivals per state and of completions that left the network.
struct EmpiricalFractions {
  double p1 = 0.0, p2 = 0.0, p3 = 0.0;
  double q1 = 0.0, q2 = 0.0;
  std::uint64_t arrivals = 0;
};

/// Pooled over the given counters. q's fall back to `config` when a queue saw
/// no completions; p's fall back to estimate_state_fractions when no EV arrived.
EmpiricalFractions empirical_fractions(const std::vector<SimCounters>& counters,
                                       const ScenarioConfig& config, std::uint64_t seed);

/// Classifies `samples` generated EVs; returns (p1, p2, p3).
std::array<double, 3> estimate_state_fractions(const ScenarioConfig& config, std::uint64_t seed,
                                               std::size_t samples = 100'000);

struct ExperimentOptions {
  std::uint64_t seed = 1;
  double sample_interval = 1.0;
  std::optional<std::filesystem::path> out_dir;  // no files written when empty
  unsigned threads = 0;                          // 0: hardware concurrency
};

struct ReplicationSummary {
  std::size_t index = 0;
  std::array<double, kQueueCount> n_mean{};  // time-averaged counts after warm-up
  double c_rd_mean = 0.0;
  double c_ru_mean = 0.0;
  std::array<std::int64_t, kQueueCount> psi_max{};
  SimCounters counters;
};

struct ReplicationFailure {
  std::size_t index;
  std::string message;
};

struct PointResult {
  std::string param_name;  // "none" for the unswept scenario
  std::optional<double> param_value;
  ScenarioConfig config;
  EmpiricalFractions empirical;
  AnalyticResult analytic;  // at the empirical p's and q's
  std::array<SteadyStateEstimate, kQueueCount> n_sim{};
  SteadyStateEstimate c_rd_sim{};
  SteadyStateEstimate c_ru_sim{};
  double err_rd = 0.0;
  double err_ru = 0.0;
  std::vector<ReplicationSummary> replications;
  std::vector<ReplicationFailure> failures;

  bool all_failed() const noexcept { return replications.empty(); }
};

struct ExperimentResult {
  PointResult base;
  std::optional<SweepTarget> sweep_target;
  std::vector<PointResult> sweep;
};

/// Post-warm-up time averages of one trace. If the horizon does not extend past
/// the warm-up the whole trace is used; a single-sample trace yields that sample.
ReplicationSummary summarize(const SimTrace& trace, double warmup);

/// Runs config.replications replications (seed of replication i is
/// derive_seed(options.seed, i)) and compares them with the analytic model.
/// `label` names the trace files when options.out_dir is set.
PointResult run_point(const ScenarioConfig& config, const ExperimentOptions& options,
                      const std::string& label, std::string param_name = "none",
                      std::optional<double> param_value = std::nullopt);

/// Base scenario plus, optionally, one point per sweep value (same replication
/// seeds at every point). Writes the CSV outputs when options.out_dir is set.
ExperimentResult run_experiment(const ScenarioConfig& config, const std::optional<SweepSpec>& sweep,
                                const ExperimentOptions& options);

// CSV schemas.
inline constexpr std::string_view kTraceHeader =
    "time_min,n1,n2,n3,psi1,psi2,psi3,c_rd_kw,c_ru_kw";
inline constexpr std::string_view kSummaryHeader =
    "param_name,param_value,l1_ana,l2_ana,l3_ana,c_rd_ana,c_ru_ana,c_rd_sim,c_ru_sim,err_rd,err_ru,"
    "ci_rd,ci_ru";
inline constexpr std::string_view kEmpiricalHeader =
    "param_name,param_value,replications_ok,arrivals,p1,p2,p3,q1_cfg,q2_cfg,q1_emp,q2_emp";

std::string trace_csv(const SimTrace& trace);
std::string summary_row(const PointResult& point);
std::string empirical_row(const PointResult& point);

/// Shortest round-trip decimal; NaN becomes an empty field.
std::string format_number(double value);

}  // namespace v2g
