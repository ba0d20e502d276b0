// v2gcap: simulate an EV aggregator and compare the simulated regulation
// capacities with the closed-form queueing-network estimates.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "v2g/errors.hpp"
#include "v2g/experiment.hpp"
#include "v2g/scenario.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitAllFailed = 3;

void print_point(const v2g::PointResult& p) {
  char value[32] = "-";
  if (p.param_value) std::snprintf(value, sizeof value, "%.6g", *p.param_value);
  std::printf("%-5s %-12s %9.2f %9.2f %9.2f | %9.2f %9.2f | %9.2f %9.2f | %+8.4f %+8.4f | %zu/%zu\n",
              p.param_name.c_str(), value, p.analytic.counts.l1, p.analytic.counts.l2,
              p.analytic.counts.l3, p.analytic.capacities.c_rd, p.analytic.capacities.c_ru,
              p.c_rd_sim.mean, p.c_ru_sim.mean, p.err_rd, p.err_ru, p.replications.size(),
              p.replications.size() + p.failures.size());
  for (const auto& f : p.failures)
    std::fprintf(stderr, "replication %zu failed: %s\n", f.index, f.message.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EV aggregator regulation-capacity simulator"};

  std::string scenario_path;
  std::uint64_t seed = 1;
  std::optional<double> horizon;
  std::optional<double> warmup;
  std::optional<int> replications;
  std::optional<std::string> sweep_text;
  std::string out_dir = "out";
  double sample_interval = 1.0;
  unsigned threads = 0;

  app.add_option("--scenario", scenario_path, "Scenario file (key = value lines)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Master seed")->capture_default_str();
  app.add_option("--horizon", horizon, "Simulated minutes per replication (overrides file)");
  app.add_option("--warmup", warmup, "Warm-up minutes excluded from means (overrides file)");
  app.add_option("--replications", replications, "Replications per point (overrides file)");
  app.add_option("--sweep", sweep_text, "Service-rate sweep, e.g. mu1=1/30,1/50,1/70");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--sample-interval", sample_interval, "Trace sampling interval in minutes")
      ->capture_default_str();
  app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  v2g::ScenarioConfig config;
  std::optional<v2g::SweepSpec> sweep;
  try {
    config = v2g::load_scenario(scenario_path);
    if (horizon) config.horizon = *horizon;
    if (warmup) config.warmup = *warmup;
    if (replications) config.replications = *replications;
    v2g::validate(config);
    if (!(sample_interval > 0.0)) throw v2g::ConfigurationError("sample-interval must be > 0");
    if (sweep_text) sweep = v2g::parse_sweep(*sweep_text);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  v2g::ExperimentOptions options;
  options.seed = seed;
  options.sample_interval = sample_interval;
  options.out_dir = out_dir;
  options.threads = threads;

  v2g::ExperimentResult result;
  try {
    result = v2g::run_experiment(config, sweep, options);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }

  std::printf("%-5s %-12s %9s %9s %9s | %9s %9s | %9s %9s | %8s %8s | reps\n", "param", "value",
              "L1", "L2", "L3", "C_RD_ana", "C_RU_ana", "C_RD_sim", "C_RU_sim", "err_rd",
              "err_ru");
  print_point(result.base);
  for (const auto& p : result.sweep) print_point(p);
  std::printf("outputs written to %s\n", out_dir.c_str());

  bool any_all_failed = result.base.all_failed();
  for (const auto& p : result.sweep) any_all_failed = any_all_failed || p.all_failed();
  return any_all_failed ? kExitAllFailed : 0;
}
