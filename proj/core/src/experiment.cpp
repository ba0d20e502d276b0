#include "v2g/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "v2g/errors.hpp"

namespace v2g {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
}

SteadyStateEstimate estimate(const std::vector<double>& values) {
  if (values.empty()) return {kNaN, kNaN, 0};
  if (values.size() == 1) return {values.front(), kNaN, 1};
  return aggregate(values);
}

double safe_relative_error(double simulated, double analytical) {
  if (std::isnan(simulated) || analytical == 0.0) return kNaN;
  return relative_error(simulated, analytical);
}

}  // namespace

const char* to_string(SweepTarget target) noexcept {
  switch (target) {
    case SweepTarget::kMu1: return "mu1";
    case SweepTarget::kMu2: return "mu2";
    case SweepTarget::kMu3: return "mu3";
  }
  return "?";
}

SweepSpec parse_sweep(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos)
    throw ConfigurationError("sweep must look like mu1=v1,v2,...");
  const auto name = trim(text.substr(0, eq));
  SweepSpec spec{};
  if (name == "mu1") spec.target = SweepTarget::kMu1;
  else if (name == "mu2") spec.target = SweepTarget::kMu2;
  else if (name == "mu3") spec.target = SweepTarget::kMu3;
  else throw ConfigurationError("sweep target must be mu1, mu2 or mu3, got '" + std::string(name) + "'");

  std::string_view rest = text.substr(eq + 1);
  while (true) {
    const auto comma = rest.find(',');
    const std::string item(trim(rest.substr(0, comma)));
    const auto parsed = parse_number(item);
    if (!parsed) throw ConfigurationError("invalid sweep value '" + item + "'");
    const double value = *parsed;
    if (!(value > 0.0) || !std::isfinite(value))
      throw ConfigurationError("sweep values must be > 0, got '" + item + "'");
    spec.values.push_back(value);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return spec;
}

ScenarioConfig with_parameter(ScenarioConfig config, SweepTarget target, double value) {
  switch (target) {
    case SweepTarget::kMu1: config.mu1 = value; break;
    case SweepTarget::kMu2: config.mu2 = value; break;
    case SweepTarget::kMu3: config.mu3 = value; break;
  }
  return config;
}

std::array<double, 3> estimate_state_fractions(const ScenarioConfig& config, std::uint64_t seed,
                                               std::size_t samples) {
  EvStreams streams(seed);
  std::array<std::size_t, 3> hits{};
  for (std::size_t i = 0; i < samples; ++i) {
    const EvRequest ev = generate_ev(config, streams, 0.0);
    ++hits[static_cast<std::size_t>(classify(ev.soc_now, ev.soc_low, ev.soc_high))];
  }
  const auto n = static_cast<double>(samples);
  return {static_cast<double>(hits[0]) / n, static_cast<double>(hits[1]) / n,
          static_cast<double>(hits[2]) / n};
}

EmpiricalFractions empirical_fractions(const std::vector<SimCounters>& counters,
                                       const ScenarioConfig& config, std::uint64_t seed) {
  SimCounters total;
  for (const auto& c : counters) {
    total.arrivals += c.arrivals;
    for (std::size_t k = 0; k < kQueueCount; ++k) {
      total.arrivals_by_state[k] += c.arrivals_by_state[k];
      total.completions[k] += c.completions[k];
    }
    for (std::size_t k = 0; k < 2; ++k) {
      total.quits[k] += c.quits[k];
      total.stay_expired[k] += c.stay_expired[k];
    }
  }
  EmpiricalFractions f;
  f.arrivals = total.arrivals;
  if (total.arrivals > 0) {
    const auto n = static_cast<double>(total.arrivals);
    f.p1 = static_cast<double>(total.arrivals_by_state[0]) / n;
    f.p2 = static_cast<double>(total.arrivals_by_state[1]) / n;
    f.p3 = static_cast<double>(total.arrivals_by_state[2]) / n;
  } else {
    const auto p = estimate_state_fractions(config, derive_seed(seed, 0xC1A55ULL));
    f.p1 = p[0];
    f.p2 = p[1];
    f.p3 = p[2];
  }
  const auto exit_fraction = [&](std::size_t k, double fallback) {
    if (total.completions[k] == 0) return fallback;
    return static_cast<double>(total.quits[k] + total.stay_expired[k]) /
           static_cast<double>(total.completions[k]);
  };
  f.q1 = exit_fraction(0, config.q1);
  f.q2 = exit_fraction(1, config.q2);
  return f;
}

ReplicationSummary summarize(const SimTrace& trace, double warmup) {
  ReplicationSummary s;
  s.counters = trace.counters;
  if (trace.time.empty()) throw InsufficientDataError("empty trace");
  const double effective = trace.time.back() > warmup ? warmup : 0.0;
  const auto mean_of = [&](std::span<const double> values) {
    if (trace.time.size() == 1) return values.front();
    return steady_mean(trace.time, values, effective);
  };
  for (std::size_t k = 0; k < kQueueCount; ++k) {
    std::vector<double> values(trace.n[k].begin(), trace.n[k].end());
    s.n_mean[k] = mean_of(values);
    s.psi_max[k] = trace.psi[k].empty()
                       ? 0
                       : *std::max_element(trace.psi[k].begin(), trace.psi[k].end());
  }
  s.c_rd_mean = mean_of(trace.c_rd);
  s.c_ru_mean = mean_of(trace.c_ru);
  return s;
}

PointResult run_point(const ScenarioConfig& config, const ExperimentOptions& options,
                      const std::string& label, std::string param_name,
                      std::optional<double> param_value) {
  validate(config);
  const auto reps = static_cast<std::size_t>(config.replications);
  std::vector<std::optional<ReplicationSummary>> done(reps);
  std::vector<std::string> errors(reps);

  std::optional<std::filesystem::path> trace_dir;
  if (options.out_dir) {
    trace_dir = *options.out_dir / "traces";
    std::filesystem::create_directories(*trace_dir);
  }

  parallel_for(reps, options.threads, [&](std::size_t i) {
    try {
      const SimTrace trace =
          run(config, derive_seed(options.seed, i), config.horizon, options.sample_interval);
      ReplicationSummary s = summarize(trace, config.warmup);
      s.index = i;
      if (trace_dir) {
        char name[64];
        std::snprintf(name, sizeof name, "_rep%04zu.csv", i);
        write_file(*trace_dir / (label + name), trace_csv(trace));
      }
      done[i] = std::move(s);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  PointResult p;
  p.param_name = std::move(param_name);
  p.param_value = param_value;
  p.config = config;
  std::vector<SimCounters> counters;
  for (std::size_t i = 0; i < reps; ++i) {
    if (done[i]) {
      counters.push_back(done[i]->counters);
      p.replications.push_back(std::move(*done[i]));
    } else {
      p.failures.push_back({i, errors[i]});
    }
  }

  p.empirical = empirical_fractions(counters, config, options.seed);
  NetworkParams params = network_params(config, p.empirical.p1, p.empirical.p2, p.empirical.p3);
  params.q1 = p.empirical.q1;
  params.q2 = p.empirical.q2;
  p.analytic = evaluate(params);

  const auto collect = [&](auto&& get) {
    std::vector<double> v;
    v.reserve(p.replications.size());
    for (const auto& r : p.replications) v.push_back(get(r));
    return estimate(v);
  };
  for (std::size_t k = 0; k < kQueueCount; ++k)
    p.n_sim[k] = collect([k](const ReplicationSummary& r) { return r.n_mean[k]; });
  p.c_rd_sim = collect([](const ReplicationSummary& r) { return r.c_rd_mean; });
  p.c_ru_sim = collect([](const ReplicationSummary& r) { return r.c_ru_mean; });
  p.err_rd = safe_relative_error(p.c_rd_sim.mean, p.analytic.capacities.c_rd);
  p.err_ru = safe_relative_error(p.c_ru_sim.mean, p.analytic.capacities.c_ru);
  return p;
}

ExperimentResult run_experiment(const ScenarioConfig& config,
                                const std::optional<SweepSpec>& sweep,
                                const ExperimentOptions& options) {
  validate(config);
  if (options.out_dir) std::filesystem::create_directories(*options.out_dir);

  ExperimentResult result;
  result.base = run_point(config, options, "base");
  if (sweep) {
    if (sweep->values.empty()) throw ConfigurationError("sweep needs at least one value");
    result.sweep_target = sweep->target;
    for (std::size_t i = 0; i < sweep->values.size(); ++i) {
      const double v = sweep->values[i];
      const std::string name = to_string(sweep->target);
      result.sweep.push_back(run_point(with_parameter(config, sweep->target, v), options,
                                       name + "_" + std::to_string(i), name, v));
    }
  }

  if (options.out_dir) {
    const auto& dir = *options.out_dir;
    std::string summary = std::string(kSummaryHeader) + "\n" + summary_row(result.base);
    write_file(dir / "summary.csv", summary);

    std::string empirical = std::string(kEmpiricalHeader) + "\n" + empirical_row(result.base);
    std::string failures;
    const auto add_failures = [&](const PointResult& p) {
      for (const auto& f : p.failures) {
        std::string msg = f.message;
        std::replace(msg.begin(), msg.end(), '"', '\'');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        failures += p.param_name + "," + format_number(p.param_value.value_or(kNaN)) + "," +
                    std::to_string(f.index) + ",\"" + msg + "\"\n";
      }
    };
    add_failures(result.base);

    if (sweep) {
      std::string rows = std::string(kSummaryHeader) + "\n";
      for (const auto& p : result.sweep) {
        rows += summary_row(p);
        empirical += empirical_row(p);
        add_failures(p);
      }
      write_file(dir / "sweep.csv", rows);
    }
    write_file(dir / "empirical.csv", empirical);
    write_file(dir / "scenario.cfg", format_scenario(config));
    if (!failures.empty())
      write_file(dir / "failures.csv", "param_name,param_value,replication,message\n" + failures);
  }
  return result;
}

std::string format_number(double value) {
  if (std::isnan(value)) return {};
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::string trace_csv(const SimTrace& trace) {
  std::string out(kTraceHeader);
  out += '\n';
  out.reserve(out.size() + trace.time.size() * 48);
  for (std::size_t i = 0; i < trace.time.size(); ++i) {
    out += format_number(trace.time[i]);
    for (std::size_t k = 0; k < kQueueCount; ++k) out += ',' + std::to_string(trace.n[k][i]);
    for (std::size_t k = 0; k < kQueueCount; ++k) out += ',' + std::to_string(trace.psi[k][i]);
    out += ',' + format_number(trace.c_rd[i]);
    out += ',' + format_number(trace.c_ru[i]);
    out += '\n';
  }
  return out;
}

std::string summary_row(const PointResult& p) {
  const auto& a = p.analytic;
  std::ostringstream os;
  os << p.param_name << ',' << format_number(p.param_value.value_or(kNaN)) << ','
     << format_number(a.counts.l1) << ',' << format_number(a.counts.l2) << ','
     << format_number(a.counts.l3) << ',' << format_number(a.capacities.c_rd) << ','
     << format_number(a.capacities.c_ru) << ',' << format_number(p.c_rd_sim.mean) << ','
     << format_number(p.c_ru_sim.mean) << ',' << format_number(p.err_rd) << ','
     << format_number(p.err_ru) << ',' << format_number(p.c_rd_sim.half_width) << ','
     << format_number(p.c_ru_sim.half_width) << '\n';
  return os.str();
}

std::string empirical_row(const PointResult& p) {
  std::ostringstream os;
  os << p.param_name << ',' << format_number(p.param_value.value_or(kNaN)) << ','
     << p.replications.size() << ',' << p.empirical.arrivals << ','
     << format_number(p.empirical.p1) << ',' << format_number(p.empirical.p2) << ','
     << format_number(p.empirical.p3) << ',' << format_number(p.config.q1) << ','
     << format_number(p.config.q2) << ',' << format_number(p.empirical.q1) << ','
     << format_number(p.empirical.q2) << '\n';
  return os.str();
}

}  // namespace v2g
