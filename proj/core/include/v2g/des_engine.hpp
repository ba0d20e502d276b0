#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "v2g/scenario.hpp"
#include "v2g/smart_charge.hpp"

namespace v2g {

enum class EvState { kState1, kState2, kState3 };

/// State 1 iff x <= low, State 3 iff x >= high, State 2 otherwise. The
/// State 1 test runs first, so x == low == high is State 1.
EvState classify(double soc, double soc_low, double soc_high);

enum class QueueId : std::uint8_t { kRdq = 0, kRudq = 1, kRuq = 2 };
inline constexpr std::size_t kQueueCount = 3;

inline std::size_t index(QueueId q) noexcept { return static_cast<std::size_t>(q); }

using EvId = std::uint64_t;

/// Network behaviour independent of how EVs and candidate durations are drawn.
struct NetworkModel {
  double q1 = 0.0;
  double q2 = 0.0;
  std::array<double, kQueueCount> mu{};  // service rates per minute
  RateBounds rate_bounds{0.0, 0.0};
  double p_ev = 0.0;  // kW
  std::size_t generation_cap = kDefaultGenerationCap;
  // An EV moving to its next queue quits instead when the range of service
  // times it could accept there is shorter than this (minutes).
  double min_service_window = 0.0;

  static NetworkModel from(const ScenarioConfig& config);
};

/// Pluggable randomness. `next_arrival(t)` returns the next EV with
/// arrival_time >= t, or nothing when the arrival stream is exhausted.
struct SimulationSources {
  std::function<std::optional<EvRequest>(double)> next_arrival;
  std::array<std::function<double()>, kQueueCount> candidate;  // fresh service-time draws
  std::array<std::function<double()>, 2> quit_uniform;         // U(0,1) for the q1 / q2 splits
};

/// Scenario-driven sources: Poisson arrivals, generate_ev attributes,
/// exponential candidates at mu_k and uniform quit coins, each on its own stream.
SimulationSources scenario_sources(const ScenarioConfig& config, std::uint64_t seed);

struct SimCounters {
  std::uint64_t arrivals = 0;
  std::array<std::uint64_t, kQueueCount> arrivals_by_state{};  // external arrivals per state
  std::array<std::uint64_t, kQueueCount> completions{};        // service completions per queue
  std::array<std::uint64_t, 2> quits{};         // q-coin exits after RDQ / RUDQ service
  std::array<std::uint64_t, 2> stay_expired{};  // exits at transit with no stay left
  std::uint64_t departures = 0;
};

struct SimTrace {
  std::vector<double> time;  // minutes
  std::array<std::vector<std::int64_t>, kQueueCount> n;
  std::array<std::vector<std::int64_t>, kQueueCount> psi;  // reservoir lengths
  std::vector<double> c_rd;                                // kW, p_ev * (n1 + n2)
  std::vector<double> c_ru;                                // kW, p_ev * (n2 + n3)
  std::vector<std::uint64_t> arrivals;    // cumulative, at each sample
  std::vector<std::uint64_t> departures;  // cumulative, at each sample
  std::array<std::vector<double>, kQueueCount> adopted;  // service times in adoption order
  std::array<std::uint64_t, kQueueCount> drawn{};        // total candidates drawn per queue
  SimCounters counters;
};

/// Event-driven simulation of one replication. Sequential; not thread-safe.
class Simulation {
 public:
  Simulation(NetworkModel model, SimulationSources sources);

  /// Schedules the first external arrival.
  void start();

  /// Processes the next calendar event if its time is <= until.
  bool step(double until);

  /// Classifies the EV at the current clock, routes it, assigns its service
  /// time and schedules the completion; then schedules the next arrival.
  EvId handle_arrival(const EvRequest& ev);

  /// Applies the quit split (RDQ, RUDQ) or the final exit (RUQ).
  void handle_completion(EvId id, QueueId queue);

  double clock() const noexcept { return clock_; }
  std::size_t count(QueueId q) const noexcept { return counts_[index(q)]; }
  std::size_t residents() const noexcept { return residents_.size(); }
  const ReservoirQueue& reservoir(QueueId q) const noexcept { return reservoirs_[index(q)]; }
  const SimCounters& counters() const noexcept { return counters_; }
  std::size_t pending_events() const noexcept { return calendar_.size(); }
  const std::array<std::vector<double>, kQueueCount>& adopted() const noexcept {
    return adopted_;
  }

  /// Runs from the current (normally empty) state, sampling every
  /// sample_interval minutes; events at a sample instant are applied first.
  SimTrace run(double horizon, double sample_interval);

 private:
  enum class EventKind : std::uint8_t { kArrival, kCompletion };
  struct Event {
    double time;
    std::uint64_t seq;
    EventKind kind;
    QueueId queue;
    EvId ev;
    EvRequest request;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };
  struct Resident {
    QueueId queue;
    EvRequest request;
  };

  void schedule(Event e);
  void schedule_next_arrival();
  void admit(EvId id, EvRequest request, QueueId queue, ChargeMode mode);
  void depart(EvId id);
  void record(SimTrace& trace, double t) const;

  NetworkModel model_;
  SimulationSources sources_;
  double clock_ = 0.0;
  std::uint64_t next_seq_ = 0;
  EvId next_id_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> calendar_;
  std::unordered_map<EvId, Resident> residents_;
  std::array<std::size_t, kQueueCount> counts_{};
  std::array<ReservoirQueue, kQueueCount> reservoirs_;
  std::array<std::vector<double>, kQueueCount> adopted_;
  SimCounters counters_;
};

/// One replication of a scenario from an empty system. Output is a pure
/// function of (config, seed, horizon, sample_interval).
SimTrace run(const ScenarioConfig& config, std::uint64_t seed, double horizon,
             double sample_interval = 1.0);

}  // namespace v2g
