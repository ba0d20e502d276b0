#include "v2g/des_engine.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <utility>

#include "v2g/errors.hpp"

namespace v2g {

EvState classify(double soc, double soc_low, double soc_high) {
  if (!(soc_low >= 0.0 && soc_low <= soc_high && soc_high <= 1.0))
    throw DomainError("classify: thresholds must satisfy 0 <= low <= high <= 1");
  if (soc <= soc_low) return EvState::kState1;
  if (soc >= soc_high) return EvState::kState3;
  return EvState::kState2;
}

NetworkModel NetworkModel::from(const ScenarioConfig& c) {
  NetworkModel m;
  m.q1 = c.q1;
  m.q2 = c.q2;
  m.mu = {c.mu1, c.mu2, c.mu3};
  m.rate_bounds = c.rate_bounds;
  m.p_ev = c.p_ev;
  m.min_service_window = c.delta_t_reg;
  return m;
}

SimulationSources scenario_sources(const ScenarioConfig& config, std::uint64_t seed) {
  validate(config);
  SimulationSources s;
  auto gaps = std::make_shared<RandomStream>(seed, StreamId::kArrivals);
  auto attributes = std::make_shared<EvStreams>(seed);
  s.next_arrival = [config, gaps, attributes](double t) -> std::optional<EvRequest> {
    const double at = t + next_poisson_interarrival(config.lambda, *gaps);
    return generate_ev(config, *attributes, at);
  };
  const std::array<double, kQueueCount> mu{config.mu1, config.mu2, config.mu3};
  for (std::size_t k = 0; k < kQueueCount; ++k) {
    auto stream = std::make_shared<RandomStream>(
        seed, static_cast<std::uint64_t>(StreamId::kServiceRdq) + k);
    s.candidate[k] = [stream, dist = Exponential{mu[k]}] { return sample(dist, *stream); };
  }
  for (std::size_t k = 0; k < 2; ++k) {
    auto stream = std::make_shared<RandomStream>(
        seed, static_cast<std::uint64_t>(StreamId::kQuitRdq) + k);
    s.quit_uniform[k] = [stream] { return stream->uniform01(); };
  }
  return s;
}

Simulation::Simulation(NetworkModel model, SimulationSources sources)
    : model_(model),
      sources_(std::move(sources)),
      reservoirs_{ReservoirQueue(model.mu[0], model.generation_cap),
                  ReservoirQueue(model.mu[1], model.generation_cap),
                  ReservoirQueue(model.mu[2], model.generation_cap)} {
  if (!(model_.q1 >= 0.0 && model_.q1 <= 1.0 && model_.q2 >= 0.0 && model_.q2 <= 1.0))
    throw ConfigurationError("quit fractions must lie in [0, 1]");
  if (!(model_.p_ev > 0.0)) throw ConfigurationError("p_ev must be > 0");
}

void Simulation::schedule(Event e) {
  if (e.time < clock_) throw InternalConsistencyError("event scheduled in the past");
  e.seq = next_seq_++;
  calendar_.push(std::move(e));
}

void Simulation::schedule_next_arrival() {
  if (!sources_.next_arrival) return;
  if (auto ev = sources_.next_arrival(clock_)) {
    schedule({.time = ev->arrival_time, .seq = 0, .kind = EventKind::kArrival,
              .queue = QueueId::kRdq, .ev = 0, .request = *ev});
  }
}

void Simulation::start() { schedule_next_arrival(); }

bool Simulation::step(double until) {
  if (calendar_.empty() || calendar_.top().time > until) return false;
  Event e = calendar_.top();
  calendar_.pop();
  clock_ = e.time;
  if (e.kind == EventKind::kArrival) {
    handle_arrival(e.request);
  } else {
    handle_completion(e.ev, e.queue);
  }
  return true;
}

EvId Simulation::handle_arrival(const EvRequest& ev) {
  validate(ev);
  const EvId id = next_id_++;
  ++counters_.arrivals;
  switch (classify(ev.soc_now, ev.soc_low, ev.soc_high)) {
    case EvState::kState1:
      ++counters_.arrivals_by_state[0];
      admit(id, ev, QueueId::kRdq, ChargeMode::kRdq);
      break;
    case EvState::kState2:
      ++counters_.arrivals_by_state[1];
      admit(id, ev, QueueId::kRudq, ChargeMode::kRudqFromOutside);
      break;
    case EvState::kState3:
      ++counters_.arrivals_by_state[2];
      admit(id, ev, QueueId::kRuq, ChargeMode::kRuq);
      break;
  }
  schedule_next_arrival();
  return id;
}

void Simulation::admit(EvId id, EvRequest request, QueueId queue, ChargeMode mode) {
  const std::size_t q = index(queue);
  Assignment a{};
  try {
    a = assign(request, reservoirs_[q], model_.rate_bounds, mode, sources_.candidate[q]);
  } catch (const AssignmentFailure& f) {
    std::ostringstream os;
    os << "EV " << id << " at t=" << clock_ << ": " << f.what();
    throw AssignmentFailure(os.str(), f.ev(), f.mode(), f.reservoir_length());
  }
  adopted_[q].push_back(a.service_time);
  residents_[id] = Resident{queue, request};
  ++counts_[q];
  schedule({.time = clock_ + a.service_time, .seq = 0, .kind = EventKind::kCompletion,
            .queue = queue, .ev = id, .request = request});
}

void Simulation::depart(EvId id) {
  residents_.erase(id);
  ++counters_.departures;
}

void Simulation::handle_completion(EvId id, QueueId queue) {
  const auto it = residents_.find(id);
  if (it == residents_.end() || it->second.queue != queue) {
    std::ostringstream os;
    os << "completion for EV " << id << " which is not resident in queue " << index(queue);
    throw InternalConsistencyError(os.str());
  }
  const std::size_t q = index(queue);
  --counts_[q];
  ++counters_.completions[q];
  if (queue == QueueId::kRuq) {
    depart(id);
    return;
  }

  const double quit = q == 0 ? model_.q1 : model_.q2;
  if (sources_.quit_uniform[q]() < quit) {
    ++counters_.quits[q];
    depart(id);
    return;
  }

  // Transit: the EV re-enters the next queue now, charged to the threshold it
  // was aiming for, with whatever stay it has left.
  EvRequest next = it->second.request;
  next.arrival_time = clock_;
  next.soc_now = queue == QueueId::kRdq ? next.soc_low : next.soc_high;
  const QueueId to = queue == QueueId::kRdq ? QueueId::kRudq : QueueId::kRuq;
  const ChargeMode mode = queue == QueueId::kRdq ? ChargeMode::kRudqFromRdq : ChargeMode::kRuq;
  const ServiceWindow window =
      service_window(next, model_.rate_bounds, energy_needed(next, mode), mode);
  if (!(next.stay() > 0.0) || window.empty() || window.length() < model_.min_service_window) {
    ++counters_.stay_expired[q];
    depart(id);
    return;
  }
  admit(id, next, to, mode);
}

void Simulation::record(SimTrace& trace, double t) const {
  trace.time.push_back(t);
  for (std::size_t k = 0; k < kQueueCount; ++k) {
    trace.n[k].push_back(static_cast<std::int64_t>(counts_[k]));
    trace.psi[k].push_back(static_cast<std::int64_t>(reservoirs_[k].length()));
  }
  const auto n1 = static_cast<double>(counts_[0]);
  const auto n2 = static_cast<double>(counts_[1]);
  const auto n3 = static_cast<double>(counts_[2]);
  trace.c_rd.push_back(model_.p_ev * (n1 + n2));
  trace.c_ru.push_back(model_.p_ev * (n2 + n3));
  trace.arrivals.push_back(counters_.arrivals);
  trace.departures.push_back(counters_.departures);
}

SimTrace Simulation::run(double horizon, double sample_interval) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon))
    throw ConfigurationError("horizon must be >= 0");
  if (!(sample_interval > 0.0)) throw ConfigurationError("sample_interval must be > 0");
  if (calendar_.empty() && counters_.arrivals == 0) start();

  SimTrace trace;
  const double slack = 1e-9 * std::max(1.0, horizon);
  for (std::uint64_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * sample_interval;
    if (t > horizon + slack) break;
    while (step(t)) {
    }
    record(trace, t);
  }
  trace.adopted = adopted_;
  for (std::size_t k = 0; k < kQueueCount; ++k) trace.drawn[k] = reservoirs_[k].total_drawn();
  trace.counters = counters_;
  return trace;
}

SimTrace run(const ScenarioConfig& config, std::uint64_t seed, double horizon,
             double sample_interval) {
  Simulation sim(NetworkModel::from(config), scenario_sources(config, seed));
  return sim.run(horizon, sample_interval);
}

}  // namespace v2g
