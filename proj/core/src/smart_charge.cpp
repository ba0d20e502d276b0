#include "v2g/smart_charge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "v2g/errors.hpp"

namespace v2g {

void validate(const EvRequest& ev) {
  if (!(ev.soc_low >= 0.0 && ev.soc_low <= ev.soc_high && ev.soc_high <= 1.0))
    throw DomainError("EV thresholds must satisfy 0 <= soc_low <= soc_high <= 1");
  if (!(ev.soc_now >= 0.0 && ev.soc_now <= 1.0)) throw DomainError("EV soc_now outside [0, 1]");
  if (!(ev.expected_departure > ev.arrival_time))
    throw DomainError("EV expected departure must be after arrival");
}

const char* to_string(ChargeMode mode) noexcept {
  switch (mode) {
    case ChargeMode::kRdq: return "RDQ";
    case ChargeMode::kRudqFromOutside: return "RUDQ-from-outside";
    case ChargeMode::kRudqFromRdq: return "RUDQ-from-RDQ";
    case ChargeMode::kRuq: return "RUQ";
  }
  return "?";
}

double energy_needed(const EvRequest& ev, ChargeMode mode) {
  double energy = 0.0;
  switch (mode) {
    case ChargeMode::kRdq: energy = ev.soc_low - ev.soc_now; break;
    case ChargeMode::kRudqFromOutside: energy = ev.soc_high - ev.soc_now; break;
    case ChargeMode::kRudqFromRdq: energy = ev.soc_high - ev.soc_low; break;
    case ChargeMode::kRuq: return 0.0;
  }
  if (energy < 0.0) {
    std::ostringstream os;
    os << "negative energy " << energy << " for EV (x=" << ev.soc_now << ", low=" << ev.soc_low
       << ", high=" << ev.soc_high << ") in mode " << to_string(mode);
    throw StateClassificationError(os.str());
  }
  return energy;
}

bool qualifies(double y, const EvRequest& ev, const RateBounds& bounds, double energy,
               ChargeMode mode) {
  if (!(y > 0.0)) throw DomainError("candidate service time must be > 0");
  if (y > ev.stay()) return false;
  if (mode == ChargeMode::kRuq) return true;
  const double rate = energy / y;
  return bounds.low <= rate && rate <= bounds.high;
}

ServiceWindow service_window(const EvRequest& ev, const RateBounds& bounds, double energy,
                             ChargeMode mode) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double shortest = 0.0;
  double longest = ev.stay();
  if (mode != ChargeMode::kRuq) {
    shortest = bounds.high > 0.0 ? energy / bounds.high : (energy > 0.0 ? kInf : 0.0);
    if (bounds.low > 0.0) longest = std::min(longest, energy / bounds.low);
  }
  return {shortest, longest};
}

ReservoirQueue::ReservoirQueue(double mean_rate, std::size_t generation_cap)
    : ReservoirQueue(mean_rate, {}, generation_cap) {}

ReservoirQueue::ReservoirQueue(double mean_rate, std::deque<double> pending,
                               std::size_t generation_cap)
    : mean_rate_(mean_rate), generation_cap_(generation_cap), pending_(std::move(pending)) {
  if (!(mean_rate > 0.0)) throw ConfigurationError("reservoir mean_rate must be > 0");
  if (generation_cap == 0) throw ConfigurationError("reservoir generation_cap must be > 0");
  if (std::any_of(pending_.begin(), pending_.end(), [](double v) { return !(v > 0.0); }))
    throw DomainError("reservoir values must be > 0");
  drawn_ = pending_.size();
}

AssignmentFailure::AssignmentFailure(const std::string& what, EvRequest ev, ChargeMode mode,
                                     std::size_t reservoir_length)
    : std::runtime_error(what), ev_(ev), mode_(mode), reservoir_length_(reservoir_length) {}

Assignment assign(const EvRequest& ev, ReservoirQueue& psi, const RateBounds& bounds,
                  ChargeMode mode, const std::function<double()>& draw) {
  validate(ev);
  const double energy = energy_needed(ev, mode);
  const auto make = [&](double w) {
    ++psi.adopted_;
    Assignment a{.service_time = w, .charge_rate = std::nullopt, .energy_delta = energy};
    if (mode != ChargeMode::kRuq) a.charge_rate = energy / w;
    return a;
  };

  const auto hit = std::find_if(psi.pending_.begin(), psi.pending_.end(), [&](double y) {
    return qualifies(y, ev, bounds, energy, mode);
  });
  if (hit != psi.pending_.end()) {
    const double w = *hit;
    psi.pending_.erase(hit);
    return make(w);
  }

  for (std::size_t i = 0; i < psi.generation_cap_; ++i) {
    const double z = draw();
    if (!(z > 0.0)) throw DomainError("fresh candidate service time must be > 0");
    ++psi.drawn_;
    if (qualifies(z, ev, bounds, energy, mode)) return make(z);
    psi.pending_.push_back(z);
  }

  std::ostringstream os;
  os << "no qualifying service time after " << psi.generation_cap_ << " draws (mode "
     << to_string(mode) << ", stay " << ev.stay() << " min, energy " << energy
     << ", rate bounds [" << bounds.low << ", " << bounds.high << "], reservoir length "
     << psi.length() << ")";
  throw AssignmentFailure(os.str(), ev, mode, psi.length());
}

Assignment assign(const EvRequest& ev, ReservoirQueue& psi, const RateBounds& bounds,
                  ChargeMode mode, RandomStream& stream) {
  const Exponential dist{psi.mean_rate()};
  return assign(ev, psi, bounds, mode, [&] { return sample(dist, stream); });
}

}  // namespace v2g
