#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "v2g/distributions.hpp"

namespace v2g {

/// What an EV declares when it plugs in (or enters a new queue).
struct EvRequest {
  double arrival_time;        // minutes
  double expected_departure;  // minutes
  double soc_now;
  double soc_low;   // lower target threshold
  double soc_high;  // upper target threshold

  double stay() const noexcept { return expected_departure - arrival_time; }
  bool operator==(const EvRequest&) const = default;
};

/// Throws DomainError unless 0 <= soc_low <= soc_high <= 1, soc_now in [0, 1]
/// and expected_departure > arrival_time.
void validate(const EvRequest& ev);

struct RateBounds {
  double low;
  double high;
  bool operator==(const RateBounds&) const = default;
};

enum class ChargeMode { kRdq, kRudqFromOutside, kRudqFromRdq, kRuq };

const char* to_string(ChargeMode mode) noexcept;

struct Assignment {
  double service_time;               // minutes
  std::optional<double> charge_rate; // normalized SOC per minute; empty in RUQ
  double energy_delta;               // SOC to be charged over service_time
};

/// SOC to be delivered while the EV sits in the queue selected by `mode`.
/// Throws StateClassificationError if the result would be negative.
double energy_needed(const EvRequest& ev, ChargeMode mode);

/// Stay constraint (y within the EV's stay) and, for charging modes, the rate
/// constraint bounds.low <= energy / y <= bounds.high.
bool qualifies(double y, const EvRequest& ev, const RateBounds& bounds, double energy,
               ChargeMode mode);

/// The closed interval of service times y that `qualifies` accepts (y > 0).
struct ServiceWindow {
  double shortest;
  double longest;

  bool empty() const noexcept { return !(longest > 0.0) || shortest > longest; }
  double length() const noexcept { return empty() ? 0.0 : longest - shortest; }
};

ServiceWindow service_window(const EvRequest& ev, const RateBounds& bounds, double energy,
                             ChargeMode mode);

inline constexpr std::size_t kDefaultGenerationCap = 1'000'000;

/// FIFO store of drawn-but-unadopted candidate service durations for one queue.
class ReservoirQueue {
 public:
  explicit ReservoirQueue(double mean_rate, std::size_t generation_cap = kDefaultGenerationCap);
  /// Pre-loaded reservoir; the values count as already drawn.
  ReservoirQueue(double mean_rate, std::deque<double> pending,
                 std::size_t generation_cap = kDefaultGenerationCap);

  double mean_rate() const noexcept { return mean_rate_; }
  std::size_t generation_cap() const noexcept { return generation_cap_; }
  const std::deque<double>& pending() const noexcept { return pending_; }
  std::size_t length() const noexcept { return pending_.size(); }

  std::uint64_t total_drawn() const noexcept { return drawn_; }
  std::uint64_t total_adopted() const noexcept { return adopted_; }

 private:
  friend Assignment assign(const EvRequest&, ReservoirQueue&, const RateBounds&, ChargeMode,
                           const std::function<double()>&);

  double mean_rate_;
  std::size_t generation_cap_;
  std::deque<double> pending_;
  std::uint64_t drawn_ = 0;
  std::uint64_t adopted_ = 0;
};

inline std::size_t reservoir_length(const ReservoirQueue& psi) noexcept { return psi.length(); }

/// Raised when `generation_cap` consecutive fresh draws all fail to qualify.
class AssignmentFailure : public std::runtime_error {
 public:
  AssignmentFailure(const std::string& what, EvRequest ev, ChargeMode mode,
                    std::size_t reservoir_length);

  const EvRequest& ev() const noexcept { return ev_; }
  ChargeMode mode() const noexcept { return mode_; }
  std::size_t reservoir_length() const noexcept { return reservoir_length_; }

 private:
  EvRequest ev_;
  ChargeMode mode_;
  std::size_t reservoir_length_;
};

/// Smart charging assignment. Adopts the earliest-generated pending value that
/// qualifies for `ev`; otherwise draws fresh candidates from `draw`, parking
/// every unqualified one at the back of the reservoir, until one qualifies.
Assignment assign(const EvRequest& ev, ReservoirQueue& psi, const RateBounds& bounds,
                  ChargeMode mode, const std::function<double()>& draw);

/// Same, drawing fresh candidates from Exponential(psi.mean_rate()).
Assignment assign(const EvRequest& ev, ReservoirQueue& psi, const RateBounds& bounds,
                  ChargeMode mode, RandomStream& stream);

}  // namespace v2g
