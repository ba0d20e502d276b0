#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>

namespace v2g {

// All times are in minutes and all SOC quantities are dimensionless in [0, 1].

struct Exponential {
  double rate;  // per minute; mean is 1 / rate
  bool operator==(const Exponential&) const = default;
};

struct TruncatedNormal {
  double mean;
  double stddev;
  double low;
  double high;
  bool operator==(const TruncatedNormal&) const = default;
};

struct Uniform {
  double low;
  double high;
  bool operator==(const Uniform&) const = default;
};

struct Constant {
  double value;
  bool operator==(const Constant&) const = default;
};

using DistributionSpec = std::variant<Exponential, TruncatedNormal, Uniform, Constant>;

/// Throws ConfigurationError if the parameters violate the kind's invariants.
void validate(const DistributionSpec& spec);

/// Canonical text form, e.g. "truncated_normal(420, 60, 60, 780)". Numbers use
/// the shortest representation that round-trips exactly.
std::string to_string(const DistributionSpec& spec);

/// Maximum rejected normal draws per truncated-normal sample.
inline constexpr int kTruncatedNormalMaxRejections = 10'000;

/// Stream identifiers for the independent stochastic processes of one
/// replication. Keeping one stream per process means that changing a
/// parameter of one process leaves every other process's draws untouched.
enum class StreamId : std::uint64_t {
  kArrivals = 1,
  kNoChargeFlag,
  kSocInit,
  kSocHigh,
  kSocLowMultiplier,
  kStay,
  kServiceRdq,
  kServiceRudq,
  kServiceRuq,
  kQuitRdq,
  kQuitRudq,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for sub-experiment `index` (e.g. a replication) of a master seed.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

/// A seeded pseudo-random stream. Single owner; not thread-safe.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);
  RandomStream(std::uint64_t seed, StreamId id)
      : RandomStream(seed, static_cast<std::uint64_t>(id)) {}

  /// Uniform on the open interval (0, 1).
  double uniform01() noexcept;
  double standard_normal();

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

double sample(const DistributionSpec& spec, RandomStream& stream);

/// Gap to the next event of a Poisson process with the given rate (per minute).
double next_poisson_interarrival(double rate, RandomStream& stream);

}  // namespace v2g
