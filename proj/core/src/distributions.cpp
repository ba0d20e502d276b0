#include "v2g/distributions.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "v2g/errors.hpp"

namespace v2g {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double exponential(double rate, RandomStream& stream) {
  return -std::log(stream.uniform01()) / rate;
}

}  // namespace

void validate(const DistributionSpec& spec) {
  std::visit(
      Overloaded{
          [](const Exponential& d) {
            if (!(d.rate > 0.0) || !std::isfinite(d.rate))
              throw ConfigurationError("exponential: rate must be > 0, got " + num(d.rate));
          },
          [](const TruncatedNormal& d) {
            if (!(d.stddev > 0.0))
              throw ConfigurationError("truncated_normal: std must be > 0, got " +
                                       num(d.stddev));
            if (!(d.low < d.high))
              throw ConfigurationError("truncated_normal: requires low < high");
            if (!std::isfinite(d.mean)) throw ConfigurationError("truncated_normal: bad mean");
          },
          [](const Uniform& d) {
            if (!(d.low <= d.high)) throw ConfigurationError("uniform: requires low <= high");
          },
          [](const Constant& d) {
            if (!std::isfinite(d.value)) throw ConfigurationError("constant: value not finite");
          },
      },
      spec);
}

std::string to_string(const DistributionSpec& spec) {
  return std::visit(
      Overloaded{
          [](const Exponential& d) { return "exponential(" + num(d.rate) + ")"; },
          [](const TruncatedNormal& d) {
            return "truncated_normal(" + num(d.mean) + ", " + num(d.stddev) + ", " +
                   num(d.low) + ", " + num(d.high) + ")";
          },
          [](const Uniform& d) {
            return "uniform(" + num(d.low) + ", " + num(d.high) + ")";
          },
          [](const Constant& d) { return "constant(" + num(d.value) + ")"; },
      },
      spec);
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return splitmix64(master_seed ^ splitmix64(index + 0x5851F42D4C957F2DULL));
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  engine_.seed(seq);
}

double RandomStream::uniform01() noexcept {
  // 53 random mantissa bits, shifted by half an ulp so 0 and 1 are excluded.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::standard_normal() { return normal_(engine_); }

double sample(const DistributionSpec& spec, RandomStream& stream) {
  validate(spec);
  return std::visit(
      Overloaded{
          [&](const Exponential& d) { return exponential(d.rate, stream); },
          [&](const TruncatedNormal& d) {
            for (int i = 0; i < kTruncatedNormalMaxRejections; ++i) {
              const double x = d.mean + d.stddev * stream.standard_normal();
              if (x >= d.low && x <= d.high) return x;
            }
            throw ConfigurationError("truncated_normal(" + num(d.mean) + ", " + num(d.stddev) +
                                     ", " + num(d.low) + ", " + num(d.high) +
                                     "): window too narrow for rejection sampling");
          },
          [&](const Uniform& d) { return d.low + (d.high - d.low) * stream.uniform01(); },
          [](const Constant& d) { return d.value; },
      },
      spec);
}

double next_poisson_interarrival(double rate, RandomStream& stream) {
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw ConfigurationError("poisson rate must be > 0, got " + num(rate));
  return exponential(rate, stream);
}

}  // namespace v2g
