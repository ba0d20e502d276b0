#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "v2g/analytic.hpp"
#include "v2g/distributions.hpp"
#include "v2g/errors.hpp"
#include "v2g/smart_charge.hpp"

namespace v2g {

/// Upper SOC target: truncated normal on [x, 1] with mean x + mean_frac*(1-x)
/// and standard deviation std_frac*(1-x), where x is the initial SOC.
struct SocHighRule {
  double mean_frac = 0.5;
  double std_frac = 0.1;
  bool operator==(const SocHighRule&) const = default;
};

/// Lower SOC target: soc_high * Uniform(mult_low, mult_high).
struct SocLowRule {
  double mult_low = 0.6;
  double mult_high = 0.8;
  bool operator==(const SocLowRule&) const = default;
};

struct ScenarioConfig {
  double lambda = 0.0;          // EV arrivals per minute
  double frac_no_charge = 0.0;  // EVs arriving already above their upper target
  DistributionSpec soc_init = Constant{0.5};
  SocHighRule soc_high_rule;
  SocLowRule soc_low_rule;
  DistributionSpec stay = Constant{420.0};  // minutes
  RateBounds rate_bounds{0.0, 0.05};
  double q1 = 0.0;
  double q2 = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double mu3 = 0.0;
  double p_ev = 0.0;         // kW
  double delta_t_reg = 1.0;  // minutes
  double horizon = 1440.0;   // minutes
  double warmup = 200.0;     // minutes
  int replications = 100;

  bool operator==(const ScenarioConfig&) const = default;
};

/// The parking-structure scenario used throughout the evaluation: 5 EVs/min,
/// mean service times 50/70/30 min, q1 = q2 = 0.1, rates in [0, 0.05], 6 kW.
ScenarioConfig reference_scenario();

/// Throws ConfigurationError naming the first offending field.
void validate(const ScenarioConfig& config);

/// Parse error with 1-based line context.
class ParseError : public ConfigurationError {
 public:
  ParseError(const std::string& source, int line, const std::string& message);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Scenario file format: one `key = value` per line; `#` starts a comment.
/// Numbers may be written as fractions ("1/50"). Distribution values take the
/// form `exponential(rate)`, `truncated_normal(mean, std, low, high)`,
/// `uniform(low, high)` or `constant(value)`. Unknown keys are rejected.
ScenarioConfig parse_scenario(std::string_view text, std::string_view source_name = "<string>");
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Inverse of parse_scenario; every field is written with round-trip precision.
std::string format_scenario(const ScenarioConfig& config);
void write_scenario(const ScenarioConfig& config, const std::filesystem::path& path);

/// A decimal number or a fraction "a/b"; nothing on malformed input.
std::optional<double> parse_number(std::string_view text);

/// DistributionSpec from its text form (see parse_scenario).
DistributionSpec parse_distribution(std::string_view text);

/// Network parameters for the analytic model; p's are supplied separately
/// because they are measured from the EV population, not configured.
NetworkParams network_params(const ScenarioConfig& config, double p1, double p2, double p3);

/// Independent streams for the EV attribute draws of one replication.
struct EvStreams {
  RandomStream no_charge;
  RandomStream soc_init;
  RandomStream soc_high;
  RandomStream soc_low_multiplier;
  RandomStream stay;

  explicit EvStreams(std::uint64_t seed);
};

/// Draws one EV arriving at `arrival_time`: initial SOC, both targets, and the
/// stay duration. With probability frac_no_charge the SOC is redrawn (by
/// rejection) to lie at or above the upper target.
EvRequest generate_ev(const ScenarioConfig& config, EvStreams& streams, double arrival_time);

}  // namespace v2g
