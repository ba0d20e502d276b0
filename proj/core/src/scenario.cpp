#include "v2g/scenario.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

namespace v2g {
namespace {

std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_plain_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

}  // namespace

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const auto num = parse_plain_number(s.substr(0, slash));
    const auto den = parse_plain_number(s.substr(slash + 1));
    if (!num || !den || *den == 0.0) return std::nullopt;
    return *num / *den;
  }
  return parse_plain_number(s);
}

namespace {

double require_number(std::string_view s, std::string_view what) {
  const auto v = parse_number(s);
  if (!v) throw ConfigurationError("invalid number '" + std::string(s) + "' for " + std::string(what));
  return *v;
}

constexpr std::array kRequiredKeys = {
    "lambda", "frac_no_charge", "soc_init", "stay", "rate_low", "rate_high",
    "q1",     "q2",             "mu1",      "mu2",  "mu3",      "p_ev",
};

constexpr std::array kOptionalKeys = {
    "soc_high_mean_frac", "soc_high_std_frac", "soc_low_mult_low", "soc_low_mult_high",
    "delta_t_reg",        "horizon",           "warmup",           "replications",
};

bool is_known_key(std::string_view key) {
  return std::find(kRequiredKeys.begin(), kRequiredKeys.end(), key) != kRequiredKeys.end() ||
         std::find(kOptionalKeys.begin(), kOptionalKeys.end(), key) != kOptionalKeys.end();
}

void require(bool ok, const char* field, const std::string& message) {
  if (!ok) throw ConfigurationError(std::string(field) + ": " + message);
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

void validate_soc_distribution(const DistributionSpec& spec) {
  validate(spec);
  bool ok = true;
  if (const auto* d = std::get_if<TruncatedNormal>(&spec)) ok = in_unit(d->low) && in_unit(d->high);
  else if (const auto* u = std::get_if<Uniform>(&spec)) ok = in_unit(u->low) && in_unit(u->high);
  else if (const auto* c = std::get_if<Constant>(&spec)) ok = in_unit(c->value);
  else ok = false;
  if (!ok) throw ConfigurationError("soc_init: support must lie within [0, 1]");
}

void validate_stay_distribution(const DistributionSpec& spec) {
  validate(spec);
  bool ok = true;
  if (const auto* d = std::get_if<TruncatedNormal>(&spec)) ok = d->low > 0.0;
  else if (const auto* u = std::get_if<Uniform>(&spec)) ok = u->low > 0.0;
  else if (const auto* c = std::get_if<Constant>(&spec)) ok = c->value > 0.0;
  if (!ok) throw ConfigurationError("stay: durations must be > 0");
}

}  // namespace

ScenarioConfig reference_scenario() {
  ScenarioConfig c;
  c.lambda = 5.0;
  c.frac_no_charge = 0.1;
  c.soc_init = TruncatedNormal{0.5, 0.2, 0.0, 1.0};
  c.soc_high_rule = {0.5, 0.1};
  c.soc_low_rule = {0.6, 0.8};
  c.stay = TruncatedNormal{420.0, 60.0, 60.0, 780.0};
  c.rate_bounds = {0.0, 0.05};
  c.q1 = 0.1;
  c.q2 = 0.1;
  c.mu1 = 1.0 / 50.0;
  c.mu2 = 1.0 / 70.0;
  c.mu3 = 1.0 / 30.0;
  c.p_ev = 6.0;
  c.delta_t_reg = 1.0;
  c.horizon = 1440.0;
  c.warmup = 200.0;
  c.replications = 100;
  return c;
}

void validate(const ScenarioConfig& c) {
  require(c.lambda > 0.0 && std::isfinite(c.lambda), "lambda", "must be > 0");
  require(in_unit(c.frac_no_charge), "frac_no_charge", "must lie in [0, 1]");
  validate_soc_distribution(c.soc_init);
  require(in_unit(c.soc_high_rule.mean_frac), "soc_high_mean_frac", "must lie in [0, 1]");
  require(c.soc_high_rule.std_frac > 0.0, "soc_high_std_frac", "must be > 0");
  require(c.soc_low_rule.mult_low >= 0.0 && c.soc_low_rule.mult_low <= c.soc_low_rule.mult_high &&
              c.soc_low_rule.mult_high <= 1.0,
          "soc_low_mult_low", "requires 0 <= soc_low_mult_low <= soc_low_mult_high <= 1");
  validate_stay_distribution(c.stay);
  require(c.rate_bounds.low >= 0.0, "rate_low", "must be >= 0");
  require(c.rate_bounds.high >= c.rate_bounds.low, "rate_high", "must be >= rate_low");
  require(in_unit(c.q1), "q1", "must lie in [0, 1]");
  require(in_unit(c.q2), "q2", "must lie in [0, 1]");
  require(c.mu1 > 0.0 && std::isfinite(c.mu1), "mu1", "must be > 0");
  require(c.mu2 > 0.0 && std::isfinite(c.mu2), "mu2", "must be > 0");
  require(c.mu3 > 0.0 && std::isfinite(c.mu3), "mu3", "must be > 0");
  require(c.p_ev > 0.0, "p_ev", "must be > 0");
  require(c.delta_t_reg > 0.0, "delta_t_reg", "must be > 0");
  require(c.horizon >= 0.0 && std::isfinite(c.horizon), "horizon", "must be >= 0");
  require(c.warmup >= 0.0, "warmup", "must be >= 0");
  require(c.replications >= 1, "replications", "must be >= 1");
}

ParseError::ParseError(const std::string& source, int line, const std::string& message)
    : ConfigurationError(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

DistributionSpec parse_distribution(std::string_view text) {
  text = trim(text);
  const auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')')
    throw ConfigurationError("expected kind(args...), got '" + std::string(text) + "'");
  const auto kind = trim(text.substr(0, open));
  std::vector<double> args;
  std::string_view rest = text.substr(open + 1, text.size() - open - 2);
  if (!trim(rest).empty()) {
    while (true) {
      const auto comma = rest.find(',');
      args.push_back(require_number(rest.substr(0, comma), kind));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  const auto arity = [&](std::size_t n) {
    if (args.size() != n)
      throw ConfigurationError(std::string(kind) + " takes " + std::to_string(n) + " arguments");
  };
  DistributionSpec spec;
  if (kind == "exponential") {
    arity(1);
    spec = Exponential{args[0]};
  } else if (kind == "truncated_normal") {
    arity(4);
    spec = TruncatedNormal{args[0], args[1], args[2], args[3]};
  } else if (kind == "uniform") {
    arity(2);
    spec = Uniform{args[0], args[1]};
  } else if (kind == "constant") {
    arity(1);
    spec = Constant{args[0]};
  } else {
    throw ConfigurationError("unknown distribution kind '" + std::string(kind) + "'");
  }
  validate(spec);
  return spec;
}

ScenarioConfig parse_scenario(std::string_view text, std::string_view source_name) {
  const std::string source(source_name);
  std::map<std::string, std::pair<std::string, int>, std::less<>> entries;

  int line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError(source, line_no, "missing key");
    if (value.empty()) throw ParseError(source, line_no, "missing value for '" + key + "'");
    if (!is_known_key(key)) throw ParseError(source, line_no, "unknown key '" + key + "'");
    if (!entries.emplace(key, std::pair{value, line_no}).second)
      throw ParseError(source, line_no, "duplicate key '" + key + "'");
  }

  for (const char* key : kRequiredKeys)
    if (!entries.contains(key))
      throw ConfigurationError(source + ": missing required field '" + key + "'");

  ScenarioConfig c;
  const auto field = [&](const char* key, auto&& apply) {
    const auto it = entries.find(key);
    if (it == entries.end()) return;
    try {
      apply(it->second.first);
    } catch (const ParseError&) {
      throw;
    } catch (const ConfigurationError& e) {
      throw ParseError(source, it->second.second, std::string(key) + ": " + e.what());
    }
  };
  const auto number = [&](const char* key, double& out) {
    field(key, [&](const std::string& v) { out = require_number(v, key); });
  };
  const auto distribution = [&](const char* key, DistributionSpec& out) {
    field(key, [&](const std::string& v) { out = parse_distribution(v); });
  };

  number("lambda", c.lambda);
  number("frac_no_charge", c.frac_no_charge);
  distribution("soc_init", c.soc_init);
  number("soc_high_mean_frac", c.soc_high_rule.mean_frac);
  number("soc_high_std_frac", c.soc_high_rule.std_frac);
  number("soc_low_mult_low", c.soc_low_rule.mult_low);
  number("soc_low_mult_high", c.soc_low_rule.mult_high);
  distribution("stay", c.stay);
  number("rate_low", c.rate_bounds.low);
  number("rate_high", c.rate_bounds.high);
  number("q1", c.q1);
  number("q2", c.q2);
  number("mu1", c.mu1);
  number("mu2", c.mu2);
  number("mu3", c.mu3);
  number("p_ev", c.p_ev);
  number("delta_t_reg", c.delta_t_reg);
  number("horizon", c.horizon);
  number("warmup", c.warmup);
  field("replications", [&](const std::string& v) {
    int n = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec != std::errc{} || ptr != v.data() + v.size())
      throw ConfigurationError("expected an integer, got '" + v + "'");
    c.replications = n;
  });

  validate(c);
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

std::string format_scenario(const ScenarioConfig& c) {
  std::ostringstream os;
  os << "# EV aggregator scenario (times in minutes, SOC in [0, 1], rates per minute)\n"
     << "lambda = " << num(c.lambda) << '\n'
     << "frac_no_charge = " << num(c.frac_no_charge) << '\n'
     << "soc_init = " << to_string(c.soc_init) << '\n'
     << "soc_high_mean_frac = " << num(c.soc_high_rule.mean_frac) << '\n'
     << "soc_high_std_frac = " << num(c.soc_high_rule.std_frac) << '\n'
     << "soc_low_mult_low = " << num(c.soc_low_rule.mult_low) << '\n'
     << "soc_low_mult_high = " << num(c.soc_low_rule.mult_high) << '\n'
     << "stay = " << to_string(c.stay) << '\n'
     << "rate_low = " << num(c.rate_bounds.low) << '\n'
     << "rate_high = " << num(c.rate_bounds.high) << '\n'
     << "q1 = " << num(c.q1) << '\n'
     << "q2 = " << num(c.q2) << '\n'
     << "mu1 = " << num(c.mu1) << '\n'
     << "mu2 = " << num(c.mu2) << '\n'
     << "mu3 = " << num(c.mu3) << '\n'
     << "p_ev = " << num(c.p_ev) << '\n'
     << "delta_t_reg = " << num(c.delta_t_reg) << '\n'
     << "horizon = " << num(c.horizon) << '\n'
     << "warmup = " << num(c.warmup) << '\n'
     << "replications = " << c.replications << '\n';
  return os.str();
}

void write_scenario(const ScenarioConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigurationError("cannot write scenario file " + path.string());
  out << format_scenario(config);
}

NetworkParams network_params(const ScenarioConfig& c, double p1, double p2, double p3) {
  return {.lambda = c.lambda, .p1 = p1, .p2 = p2, .p3 = p3, .q1 = c.q1, .q2 = c.q2,
          .mu1 = c.mu1, .mu2 = c.mu2, .mu3 = c.mu3, .p_ev = c.p_ev};
}

EvStreams::EvStreams(std::uint64_t seed)
    : no_charge(seed, StreamId::kNoChargeFlag),
      soc_init(seed, StreamId::kSocInit),
      soc_high(seed, StreamId::kSocHigh),
      soc_low_multiplier(seed, StreamId::kSocLowMultiplier),
      stay(seed, StreamId::kStay) {}

EvRequest generate_ev(const ScenarioConfig& c, EvStreams& streams, double arrival_time) {
  const bool no_charge = streams.no_charge.uniform01() < c.frac_no_charge;
  const double x0 = sample(c.soc_init, streams.soc_init);

  const double headroom = 1.0 - x0;
  double high = 1.0;
  if (headroom > 0.0) {
    const TruncatedNormal rule{x0 + c.soc_high_rule.mean_frac * headroom,
                               c.soc_high_rule.std_frac * headroom, x0, 1.0};
    high = sample(rule, streams.soc_high);
  }
  const Uniform multiplier{c.soc_low_rule.mult_low, c.soc_low_rule.mult_high};
  const double low = high * sample(multiplier, streams.soc_low_multiplier);

  double soc = x0;
  if (no_charge) {
    soc = high;
    for (int i = 0; i < kTruncatedNormalMaxRejections; ++i) {
      const double x = sample(c.soc_init, streams.soc_init);
      if (x >= high) {
        soc = x;
        break;
      }
    }
  }

  const double stay = sample(c.stay, streams.stay);
  return {.arrival_time = arrival_time,
          .expected_departure = arrival_time + stay,
          .soc_now = soc,
          .soc_low = low,
          .soc_high = high};
}

}  // namespace v2g
