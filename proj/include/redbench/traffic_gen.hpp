#ifndef REDBENCH_TRAFFIC_GEN_HPP
#define REDBENCH_TRAFFIC_GEN_HPP

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "redbench/rng.hpp"

namespace redbench {

enum class Transport { Udp, Tcp };

enum class DistKind { Constant, Uniform, Exponential, Normal, Gamma, Pareto, Cauchy, Poisson };

/// Law of inter-departure times (seconds) or packet sizes (bytes).
///
/// Parameter meaning per kind:
///   Constant(value), Uniform(lo, hi), Exponential(mean), Normal(mean, stddev),
///   Gamma(shape, scale), Pareto(shape, scale = minimum), Cauchy(location, scale),
///   Poisson(mean).
/// Samples are truncated at 0; Cauchy samples are also capped at `cap`.
struct Distribution {
  DistKind kind = DistKind::Constant;
  double a = 0.0;
  double b = 0.0;
  double cap = std::numeric_limits<double>::infinity();

  static Distribution constant(double v) { return {DistKind::Constant, v, 0.0}; }
  static Distribution uniform(double lo, double hi) { return {DistKind::Uniform, lo, hi}; }
  static Distribution exponential(double mean) { return {DistKind::Exponential, mean, 0.0}; }
  static Distribution normal(double mean, double sd) { return {DistKind::Normal, mean, sd}; }
  static Distribution gamma(double shape, double scale) { return {DistKind::Gamma, shape, scale}; }
  static Distribution pareto(double shape, double scale) { return {DistKind::Pareto, shape, scale}; }
  static Distribution cauchy(double loc, double scale,
                             double cap = std::numeric_limits<double>::infinity()) {
    return {DistKind::Cauchy, loc, scale, cap};
  }
  static Distribution poisson(double mean) { return {DistKind::Poisson, mean, 0.0}; }

  /// Mean of the untruncated law; location for Cauchy, scale for heavy Pareto (shape <= 1).
  double nominal_mean() const;
  void validate() const;
};

const char* to_string(DistKind kind);
const char* to_string(Transport t);

struct FlowSpec {
  int id = 1;
  std::string dest;
  Transport transport = Transport::Udp;
  double rate = 1000.0;        // nominal packets/s
  std::uint32_t payload = 512; // nominal bytes
  double duration_ms = 20000.0;
  Distribution interval = Distribution::constant(1e-3);
  Distribution size = Distribution::constant(512);

  double duration_s() const { return duration_ms / 1000.0; }
  void validate() const;

  /// Constant-rate, constant-size flow.
  static FlowSpec constant_rate(int id, std::string dest, Transport transport, double rate,
                                std::uint32_t payload, double duration_ms);
};

class FlowScriptError : public std::runtime_error {
 public:
  FlowScriptError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Parses an ITGSend-style flow script, one flow per non-empty, non-comment line.
/// Flows are numbered 1..n in file order.
std::vector<FlowSpec> parse_flow_script(std::string_view text);

/// Non-negative inter-departure time in seconds. Poisson is treated as a Poisson process
/// (exponential gaps).
double sample_interval(const Distribution& dist, Engine& rng);

/// Packet size in bytes, at least 1. Poisson sizes are literal Poisson counts.
std::uint32_t sample_size(const Distribution& dist, Engine& rng);

inline constexpr std::uint32_t kMaxPayload = 65507;

struct Departure {
  double time = 0.0;       // seconds from flow start
  std::uint32_t size = 0;  // bytes
};

/// Departure schedule on [0, duration). Deterministic in (spec, seed).
std::vector<Departure> generate_departures(const FlowSpec& spec, std::uint64_t seed);

}  // namespace redbench

#endif  // REDBENCH_TRAFFIC_GEN_HPP
