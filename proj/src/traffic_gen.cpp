#include "redbench/traffic_gen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

namespace redbench {

const char* to_string(DistKind kind) {
  switch (kind) {
    case DistKind::Constant: return "constant";
    case DistKind::Uniform: return "uniform";
    case DistKind::Exponential: return "exponential";
    case DistKind::Normal: return "normal";
    case DistKind::Gamma: return "gamma";
    case DistKind::Pareto: return "pareto";
    case DistKind::Cauchy: return "cauchy";
    case DistKind::Poisson: return "poisson";
  }
  return "?";
}

const char* to_string(Transport t) { return t == Transport::Udp ? "UDP" : "TCP"; }

double Distribution::nominal_mean() const {
  switch (kind) {
    case DistKind::Constant: return a;
    case DistKind::Uniform: return 0.5 * (a + b);
    case DistKind::Exponential: return a;
    case DistKind::Normal: return a;
    case DistKind::Gamma: return a * b;
    case DistKind::Pareto: return a > 1.0 ? a * b / (a - 1.0) : b;
    case DistKind::Cauchy: return a;
    case DistKind::Poisson: return a;
  }
  return a;
}

void Distribution::validate() const {
  auto fail = [this](const char* what) {
    throw std::invalid_argument(std::string(to_string(kind)) + " distribution: " + what);
  };
  if (!std::isfinite(a) || !std::isfinite(b)) fail("parameters must be finite");
  switch (kind) {
    case DistKind::Constant:
      if (a < 0.0) fail("value must be non-negative");
      break;
    case DistKind::Uniform:
      if (a < 0.0 || b < a) fail("need 0 <= lo <= hi");
      break;
    case DistKind::Exponential:
    case DistKind::Poisson:
      if (!(a > 0.0)) fail("mean must be positive");
      break;
    case DistKind::Normal:
      if (b < 0.0) fail("stddev must be non-negative");
      break;
    case DistKind::Gamma:
    case DistKind::Pareto:
      if (!(a > 0.0) || !(b > 0.0)) fail("shape and scale must be positive");
      break;
    case DistKind::Cauchy:
      if (!(b > 0.0)) fail("scale must be positive");
      if (!(cap > 0.0)) fail("cap must be positive");
      break;
  }
}

void FlowSpec::validate() const {
  if (dest.empty()) throw std::invalid_argument("flow " + std::to_string(id) + ": empty destination");
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("flow " + std::to_string(id) + ": rate must be positive");
  }
  if (payload < 1) throw std::invalid_argument("flow " + std::to_string(id) + ": payload < 1 byte");
  if (!(duration_ms > 0.0) || !std::isfinite(duration_ms)) {
    throw std::invalid_argument("flow " + std::to_string(id) + ": duration must be positive");
  }
  interval.validate();
  size.validate();
}

FlowSpec FlowSpec::constant_rate(int id, std::string dest, Transport transport, double rate,
                                 std::uint32_t payload, double duration_ms) {
  FlowSpec f;
  f.id = id;
  f.dest = std::move(dest);
  f.transport = transport;
  f.rate = rate;
  f.payload = payload;
  f.duration_ms = duration_ms;
  f.interval = Distribution::constant(1.0 / rate);
  f.size = Distribution::constant(payload);
  return f;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

class LineParser {
 public:
  LineParser(std::size_t line_no, std::vector<std::string_view> tokens)
      : line_(line_no), tokens_(std::move(tokens)) {}

  bool done() const { return pos_ >= tokens_.size(); }
  std::string_view next_flag() { return tokens_[pos_++]; }

  std::string_view word(std::string_view flag) {
    if (done()) fail("missing value for " + std::string(flag));
    return tokens_[pos_++];
  }

  double number(std::string_view flag) {
    const std::string_view tok = word(flag);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
      fail("malformed number '" + std::string(tok) + "' for " + std::string(flag));
    }
    return v;
  }

  double positive(std::string_view flag) {
    const double v = number(flag);
    if (!(v > 0.0)) fail(std::string(flag) + " requires a positive value");
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const { throw FlowScriptError(line_, what); }

 private:
  std::size_t line_;
  std::vector<std::string_view> tokens_;
  std::size_t pos_ = 0;
};

FlowSpec parse_line(std::size_t line_no, std::string_view line, int id) {
  LineParser p(line_no, split_ws(line));
  FlowSpec spec;
  spec.id = id;
  bool have_dest = false;
  bool have_interval = false;
  bool have_size = false;
  double rate = 1000.0;
  std::uint32_t payload = 512;

  auto set_interval = [&](std::string_view flag, Distribution d) {
    if (have_interval) p.fail("more than one inter-departure flag (" + std::string(flag) + ")");
    have_interval = true;
    spec.interval = d;
  };
  auto set_size = [&](std::string_view flag, Distribution d) {
    if (have_size) p.fail("more than one packet-size flag (" + std::string(flag) + ")");
    have_size = true;
    spec.size = d;
  };

  while (!p.done()) {
    const std::string_view flag = p.next_flag();
    if (flag == "-a") {
      spec.dest = std::string(p.word(flag));
      have_dest = true;
    } else if (flag == "-T") {
      std::string t(p.word(flag));
      std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::toupper(c); });
      if (t == "UDP") {
        spec.transport = Transport::Udp;
      } else if (t == "TCP") {
        spec.transport = Transport::Tcp;
      } else {
        p.fail("unsupported transport '" + t + "'");
      }
    } else if (flag == "-t") {
      spec.duration_ms = p.positive(flag);
    } else if (flag == "-C") {
      rate = p.positive(flag);
      set_interval(flag, Distribution::constant(1.0 / rate));
    } else if (flag == "-E" || flag == "-O") {
      rate = p.positive(flag);
      set_interval(flag, flag == "-E" ? Distribution::exponential(1.0 / rate)
                                      : Distribution{DistKind::Poisson, 1.0 / rate, 0.0});
    } else if (flag == "-U") {
      const double lo_rate = p.positive(flag);
      const double hi_rate = p.positive(flag);
      if (hi_rate < lo_rate) p.fail("-U expects min_rate max_rate");
      set_interval(flag, Distribution::uniform(1.0 / hi_rate, 1.0 / lo_rate));
    } else if (flag == "-N") {
      const double mean = p.positive(flag);
      set_interval(flag, Distribution::normal(mean, p.number(flag)));
    } else if (flag == "-G") {
      const double shape = p.positive(flag);
      set_interval(flag, Distribution::gamma(shape, p.positive(flag)));
    } else if (flag == "-V") {
      const double shape = p.positive(flag);
      set_interval(flag, Distribution::pareto(shape, p.positive(flag)));
    } else if (flag == "-Y") {
      const double loc = p.positive(flag);
      set_interval(flag, Distribution::cauchy(loc, p.positive(flag)));
    } else if (flag == "-c") {
      const double v = p.positive(flag);
      if (v < 1.0 || v > kMaxPayload || v != std::floor(v)) p.fail("-c expects an integer byte count");
      payload = static_cast<std::uint32_t>(v);
      set_size(flag, Distribution::constant(v));
    } else if (flag == "-u") {
      const double lo = p.positive(flag);
      set_size(flag, Distribution::uniform(lo, p.positive(flag)));
    } else if (flag == "-e") {
      set_size(flag, Distribution::exponential(p.positive(flag)));
    } else if (flag == "-o") {
      set_size(flag, Distribution::poisson(p.positive(flag)));
    } else if (flag == "-n") {
      const double mean = p.positive(flag);
      set_size(flag, Distribution::normal(mean, p.number(flag)));
    } else if (flag == "-g") {
      const double shape = p.positive(flag);
      set_size(flag, Distribution::gamma(shape, p.positive(flag)));
    } else if (flag == "-v") {
      const double shape = p.positive(flag);
      set_size(flag, Distribution::pareto(shape, p.positive(flag)));
    } else if (flag == "-y") {
      const double loc = p.positive(flag);
      set_size(flag, Distribution::cauchy(loc, p.positive(flag), kMaxPayload));
    } else {
      p.fail("unknown flag '" + std::string(flag) + "'");
    }
  }
  if (!have_dest) p.fail("missing -a destination");

  if (!have_interval) {
    spec.interval = Distribution::constant(1.0 / rate);
  } else if (spec.interval.kind != DistKind::Constant) {
    rate = 1.0 / spec.interval.nominal_mean();
  }
  if (spec.interval.kind == DistKind::Cauchy) {
    spec.interval.cap = 1e3 / rate;
  }
  if (!have_size) {
    spec.size = Distribution::constant(payload);
  } else if (spec.size.kind != DistKind::Constant) {
    payload = static_cast<std::uint32_t>(
        std::clamp(std::llround(spec.size.nominal_mean()), 1LL, static_cast<long long>(kMaxPayload)));
  }
  spec.rate = rate;
  spec.payload = payload;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    p.fail(e.what());
  }
  return spec;
}

}  // namespace

std::vector<FlowSpec> parse_flow_script(std::string_view text) {
  std::vector<FlowSpec> flows;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto first = line.find_first_not_of(" \t");
    if (first != std::string_view::npos && line[first] != '#') {
      flows.push_back(parse_line(line_no, line, static_cast<int>(flows.size()) + 1));
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return flows;
}

namespace {

constexpr std::size_t kMaxDepartures = 100'000'000;

// Continuous draw before truncation; Poisson intervals are exponential gaps.
double draw(const Distribution& d, Engine& rng, bool interval) {
  switch (d.kind) {
    case DistKind::Constant:
      return d.a;
    case DistKind::Uniform:
      return d.a == d.b ? d.a : std::uniform_real_distribution<double>(d.a, d.b)(rng);
    case DistKind::Exponential:
      return std::exponential_distribution<double>(1.0 / d.a)(rng);
    case DistKind::Normal:
      return std::normal_distribution<double>(d.a, d.b)(rng);
    case DistKind::Gamma:
      return std::gamma_distribution<double>(d.a, d.b)(rng);
    case DistKind::Pareto: {
      // Inverse CDF on (0, 1]: x_m * U^(-1/alpha) >= x_m.
      const double u = 1.0 - std::generate_canonical<double, 53>(rng);
      return d.b * std::pow(u, -1.0 / d.a);
    }
    case DistKind::Cauchy:
      return std::min(std::cauchy_distribution<double>(d.a, d.b)(rng), d.cap);
    case DistKind::Poisson:
      if (interval) return std::exponential_distribution<double>(1.0 / d.a)(rng);
      return static_cast<double>(std::poisson_distribution<long long>(d.a)(rng));
  }
  return 0.0;
}

}  // namespace

double sample_interval(const Distribution& dist, Engine& rng) {
  dist.validate();
  return std::max(0.0, draw(dist, rng, true));
}

std::uint32_t sample_size(const Distribution& dist, Engine& rng) {
  dist.validate();
  const double v = std::round(draw(dist, rng, false));
  return static_cast<std::uint32_t>(std::clamp(v, 1.0, static_cast<double>(kMaxPayload)));
}

std::vector<Departure> generate_departures(const FlowSpec& spec, std::uint64_t seed) {
  spec.validate();
  const double duration = spec.duration_s();
  Engine interval_rng = make_engine(seed, static_cast<std::uint64_t>(spec.id), 1);
  Engine size_rng = make_engine(seed, static_cast<std::uint64_t>(spec.id), 2);
  std::vector<Departure> out;

  if (spec.interval.kind == DistKind::Constant) {
    const double gap = spec.interval.a;
    if (!(gap > 0.0)) {
      throw std::invalid_argument("constant inter-departure time must be positive");
    }
    const auto count = static_cast<std::size_t>(std::floor(duration / gap + 1e-9));
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
      out.push_back({static_cast<double>(k) * gap, sample_size(spec.size, size_rng)});
    }
    return out;
  }

  if (!(spec.interval.nominal_mean() > 0.0)) {
    throw std::invalid_argument("inter-departure law must have a positive mean");
  }
  out.reserve(static_cast<std::size_t>(std::min(spec.rate * duration * 1.1 + 16.0, 5e7)));
  double t = 0.0;
  while (t < duration) {
    if (out.size() >= kMaxDepartures) {
      throw std::runtime_error("flow " + std::to_string(spec.id) + ": more than " +
                               std::to_string(kMaxDepartures) + " departures");
    }
    out.push_back({t, sample_size(spec.size, size_rng)});
    t += sample_interval(spec.interval, interval_rng);
  }
  return out;
}

}  // namespace redbench
