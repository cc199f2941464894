#include <doctest.h>

#include <cmath>
#include <vector>

#include "redbench/traffic_gen.hpp"

using namespace redbench;

TEST_CASE("parse a single flow line") {
  const auto flows = parse_flow_script("-a 10.2.0.10 -C 1000 -c 512 -T UDP\n");
  REQUIRE(flows.size() == 1);
  const FlowSpec& f = flows[0];
  CHECK(f.id == 1);
  CHECK(f.dest == "10.2.0.10");
  CHECK(f.rate == 1000.0);
  CHECK(f.payload == 512);
  CHECK(f.transport == Transport::Udp);
  CHECK(f.duration_ms == 20000.0);
  CHECK(f.interval.kind == DistKind::Constant);
  CHECK(f.interval.a == doctest::Approx(1e-3));
  CHECK(f.size.kind == DistKind::Constant);
  CHECK(f.size.a == 512.0);
}

TEST_CASE("parse the long single-flow run") {
  const auto flows = parse_flow_script("-a h -C 10000 -c 500 -T UDP -t 20000");
  REQUIRE(flows.size() == 1);
  CHECK(flows[0].dest == "h");
  CHECK(flows[0].rate == 10000.0);
  CHECK(flows[0].payload == 500);
  CHECK(flows[0].duration_ms == 20000.0);
}

TEST_CASE("parse a five-flow script with comments and blanks") {
  const char* text =
      "# five UDP flows\n"
      "-a 10.2.0.10 -C 1000 -c 512 -T UDP\n"
      "\n"
      "-a 10.2.0.10 -C 2000 -c 512 -T UDP\n"
      "   \n"
      "-a 10.2.0.10 -C 3000 -c 512 -T UDP\r\n"
      "-a 10.2.0.10 -C 4000 -c 512 -T udp\n"
      "-a 10.2.0.10 -C 5000 -c 512 -T TCP";
  const auto flows = parse_flow_script(text);
  REQUIRE(flows.size() == 5);
  for (std::size_t i = 0; i < flows.size(); ++i) {
    CHECK(flows[i].id == static_cast<int>(i + 1));
    CHECK(flows[i].rate == 1000.0 * static_cast<double>(i + 1));
  }
  CHECK(flows[4].transport == Transport::Tcp);
}

TEST_CASE("empty scripts give no flows") {
  CHECK(parse_flow_script("").empty());
  CHECK(parse_flow_script("\n# nothing\n\n").empty());
}

TEST_CASE("parse errors carry the line number") {
  auto line_of = [](const char* text) -> std::size_t {
    try {
      parse_flow_script(text);
    } catch (const FlowScriptError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("-a x -C 10\n-a y -Q 3\n") == 2);
  CHECK(line_of("-a x\n\n-a y -C ten\n") == 3);
  CHECK(line_of("-C 100 -c 20\n") == 1);
  CHECK(line_of("-a x -C -5\n") == 1);
  CHECK(line_of("-a x -c 12.5\n") == 1);
  CHECK(line_of("-a x -T SCTP\n") == 1);
  CHECK(line_of("-a x -C\n") == 1);
  CHECK(line_of("-a x -C 10 -E 10\n") == 1);
  CHECK(line_of("-a x -c 10 -e 10\n") == 1);
  CHECK(line_of("# ok\n-a x -U 10 5\n") == 2);
}

TEST_CASE("distribution flags set rate and payload from the law's mean") {
  const auto flows = parse_flow_script(
      "-a x -E 250 -e 300\n"
      "-a x -U 100 400 -u 100 300\n"
      "-a x -Y 0.01 0.002\n"
      "-a x -O 50 -o 64\n");
  REQUIRE(flows.size() == 4);
  CHECK(flows[0].interval.kind == DistKind::Exponential);
  CHECK(flows[0].rate == doctest::Approx(250.0));
  CHECK(flows[0].payload == 300);
  CHECK(flows[1].interval.kind == DistKind::Uniform);
  CHECK(flows[1].interval.a == doctest::Approx(1.0 / 400.0));
  CHECK(flows[1].interval.b == doctest::Approx(1.0 / 100.0));
  CHECK(flows[1].payload == 200);
  CHECK(flows[2].interval.kind == DistKind::Cauchy);
  CHECK(flows[2].rate == doctest::Approx(100.0));
  CHECK(flows[2].interval.cap == doctest::Approx(10.0));
  CHECK(flows[3].interval.kind == DistKind::Poisson);
  CHECK(flows[3].size.kind == DistKind::Poisson);
}

TEST_CASE("constant interval is exact") {
  Engine rng(1);
  const Distribution d = Distribution::constant(0.001);
  for (int i = 0; i < 1000; ++i) REQUIRE(sample_interval(d, rng) == 0.001);
}

TEST_CASE("exponential sample mean within three standard errors") {
  Engine rng(derive_seed(3, 0));
  const double m = 0.004;
  const Distribution d = Distribution::exponential(m);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += sample_interval(d, rng);
  // stddev of an exponential equals its mean
  CHECK(std::abs(sum / n - m) <= 3.0 * m / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("truncated normal never goes negative") {
  Engine rng(7);
  const Distribution d = Distribution::normal(0.001, 0.01);
  int zeros = 0;
  for (int i = 0; i < 100000; ++i) {
    const double x = sample_interval(d, rng);
    REQUIRE(x >= 0.0);
    zeros += x == 0.0;
  }
  CHECK(zeros > 30000);
}

TEST_CASE("no kind emits negative intervals or sizes") {
  const std::vector<Distribution> laws = {
      Distribution::constant(0.0),       Distribution::uniform(0.0, 2.0),
      Distribution::exponential(1.0),    Distribution::normal(-1.0, 3.0),
      Distribution::gamma(0.3, 2.0),     Distribution::pareto(0.8, 1.0),
      Distribution::cauchy(0.0, 5.0, 3), Distribution::poisson(0.5),
  };
  Engine rng(11);
  for (const auto& d : laws) {
    for (int i = 0; i < 20000; ++i) {
      const double t = sample_interval(d, rng);
      REQUIRE(t >= 0.0);
      REQUIRE(std::isfinite(t));
      const std::uint32_t s = sample_size(d, rng);
      REQUIRE(s >= 1);
      REQUIRE(s <= kMaxPayload);
    }
  }
}

TEST_CASE("cauchy samples respect the cap") {
  Engine rng(12);
  const Distribution d = Distribution::cauchy(0.01, 1.0, 0.05);
  for (int i = 0; i < 20000; ++i) {
    const double t = sample_interval(d, rng);
    REQUIRE(t >= 0.0);
    REQUIRE(t <= 0.05);
  }
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(Distribution::pareto(0.0, 1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(Distribution::uniform(2.0, 1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(Distribution::exponential(0.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(Distribution::gamma(-1.0, 1.0).validate(), std::invalid_argument);
  Engine rng(1);
  CHECK_THROWS_AS(sample_interval(Distribution::normal(1.0, -1.0), rng), std::invalid_argument);
  FlowSpec f = FlowSpec::constant_rate(1, "x", Transport::Udp, 100, 0, 1000);
  CHECK_THROWS_AS(f.validate(), std::invalid_argument);
}

TEST_CASE("constant departures at 1 ms spacing") {
  const FlowSpec f = FlowSpec::constant_rate(1, "x", Transport::Udp, 1000, 512, 20000);
  const auto deps = generate_departures(f, 1);
  REQUIRE(deps.size() == 20000);
  for (std::size_t k = 0; k < deps.size(); ++k) {
    REQUIRE(deps[k].time == doctest::Approx(static_cast<double>(k) * 1e-3).epsilon(1e-12));
    REQUIRE(deps[k].size == 512);
  }
}

TEST_CASE("high-rate constant flow") {
  const FlowSpec f = FlowSpec::constant_rate(1, "x", Transport::Udp, 10000, 500, 20000);
  const auto deps = generate_departures(f, 1);
  CHECK(deps.size() == 200000);
  std::uint64_t bytes = 0;
  for (const auto& d : deps) bytes += d.size;
  CHECK(bytes == 200000ull * 500ull);
  CHECK(deps.back().time < 20.0);
}

TEST_CASE("constant count equals floor(rate * duration)") {
  for (double rate : {1.0, 3.0, 7.0, 33.3, 999.0}) {
    for (double ms : {1000.0, 1234.0, 2500.0}) {
      const FlowSpec f = FlowSpec::constant_rate(1, "x", Transport::Udp, rate, 100, ms);
      CHECK(generate_departures(f, 0).size() ==
            static_cast<std::size_t>(std::floor(rate * ms / 1000.0 + 1e-9)));
    }
  }
}

TEST_CASE("departures are deterministic and seed-sensitive") {
  FlowSpec f = FlowSpec::constant_rate(2, "x", Transport::Udp, 500, 100, 5000);
  f.interval = Distribution::exponential(1.0 / 500.0);
  f.size = Distribution::uniform(64, 1400);
  const auto a = generate_departures(f, 42);
  const auto b = generate_departures(f, 42);
  const auto c = generate_departures(f, 43);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].time == b[i].time);
    REQUIRE(a[i].size == b[i].size);
  }
  CHECK((a.size() != c.size() || a[1].time != c[1].time));
}

TEST_CASE("stochastic schedules are ordered, bounded, and match the nominal rate") {
  const double rate = 2000.0;
  FlowSpec f = FlowSpec::constant_rate(1, "x", Transport::Udp, rate, 100, 60000);
  f.interval = Distribution::exponential(1.0 / rate);
  const auto deps = generate_departures(f, 5);
  for (std::size_t i = 1; i < deps.size(); ++i) REQUIRE(deps[i].time >= deps[i - 1].time);
  CHECK(deps.back().time < f.duration_s());
  // count of a Poisson process on [0, D) has sd sqrt(rate D)
  const double expected = rate * f.duration_s();
  CHECK(std::abs(static_cast<double>(deps.size()) - expected) <= 3.0 * std::sqrt(expected));
}
