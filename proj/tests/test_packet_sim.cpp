#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "redbench/compare.hpp"
#include "redbench/packet_sim.hpp"

using namespace redbench;

namespace {

std::vector<FlowSpec> five_flows(double duration_ms) {
  std::vector<FlowSpec> flows;
  for (int i = 1; i <= 5; ++i) {
    flows.push_back(FlowSpec::constant_rate(i, "10.2.0.10", Transport::Udp, 1000.0 * i, 512, duration_ms));
  }
  return flows;
}

bool same_packets(const SimResult& a, const SimResult& b) {
  if (a.packets.size() != b.packets.size()) return false;
  for (std::size_t i = 0; i < a.packets.size(); ++i) {
    const Packet& x = a.packets[i];
    const Packet& y = b.packets[i];
    if (x.flow != y.flow || x.seq != y.seq || x.size != y.size || x.t_send != y.t_send ||
        x.t_recv != y.t_recv || x.drop_cause != y.drop_cause) {
      return false;
    }
  }
  return true;
}

double time_average_q(const QueueTrace& trace, double from, double to) {
  double area = 0.0;
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    const double a = std::max(from, trace.samples[i].t);
    const double b = std::min(to, i + 1 < trace.samples.size() ? trace.samples[i + 1].t : trace.t_end);
    if (b > a) area += trace.samples[i].q * (b - a);
  }
  return area / (to - from);
}

}  // namespace

TEST_CASE("underloaded UDP flow sees only propagation and transmission delay") {
  LinkConfig link;
  link.prop_delay = 0.01;
  const std::vector<FlowSpec> flows = {FlowSpec::constant_rate(1, "x", Transport::Udp, 100, 512, 5000)};
  SimOptions opt;
  opt.t_end = 6.0;
  const SimResult r = run_simulation(flows, link, opt);
  REQUIRE(r.packets.size() == 500);
  const double tx = 512.0 * 8.0 / 10e6;
  for (const Packet& p : r.packets) {
    REQUIRE(!p.dropped());
    REQUIRE(p.t_recv.has_value());
    REQUIRE(*p.t_recv - p.t_send == doctest::Approx(0.01 + tx).epsilon(1e-12));
  }
  CHECK(r.counters[0].dropped() == 0);
  CHECK(r.counters[0].delivered == 500);
}

TEST_CASE("five overloading UDP flows lose the excess") {
  LinkConfig link;
  SimOptions opt;
  opt.t_end = 21.0;
  const SimResult r = run_simulation(five_flows(20000), link, opt);
  std::uint64_t sent = 0, dropped = 0;
  for (const auto& c : r.counters) {
    sent += c.sent;
    dropped += c.dropped();
  }
  const double loss = static_cast<double>(dropped) / static_cast<double>(sent);
  CHECK(std::abs(loss - (1.0 - 10.0 / 61.44)) <= 0.05);
}

TEST_CASE("same seed gives identical packets, different seed does not") {
  LinkConfig link;
  SimOptions opt;
  opt.t_end = 3.0;
  const auto flows = five_flows(2000);
  const SimResult a = run_simulation(flows, link, opt);
  const SimResult b = run_simulation(flows, link, opt);
  CHECK(same_packets(a, b));
  opt.seed = 2;
  const SimResult c = run_simulation(flows, link, opt);
  CHECK(!same_packets(a, c));
}

TEST_CASE("conservation, FIFO and causality") {
  LinkConfig link;
  link.prop_delay = 0.005;
  link.buffer = 40;
  SimOptions opt;
  opt.t_end = 1.5;  // ends while the queue is still busy
  auto flows = five_flows(3000);
  flows.push_back(FlowSpec::constant_rate(6, "y", Transport::Tcp, 2000, 1000, 3000));
  flows[1].interval = Distribution::exponential(1.0 / 2000.0);
  flows[2].size = Distribution::uniform(64, 1400);
  const SimResult r = run_simulation(flows, link, opt);

  std::uint64_t in_system = 0;
  for (const auto& c : r.counters) {
    CHECK(c.sent == c.delivered + c.dropped() + c.in_system);
    in_system += c.in_system;
  }
  CHECK(in_system > 0);

  std::map<int, std::uint64_t> delivered;
  std::map<int, std::uint64_t> last_seq;
  std::map<int, double> last_recv;
  std::vector<const Packet*> by_recv;
  for (const Packet& p : r.packets) {
    REQUIRE(p.seq > last_seq[p.flow]);
    last_seq[p.flow] = p.seq;
    if (p.t_recv) {
      REQUIRE(*p.t_recv >= p.t_send + link.prop_delay + link.transmission_time(p.size) - 1e-12);
      REQUIRE(*p.t_recv >= last_recv[p.flow]);
      last_recv[p.flow] = *p.t_recv;
      ++delivered[p.flow];
    }
  }
  for (const auto& c : r.counters) CHECK(delivered[c.flow] == c.delivered);
}

TEST_CASE("DropTail with an ample buffer never drops under load below capacity") {
  LinkConfig link;
  link.discipline = Discipline::DropTail;
  link.buffer = 1000000;
  std::vector<FlowSpec> flows;
  for (int i = 1; i <= 4; ++i) {
    FlowSpec f = FlowSpec::constant_rate(i, "x", Transport::Udp, 500, 512, 5000);
    f.interval = Distribution::exponential(1.0 / 500.0);
    flows.push_back(f);
  }
  SimOptions opt;
  opt.t_end = 10.0;
  const SimResult r = run_simulation(flows, link, opt);
  for (const auto& c : r.counters) CHECK(c.dropped() == 0);
}

TEST_CASE("RED drops begin below the buffer, DropTail only at it") {
  LinkConfig link;
  link.buffer = 100;
  SimOptions opt;
  opt.t_end = 3.0;
  // 1.23x overload: the average crosses q_min before the queue fills
  const std::vector<FlowSpec> flows = {
      FlowSpec::constant_rate(1, "x", Transport::Udp, 1500, 512, 2000),
      FlowSpec::constant_rate(2, "x", Transport::Udp, 1500, 512, 2000)};

  const SimResult red = run_simulation(flows, link, opt);
  auto first_red = std::find_if(red.packets.begin(), red.packets.end(),
                                [](const Packet& p) { return p.drop_cause == DropCause::Red; });
  REQUIRE(first_red != red.packets.end());
  double max_q = 0.0;
  for (const auto& s : red.trace.samples) {
    if (s.t <= first_red->t_send) max_q = std::max(max_q, s.q);
  }
  CHECK(max_q < static_cast<double>(link.buffer));

  link.discipline = Discipline::DropTail;
  const SimResult tail = run_simulation(flows, link, opt);
  auto first_tail = std::find_if(tail.packets.begin(), tail.packets.end(),
                                 [](const Packet& p) { return p.dropped(); });
  REQUIRE(first_tail != tail.packets.end());
  CHECK(first_tail->drop_cause == DropCause::Tail);
  double q_at = 0.0;
  for (const auto& s : tail.trace.samples) {
    if (s.t <= first_tail->t_send) q_at = s.q;
  }
  CHECK(q_at == static_cast<double>(link.buffer));
  CHECK(first_red->t_send < first_tail->t_send);
}

TEST_CASE("Little's law on a moderately loaded link") {
  LinkConfig link;
  link.discipline = Discipline::DropTail;
  link.buffer = 100000;
  std::vector<FlowSpec> flows;
  for (int i = 1; i <= 4; ++i) {
    FlowSpec f = FlowSpec::constant_rate(i, "x", Transport::Udp, 450, 512, 30000);
    f.interval = Distribution::exponential(1.0 / 450.0);
    flows.push_back(f);
  }
  SimOptions opt;
  opt.t_end = 30.0;
  const SimResult r = run_simulation(flows, link, opt);
  const double from = 5.0, to = 25.0;
  double wait = 0.0;
  std::size_t n = 0;
  for (const Packet& p : r.packets) {
    if (p.t_send >= from && p.t_send < to && p.t_recv) {
      wait += *p.t_recv - p.t_send - link.prop_delay;
      ++n;
    }
  }
  const double lambda = static_cast<double>(n) / (to - from);
  const double l = time_average_q(r.trace, from, to);
  CHECK(l > 0.5);
  CHECK(std::abs(l - lambda * wait / static_cast<double>(n)) <= 0.1 * l);
}

TEST_CASE("TCP window halves on loss and stays above the floor") {
  LinkConfig link;
  link.capacity_bps = 800e3;
  link.buffer = 30;
  link.red = RedParams{5.0, 15.0, 0.1, 0.002, false};
  const std::vector<FlowSpec> flows = {FlowSpec::constant_rate(1, "x", Transport::Tcp, 1e4, 1000, 60000)};
  SimOptions opt;
  opt.t_end = 60.0;
  const SimResult r = run_simulation(flows, link, opt);
  REQUIRE(r.windows.size() > 10);
  bool halved = false;
  for (std::size_t i = 1; i < r.windows.size(); ++i) {
    REQUIRE(r.windows[i].w >= 1.0);
    const double prev = r.windows[i - 1].w;
    const double w = r.windows[i].w;
    if (w < prev) {
      CHECK(w == std::max(1.0, prev / 2.0));
      halved = true;
    } else {
      CHECK(w == doctest::Approx(prev + 1.0 / prev));
    }
  }
  CHECK(halved);
  CHECK(r.counters[0].dropped() > 0);
  CHECK(r.counters[0].delivered > 0);
}

TEST_CASE("configuration errors") {
  LinkConfig link;
  SimOptions opt;
  CHECK_THROWS_AS(run_simulation({}, link, opt), std::invalid_argument);
  const auto flows = five_flows(1000);
  auto dup = flows;
  dup[1].id = 1;
  CHECK_THROWS_AS(run_simulation(dup, link, opt), std::invalid_argument);
  link.capacity_bps = 0.0;
  CHECK_THROWS_AS(run_simulation(flows, link, opt), std::invalid_argument);
  link = LinkConfig{};
  link.buffer = 0;
  CHECK_THROWS_AS(run_simulation(flows, link, opt), std::invalid_argument);
  link = LinkConfig{};
  opt.t_end = 0.0;
  CHECK_THROWS_AS(run_simulation(flows, link, opt), std::invalid_argument);
}

TEST_CASE("queue_timeseries of an idle link is all zero") {
  QueueTrace trace;
  trace.samples.push_back({0.0, 0.0, 0.0});
  trace.t_end = 2.0;
  const auto rows = queue_timeseries(trace, 0.1);
  REQUIRE(rows.size() == 21);
  for (const auto& s : rows) {
    CHECK(s.q == 0.0);
    CHECK(s.q_hat == 0.0);
  }
  CHECK_THROWS_AS(queue_timeseries(QueueTrace{}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(queue_timeseries(trace, 0.0), std::invalid_argument);
}

TEST_CASE("resampling is piecewise constant") {
  LinkConfig link;
  SimOptions opt;
  opt.t_end = 2.0;
  const SimResult r = run_simulation(five_flows(2000), link, opt);
  const auto coarse = queue_timeseries(r.trace, 0.01);
  const auto fine = queue_timeseries(r.trace, 0.005);
  REQUIRE(fine.size() == 2 * coarse.size() - 1);
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    REQUIRE(coarse[k].q == fine[2 * k].q);
    REQUIRE(coarse[k].q_hat == fine[2 * k].q_hat);
  }
}

TEST_CASE("saturating load: Q reaches the buffer region and Q_hat lags it") {
  LinkConfig link;
  link.discipline = Discipline::Red;
  link.red = RedParams{5.0, 15.0, 0.1, 0.002, false};
  SimOptions opt;
  opt.t_end = 4.0;
  std::vector<FlowSpec> flows = {FlowSpec::constant_rate(1, "x", Transport::Udp, 3000, 512, 4000)};
  flows[0].interval = Distribution::exponential(1.0 / 3000.0);
  const SimResult r = run_simulation(flows, link, opt);
  const auto rows = queue_timeseries(r.trace, 0.001);
  std::vector<double> q, q_hat;
  for (const auto& s : rows) {
    q.push_back(s.q);
    q_hat.push_back(s.q_hat);
  }
  CHECK(*std::max_element(q.begin(), q.end()) >= link.red.q_max);
  CHECK(peak_lag(q, q_hat, 0.001, 0.5) > 0.0);
}
