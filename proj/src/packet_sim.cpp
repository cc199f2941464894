#include "redbench/packet_sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>

#include "redbench/fluid_model.hpp"
#include "redbench/rng.hpp"

namespace redbench {

void LinkConfig::validate() const {
  if (!(capacity_bps > 0.0) || !std::isfinite(capacity_bps)) {
    throw std::invalid_argument("link capacity must be positive");
  }
  if (!(prop_delay >= 0.0) || !std::isfinite(prop_delay)) {
    throw std::invalid_argument("propagation delay must be non-negative");
  }
  if (buffer < 1) {
    throw std::invalid_argument("buffer must hold at least one packet");
  }
  if (discipline == Discipline::Red) {
    red.validate();
  }
}

namespace {

// Simultaneous events: departures from the queue first, then arrivals.
enum class EventKind : int { ServiceDone = 0, Arrival = 1, Ack = 2, LossNotice = 3, Wake = 4 };

struct Event {
  double t;
  EventKind kind;
  int flow;          // index into the flow list
  std::uint64_t key; // departure index (UDP) or packet index
  std::uint64_t order;

  auto rank() const { return std::tie(t, kind, flow, key, order); }
  bool operator>(const Event& o) const { return rank() > o.rank(); }
};

struct Source {
  const FlowSpec* spec = nullptr;
  std::vector<Departure> schedule;
  std::size_t next = 0;           // next schedule entry
  std::uint64_t next_seq = 1;
  // TCP only
  double window = 1.0;
  std::uint64_t in_flight = 0;
  std::uint64_t recover_seq = 0;  // losses at or below this seq were already answered
  bool wake_pending = false;
};

class Simulator {
 public:
  Simulator(const std::vector<FlowSpec>& flows, const LinkConfig& link, const SimOptions& opt)
      : link_(link), opt_(opt), red_rng_(make_engine(opt.seed, 0, 0x7265640aULL)) {
    sources_.resize(flows.size());
    result_.counters.resize(flows.size());
    for (std::size_t i = 0; i < flows.size(); ++i) {
      sources_[i].spec = &flows[i];
      sources_[i].schedule = generate_departures(flows[i], opt.seed);
      sources_[i].window = opt.tcp.initial_window;
      result_.counters[i].flow = flows[i].id;
    }
    ack_delay_ = std::max(0.0, opt.tcp.rtt_base - link.prop_delay);
  }

  SimResult run() {
    result_.trace.t_end = opt_.t_end;
    result_.trace.samples.push_back({0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < sources_.size(); ++i) {
      const int f = static_cast<int>(i);
      if (sources_[i].spec->transport == Transport::Udp) {
        schedule_udp(f);
      } else {
        record_window(0.0, f);
        try_send(0.0, f);
      }
    }
    while (!events_.empty()) {
      const Event ev = events_.top();
      if (ev.t > opt_.t_end) break;
      events_.pop();
      dispatch(ev);
    }
    for (std::size_t idx : queue_) {
      const Packet& p = result_.packets[idx];
      ++counter(p.flow).in_system;
    }
    return std::move(result_);
  }

 private:
  FlowCounters& counter(int flow_id) {
    for (auto& c : result_.counters) {
      if (c.flow == flow_id) return c;
    }
    throw std::logic_error("unknown flow id");
  }

  void push(double t, EventKind kind, int flow, std::uint64_t key) {
    events_.push(Event{t, kind, flow, key, order_++});
  }

  void dispatch(const Event& ev) {
    switch (ev.kind) {
      case EventKind::ServiceDone: on_service_done(ev.t); break;
      case EventKind::Arrival: on_arrival(ev); break;
      case EventKind::Ack: on_ack(ev.t, ev.flow); break;
      case EventKind::LossNotice: on_loss(ev.t, ev.flow, ev.key); break;
      case EventKind::Wake:
        sources_[ev.flow].wake_pending = false;
        try_send(ev.t, ev.flow);
        break;
    }
  }

  void schedule_udp(int f) {
    Source& s = sources_[f];
    if (s.next < s.schedule.size()) {
      push(s.schedule[s.next].time, EventKind::Arrival, f, s.next);
    }
  }

  std::size_t create_packet(double t, int f, std::uint32_t size) {
    Source& s = sources_[f];
    Packet p;
    p.flow = s.spec->id;
    p.seq = s.next_seq++;
    p.size = size;
    p.t_send = t;
    result_.packets.push_back(p);
    ++counter(p.flow).sent;
    return result_.packets.size() - 1;
  }

  void sample(double t) {
    if (opt_.record_trace) {
      result_.trace.samples.push_back({t, static_cast<double>(queue_.size()), red_.avg_queue});
    }
  }

  void record_window(double t, int f) {
    if (opt_.record_trace) {
      result_.windows.push_back({t, sources_[f].spec->id, sources_[f].window});
    }
  }

  void on_arrival(const Event& ev) {
    const int f = ev.flow;
    Source& s = sources_[f];
    std::size_t idx;
    if (s.spec->transport == Transport::Udp) {
      const Departure& d = s.schedule[ev.key];
      idx = create_packet(ev.t, f, d.size);
      ++s.next;
      schedule_udp(f);
    } else {
      idx = static_cast<std::size_t>(ev.key);
    }
    enqueue_or_drop(ev.t, idx, f);
  }

  void enqueue_or_drop(double t, std::size_t idx, int f) {
    Packet& p = result_.packets[idx];
    bool drop = false;
    DropCause cause = DropCause::None;
    if (link_.discipline == Discipline::Red) {
      red_.occupancy = queue_.size();
      red_.avg_queue = ewma_update(red_.avg_queue, static_cast<double>(queue_.size()), link_.red.w_q);
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(red_rng_);
      const RedDecision d = red_decide(red_, link_.red, u, link_.buffer);
      red_ = d.state;
      drop = d.action == RedAction::Drop;
      cause = d.cause;
    } else if (queue_.size() >= link_.buffer) {
      drop = true;
      cause = DropCause::Tail;
    }

    if (drop) {
      p.drop_cause = cause;
      FlowCounters& c = counter(p.flow);
      if (cause == DropCause::Red) {
        ++c.dropped_red;
      } else {
        ++c.dropped_tail;
      }
      sample(t);
      if (sources_[f].spec->transport == Transport::Tcp) {
        push(t + opt_.tcp.rtt_base, EventKind::LossNotice, f, p.seq);
      }
      return;
    }

    queue_.push_back(idx);
    if (queue_.size() == 1) {
      push(t + link_.transmission_time(p.size), EventKind::ServiceDone, -1, 0);
    }
    sample(t);
  }

  void on_service_done(double t) {
    const std::size_t idx = queue_.front();
    queue_.pop_front();
    Packet& p = result_.packets[idx];
    p.t_recv = t + link_.prop_delay;
    ++counter(p.flow).delivered;
    sample(t);
    if (!queue_.empty()) {
      push(t + link_.transmission_time(result_.packets[queue_.front()].size),
           EventKind::ServiceDone, -1, 0);
    }
    const int f = flow_index(p.flow);
    if (sources_[f].spec->transport == Transport::Tcp) {
      push(*p.t_recv + ack_delay_, EventKind::Ack, f, p.seq);
    }
  }

  int flow_index(int flow_id) const {
    for (std::size_t i = 0; i < sources_.size(); ++i) {
      if (sources_[i].spec->id == flow_id) return static_cast<int>(i);
    }
    throw std::logic_error("unknown flow id");
  }

  void on_ack(double t, int f) {
    Source& s = sources_[f];
    --s.in_flight;
    s.window = window_per_ack(s.window);
    record_window(t, f);
    try_send(t, f);
  }

  void on_loss(double t, int f, std::uint64_t seq) {
    Source& s = sources_[f];
    --s.in_flight;
    if (seq > s.recover_seq) {
      s.window = std::max(kWindowFloor, s.window / 2.0);
      s.recover_seq = s.next_seq - 1;
      record_window(t, f);
    }
    try_send(t, f);
  }

  void try_send(double t, int f) {
    Source& s = sources_[f];
    while (static_cast<double>(s.in_flight) < s.window && s.next < s.schedule.size()) {
      const Departure& d = s.schedule[s.next];
      if (d.time > t) {
        if (!s.wake_pending) {
          s.wake_pending = true;
          push(d.time, EventKind::Wake, f, s.next);
        }
        return;
      }
      const std::size_t idx = create_packet(t, f, d.size);
      ++s.next;
      ++s.in_flight;
      push(t, EventKind::Arrival, f, idx);
    }
  }

  const LinkConfig& link_;
  const SimOptions& opt_;
  Engine red_rng_;
  double ack_delay_ = 0.0;
  std::vector<Source> sources_;
  std::deque<std::size_t> queue_;
  RedState red_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::uint64_t order_ = 0;
  SimResult result_;
};

}  // namespace

SimResult run_simulation(const std::vector<FlowSpec>& flows, const LinkConfig& link,
                         const SimOptions& options) {
  link.validate();
  if (flows.empty()) {
    throw std::invalid_argument("simulation needs at least one flow");
  }
  if (!(options.t_end > 0.0)) {
    throw std::invalid_argument("t_end must be positive");
  }
  if (!(options.tcp.rtt_base >= 0.0) || !(options.tcp.initial_window >= kWindowFloor)) {
    throw std::invalid_argument("TCP rtt_base must be >= 0 and initial window >= 1");
  }
  for (std::size_t i = 0; i < flows.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (flows[i].id == flows[j].id) {
        throw std::invalid_argument("duplicate flow id " + std::to_string(flows[i].id));
      }
    }
  }
  Simulator sim(flows, link, options);
  return sim.run();
}

std::vector<QueueSample> queue_timeseries(const QueueTrace& trace, double sample_dt) {
  if (!(sample_dt > 0.0)) {
    throw std::invalid_argument("sample_dt must be positive");
  }
  if (trace.samples.empty()) {
    throw std::invalid_argument("empty queue trace");
  }
  const double t_end = std::max(trace.t_end, trace.samples.back().t);
  const auto n = static_cast<std::size_t>(std::floor(t_end / sample_dt + 1e-9)) + 1;
  std::vector<QueueSample> out;
  out.reserve(n);
  std::size_t j = 0;
  QueueSample current{0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * sample_dt;
    while (j < trace.samples.size() && trace.samples[j].t <= t) {
      current = trace.samples[j++];
    }
    out.push_back({t, current.q, current.q_hat});
  }
  return out;
}

}  // namespace redbench
