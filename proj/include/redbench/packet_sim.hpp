#ifndef REDBENCH_PACKET_SIM_HPP
#define REDBENCH_PACKET_SIM_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "redbench/red_core.hpp"
#include "redbench/traffic_gen.hpp"

namespace redbench {

enum class Discipline { DropTail, Red };

/// Single bottleneck link: FIFO queue drained at `capacity_bps`.
struct LinkConfig {
  double capacity_bps = 10e6;
  double prop_delay = 0.0;        // one-way, seconds
  std::size_t buffer = 100;       // packets, including the one in transmission
  Discipline discipline = Discipline::Red;
  RedParams red;
  std::uint32_t header_bytes = 0; // added to every packet's transmission time

  void validate() const;
  double transmission_time(std::uint32_t payload) const {
    return static_cast<double>(payload + header_bytes) * 8.0 / capacity_bps;
  }
};

struct TcpConfig {
  /// Round trip excluding transmission and queueing; acknowledgements return
  /// rtt_base - prop_delay after delivery.
  double rtt_base = 0.1;
  double initial_window = 1.0;
};

struct SimOptions {
  double t_end = 20.0;
  std::uint64_t seed = 1;
  TcpConfig tcp;
  bool record_trace = true;
};

struct Packet {
  int flow = 0;
  std::uint64_t seq = 0;
  std::uint32_t size = 0;
  double t_send = 0.0;
  std::optional<double> t_recv;  // empty while queued or after a drop
  DropCause drop_cause = DropCause::None;

  bool dropped() const { return drop_cause != DropCause::None; }
};

struct QueueSample {
  double t = 0.0;
  double q = 0.0;      // packets in the system
  double q_hat = 0.0;  // RED average (0 under DropTail bookkeeping-free runs)
};

struct QueueTrace {
  std::vector<QueueSample> samples;  // starts with (0, 0, 0)
  double t_end = 0.0;
};

struct WindowSample {
  double t = 0.0;
  int flow = 0;
  double w = 0.0;
};

struct FlowCounters {
  int flow = 0;
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped_red = 0;
  std::uint64_t dropped_tail = 0;
  std::uint64_t in_system = 0;
  std::uint64_t dropped() const { return dropped_red + dropped_tail; }
};

struct SimResult {
  std::vector<Packet> packets;  // in send order
  QueueTrace trace;
  std::vector<WindowSample> windows;  // TCP window after every change
  std::vector<FlowCounters> counters; // one per flow, in input order
};

/// Event-driven run of `flows` through one bottleneck. UDP flows follow their departure
/// schedule; TCP flows are window-limited (1/W growth per ACK, halving once per window
/// on loss, no retransmission). Deterministic in `options.seed`.
SimResult run_simulation(const std::vector<FlowSpec>& flows, const LinkConfig& link,
                         const SimOptions& options);

/// Piecewise-constant resampling of the trace at k * sample_dt, k = 0..floor(t_end/sample_dt).
std::vector<QueueSample> queue_timeseries(const QueueTrace& trace, double sample_dt);

}  // namespace redbench

#endif  // REDBENCH_PACKET_SIM_HPP
