#ifndef REDBENCH_METRICS_HPP
#define REDBENCH_METRICS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "redbench/dat_io.hpp"
#include "redbench/packet_sim.hpp"
#include "redbench/traffic_gen.hpp"

namespace redbench {

inline constexpr const char* kLogHeader = "#red-bench-log v1";

struct PacketLogEntry {
  int flow = 0;
  std::uint64_t seq = 0;
  std::uint32_t size = 0;
  double t_send = 0.0;
  std::optional<double> t_recv;  // empty = LOST
};

struct FlowLabel {
  int flow = 0;
  std::string transport;
  std::string dest;
};

/// Text packet log:
///   #red-bench-log v1
///   # flow <id> <UDP|TCP> <dest>        (optional labels)
///   # <free comment>
///   <flow> <seq> <size> <t_send> <t_recv|->
struct PacketLog {
  std::vector<std::string> comments;
  std::vector<FlowLabel> labels;
  std::vector<PacketLogEntry> entries;
};

class LogParseError : public std::runtime_error {
 public:
  LogParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Delivered and dropped packets of a run; packets still queued at the end are left out.
PacketLog to_packet_log(const SimResult& result, const std::vector<FlowSpec>& flows);

void write_packet_log(std::ostream& os, const PacketLog& log);
PacketLog read_packet_log(std::istream& is);

struct FlowReport {
  int flow = 0;  // 0 for the aggregate
  std::string from;
  std::string to;
  double total_time = 0.0;
  std::uint64_t total_packets = 0;
  double min_delay = 0.0;
  double max_delay = 0.0;
  double avg_delay = 0.0;
  double avg_jitter = 0.0;
  double delay_stddev = 0.0;
  std::uint64_t bytes_received = 0;
  double avg_bitrate = 0.0;      // Kbit/s, K = 1000
  double avg_packet_rate = 0.0;  // pkt/s
  std::uint64_t dropped = 0;
  double dropped_percent = 0.0;
  double avg_loss_burst = 0.0;   // packets
};

struct DecodeResult {
  std::vector<FlowReport> flows;  // ascending flow id
  FlowReport total;
  std::size_t error_lines = 0;
};

/// Per-flow statistics plus the aggregate over all flows. Throws on an empty log.
DecodeResult decode(const PacketLog& log);

/// ITGDec-style text block.
std::string render_report(const DecodeResult& result);

enum class SeriesMetric { Bitrate, Delay, Jitter };

/// Per-bin series over receive time: bin start, one column per flow, aggregate last.
DatTable binned_series(const PacketLog& log, double bin_ms, SeriesMetric metric);

const char* dat_file_name(SeriesMetric metric);

}  // namespace redbench

#endif  // REDBENCH_METRICS_HPP
