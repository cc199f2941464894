#include "redbench/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string_view>
#include <tuple>

namespace redbench {

PacketLog to_packet_log(const SimResult& result, const std::vector<FlowSpec>& flows) {
  PacketLog log;
  for (const auto& f : flows) {
    log.labels.push_back({f.id, to_string(f.transport), f.dest});
  }
  log.entries.reserve(result.packets.size());
  for (const Packet& p : result.packets) {
    if (!p.t_recv && !p.dropped()) continue;
    log.entries.push_back({p.flow, p.seq, p.size, p.t_send, p.t_recv});
  }
  return log;
}

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

template <class T>
bool parse_token(std::string_view tok, T& out) {
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

void write_packet_log(std::ostream& os, const PacketLog& log) {
  os << kLogHeader << '\n';
  for (const auto& l : log.labels) {
    os << "# flow " << l.flow << ' ' << l.transport << ' ' << l.dest << '\n';
  }
  for (const auto& c : log.comments) os << "# " << c << '\n';
  for (const auto& e : log.entries) {
    os << e.flow << ' ' << e.seq << ' ' << e.size << ' ' << fixed(e.t_send, 9) << ' '
       << (e.t_recv ? fixed(*e.t_recv, 9) : std::string("-")) << '\n';
  }
}

PacketLog read_packet_log(std::istream& is) {
  PacketLog log;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(is, line)) {
    throw LogParseError(1, "empty log");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kLogHeader) {
    throw LogParseError(1, std::string("missing '") + kLogHeader + "' header");
  }
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[0] == '#') {
      const auto tok = tokens(std::string_view(line).substr(1));
      FlowLabel label;
      if (tok.size() == 4 && tok[0] == "flow" && parse_token(tok[1], label.flow)) {
        label.transport = std::string(tok[2]);
        label.dest = std::string(tok[3]);
        log.labels.push_back(label);
      } else {
        const auto body = line.find_first_not_of(" \t", 1);
        log.comments.push_back(body == std::string::npos ? "" : line.substr(body));
      }
      continue;
    }
    const auto tok = tokens(line);
    if (tok.size() != 5) {
      throw LogParseError(line_no, "expected 5 fields, got " + std::to_string(tok.size()));
    }
    PacketLogEntry e;
    double recv = 0.0;
    if (!parse_token(tok[0], e.flow) || !parse_token(tok[1], e.seq) ||
        !parse_token(tok[2], e.size) || !parse_token(tok[3], e.t_send) ||
        !std::isfinite(e.t_send)) {
      throw LogParseError(line_no, "malformed field");
    }
    if (tok[4] != "-") {
      if (!parse_token(tok[4], recv) || !std::isfinite(recv)) {
        throw LogParseError(line_no, "malformed receive time");
      }
      if (recv < e.t_send) {
        throw LogParseError(line_no, "receive time precedes send time");
      }
      e.t_recv = recv;
    }
    log.entries.push_back(e);
  }
  return log;
}

namespace {

// Statistics of one packet stream given in stream order.
FlowReport stream_report(const std::vector<const PacketLogEntry*>& stream) {
  FlowReport r;
  if (stream.empty()) return r;

  double first_send = std::numeric_limits<double>::infinity();
  double last_recv = -std::numeric_limits<double>::infinity();
  std::vector<double> delays;
  double jitter_sum = 0.0;
  std::uint64_t jitter_pairs = 0;
  std::optional<double> prev_delay;
  std::uint64_t lost = 0, runs = 0;
  bool in_run = false;

  for (const PacketLogEntry* e : stream) {
    if (!e->t_recv) {
      ++lost;
      if (!in_run) ++runs;
      in_run = true;
      continue;
    }
    in_run = false;
    const double d = *e->t_recv - e->t_send;
    delays.push_back(d);
    r.bytes_received += e->size;
    first_send = std::min(first_send, e->t_send);
    last_recv = std::max(last_recv, *e->t_recv);
    if (prev_delay) {
      jitter_sum += std::abs(d - *prev_delay);
      ++jitter_pairs;
    }
    prev_delay = d;
  }

  r.total_packets = delays.size();
  r.dropped = lost;
  r.dropped_percent = 100.0 * static_cast<double>(lost) / static_cast<double>(stream.size());
  r.avg_loss_burst = runs ? static_cast<double>(lost) / static_cast<double>(runs) : 0.0;
  if (delays.empty()) return r;

  r.total_time = last_recv - first_send;
  r.min_delay = *std::min_element(delays.begin(), delays.end());
  r.max_delay = *std::max_element(delays.begin(), delays.end());
  // Shifted moments about the first delay.
  const double shift = delays.front();
  double s1 = 0.0, s2 = 0.0;
  for (double d : delays) {
    s1 += d - shift;
    s2 += (d - shift) * (d - shift);
  }
  const double n = static_cast<double>(delays.size());
  r.avg_delay = shift + s1 / n;
  r.delay_stddev = std::sqrt(std::max(0.0, s2 / n - (s1 / n) * (s1 / n)));
  r.avg_jitter = jitter_pairs ? jitter_sum / static_cast<double>(jitter_pairs) : 0.0;
  if (r.total_time > 0.0) {
    r.avg_bitrate = static_cast<double>(r.bytes_received) * 8.0 / r.total_time / 1000.0;
    r.avg_packet_rate = n / r.total_time;
  }
  return r;
}

std::map<int, std::vector<const PacketLogEntry*>> per_flow_streams(const PacketLog& log) {
  std::map<int, std::vector<const PacketLogEntry*>> flows;
  for (const auto& e : log.entries) flows[e.flow].push_back(&e);
  for (auto& [id, s] : flows) {
    std::stable_sort(s.begin(), s.end(),
                     [](const PacketLogEntry* a, const PacketLogEntry* b) { return a->seq < b->seq; });
  }
  return flows;
}

// All flows merged in send order.
std::vector<const PacketLogEntry*> merged_stream(const PacketLog& log) {
  std::vector<const PacketLogEntry*> all;
  all.reserve(log.entries.size());
  for (const auto& e : log.entries) all.push_back(&e);
  std::stable_sort(all.begin(), all.end(), [](const PacketLogEntry* a, const PacketLogEntry* b) {
    return std::tie(a->t_send, a->flow, a->seq) < std::tie(b->t_send, b->flow, b->seq);
  });
  return all;
}

}  // namespace

DecodeResult decode(const PacketLog& log) {
  if (log.entries.empty()) {
    throw std::invalid_argument("decode: empty packet log");
  }
  DecodeResult out;
  for (const auto& [id, stream] : per_flow_streams(log)) {
    FlowReport r = stream_report(stream);
    r.flow = id;
    r.from = "source";
    r.to = "unknown";
    for (const auto& l : log.labels) {
      if (l.flow == id) r.to = l.dest;
    }
    out.flows.push_back(std::move(r));
  }
  out.total = stream_report(merged_stream(log));
  return out;
}

namespace {

void field(std::ostream& os, const char* name, const std::string& value) {
  char label[64];
  std::snprintf(label, sizeof label, "%-20s", name);
  os << label << " = " << value << '\n';
}

void stats_block(std::ostream& os, const FlowReport& r, bool total) {
  field(os, "Total time", fixed(r.total_time, 6) + " s");
  field(os, "Total packets", std::to_string(r.total_packets));
  field(os, "Minimum delay", fixed(r.min_delay, 6) + " s");
  field(os, "Maximum delay", fixed(r.max_delay, 6) + " s");
  field(os, "Average delay", fixed(r.avg_delay, 6) + " s");
  field(os, "Average jitter", fixed(r.avg_jitter, 6) + " s");
  field(os, "Delay standard deviation", fixed(r.delay_stddev, 6) + " s");
  field(os, "Bytes received", std::to_string(r.bytes_received));
  field(os, "Average bitrate", fixed(r.avg_bitrate, 6) + " Kbit/s");
  field(os, "Average packet rate", fixed(r.avg_packet_rate, 6) + " pkt/s");
  field(os, "Packets dropped",
        std::to_string(r.dropped) + " (" + fixed(r.dropped_percent, 2) + " %)");
  const bool bare_zero = total && r.avg_loss_burst == 0.0;
  field(os, "Average loss-burst size", (bare_zero ? "0" : fixed(r.avg_loss_burst, 6)) + " pkt");
}

constexpr const char* kRule = "----------------------------------------------------------";

}  // namespace

std::string render_report(const DecodeResult& result) {
  std::ostringstream os;
  for (const auto& r : result.flows) {
    os << kRule << '\n';
    os << "Flow number: " << r.flow << '\n';
    os << "From " << r.from << '\n';
    os << "To " << r.to << '\n';
    os << kRule << '\n';
    stats_block(os, r, false);
  }
  os << kRule << '\n';
  os << "***** TOTAL RESULTS *****" << '\n';
  os << kRule << '\n';
  field(os, "Number of flows", std::to_string(result.flows.size()));
  stats_block(os, result.total, true);
  field(os, "Error lines", std::to_string(result.error_lines));
  os << kRule << '\n';
  return os.str();
}

const char* dat_file_name(SeriesMetric metric) {
  switch (metric) {
    case SeriesMetric::Bitrate: return "bitrate.dat";
    case SeriesMetric::Delay: return "delay.dat";
    case SeriesMetric::Jitter: return "jitter.dat";
  }
  return "series.dat";
}

namespace {

const char* metric_name(SeriesMetric m) {
  switch (m) {
    case SeriesMetric::Bitrate: return "bitrate Kbit/s";
    case SeriesMetric::Delay: return "delay s";
    case SeriesMetric::Jitter: return "jitter s";
  }
  return "";
}

// Fills one column of per-bin values for a stream in stream order.
std::vector<double> bin_stream(const std::vector<const PacketLogEntry*>& stream, double bin_s,
                               std::size_t n_bins, SeriesMetric metric) {
  std::vector<double> sum(n_bins, 0.0);
  std::vector<std::uint64_t> count(n_bins, 0);
  std::optional<double> prev_delay;
  for (const PacketLogEntry* e : stream) {
    if (!e->t_recv) continue;
    const auto bin = std::min(n_bins - 1, static_cast<std::size_t>(std::floor(*e->t_recv / bin_s)));
    const double d = *e->t_recv - e->t_send;
    switch (metric) {
      case SeriesMetric::Bitrate:
        sum[bin] += static_cast<double>(e->size);
        break;
      case SeriesMetric::Delay:
        sum[bin] += d;
        ++count[bin];
        break;
      case SeriesMetric::Jitter:
        if (prev_delay) {
          sum[bin] += std::abs(d - *prev_delay);
          ++count[bin];
        }
        break;
    }
    prev_delay = d;
  }
  std::vector<double> col(n_bins, 0.0);
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (metric == SeriesMetric::Bitrate) {
      col[b] = sum[b] * 8.0 / bin_s / 1000.0;
    } else if (count[b]) {
      col[b] = sum[b] / static_cast<double>(count[b]);
    }
  }
  return col;
}

}  // namespace

DatTable binned_series(const PacketLog& log, double bin_ms, SeriesMetric metric) {
  if (!(bin_ms > 0.0)) {
    throw std::invalid_argument("bin width must be positive");
  }
  if (log.entries.empty()) {
    throw std::invalid_argument("binned_series: empty packet log");
  }
  const double bin_s = bin_ms / 1000.0;
  double last_recv = -1.0;
  for (const auto& e : log.entries) {
    if (e.t_recv) last_recv = std::max(last_recv, *e.t_recv);
  }

  DatTable table;
  table.comments.push_back(std::string("metric ") + metric_name(metric) + ", bin " +
                           format_number(bin_ms) + " ms");
  table.names.push_back("bin_start_s");
  const auto flows = per_flow_streams(log);
  for (const auto& [id, s] : flows) table.names.push_back("flow" + std::to_string(id));
  table.names.push_back("aggregate");

  const std::size_t n_bins =
      last_recv < 0.0 ? 0 : static_cast<std::size_t>(std::floor(last_recv / bin_s)) + 1;
  std::vector<double> starts(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) starts[b] = static_cast<double>(b) * bin_s;
  table.columns.push_back(std::move(starts));
  if (n_bins == 0) {
    table.columns.resize(table.names.size());
    return table;
  }
  for (const auto& [id, s] : flows) table.columns.push_back(bin_stream(s, bin_s, n_bins, metric));
  table.columns.push_back(bin_stream(merged_stream(log), bin_s, n_bins, metric));
  return table;
}

}  // namespace redbench
