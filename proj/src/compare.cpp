#include "redbench/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace redbench {

double hold_at(std::span<const double> t, std::span<const double> v, double at) {
  if (t.empty()) throw std::invalid_argument("hold_at: empty series");
  const auto it = std::upper_bound(t.begin(), t.end(), at);
  if (it == t.begin()) return v.front();
  return v[static_cast<std::size_t>(std::distance(t.begin(), it)) - 1];
}

double peak_lag(std::span<const double> a, std::span<const double> b, double dt, double max_lag) {
  const std::size_t n = std::min(a.size(), b.size());
  if (n < 2) return 0.0;
  const auto max_k = static_cast<long>(
      std::min<double>(std::floor(max_lag / dt + 1e-9), static_cast<double>(n - 2)));
  long best_k = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (long k = -max_k; k <= max_k; ++k) {
    // Pearson correlation of the overlapping segments a[i], b[i + k]
    const std::size_t i0 = k < 0 ? static_cast<std::size_t>(-k) : 0;
    const std::size_t i1 = k > 0 ? n - static_cast<std::size_t>(k) : n;
    const double m = static_cast<double>(i1 - i0);
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = i0; i < i1; ++i) {
      mean_a += a[i];
      mean_b += b[static_cast<std::size_t>(static_cast<long>(i) + k)];
    }
    mean_a /= m;
    mean_b /= m;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = i0; i < i1; ++i) {
      const double x = a[i] - mean_a;
      const double y = b[static_cast<std::size_t>(static_cast<long>(i) + k)] - mean_b;
      sab += x * y;
      saa += x * x;
      sbb += y * y;
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) continue;
    const double r = sab / std::sqrt(saa * sbb);
    if (r > best) {
      best = r;
      best_k = k;
    }
  }
  return static_cast<double>(best_k) * dt;
}

namespace {

const std::vector<double>& find_column(const DatTable& t, const std::string& name) {
  for (const auto& candidate : {name, "mean_" + name}) {
    for (std::size_t i = 0; i < t.names.size(); ++i) {
      if (t.names[i] == candidate) return t.columns[i];
    }
  }
  throw std::runtime_error("table has no '" + name + "' column");
}

SeriesErrors errors(const std::vector<double>& a, const std::vector<double>& b) {
  SeriesErrors e;
  double l1 = 0.0, ref_l1 = 0.0, linf = 0.0, ref_linf = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = std::abs(a[i] - b[i]);
    l1 += diff;
    ref_l1 += std::abs(b[i]);
    linf = std::max(linf, diff);
    ref_linf = std::max(ref_linf, std::abs(b[i]));
    e.mean_packet += a[i];
    e.mean_fluid += b[i];
  }
  auto ratio = [](double num, double den) {
    if (den > 0.0) return num / den;
    return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  };
  e.rel_l1 = ratio(l1, ref_l1);
  e.rel_linf = ratio(linf, ref_linf);
  if (!a.empty()) {
    e.mean_packet /= static_cast<double>(a.size());
    e.mean_fluid /= static_cast<double>(a.size());
  }
  return e;
}

}  // namespace

CompareResult compare_queue_series(const std::vector<DatTable>& packet, const DatTable& fluid,
                                   const CompareOptions& options) {
  if (packet.empty()) throw std::invalid_argument("compare: no packet series");
  if (!(options.grid_dt > 0.0)) throw std::invalid_argument("compare: grid step must be positive");

  const auto& ft = fluid.column("t");
  if (ft.empty()) throw DisjointRangeError("fluid series is empty");
  double t0 = std::max(options.warmup, ft.front());
  double t1 = ft.back();
  for (const auto& p : packet) {
    const auto& pt = p.column("t");
    if (pt.empty()) throw DisjointRangeError("packet series is empty");
    t0 = std::max(t0, pt.front());
    t1 = std::min(t1, pt.back());
  }
  if (!(t1 > t0)) {
    std::ostringstream os;
    os << "time ranges do not overlap after warmup (start " << t0 << ", end " << t1 << ")";
    throw DisjointRangeError(os.str());
  }

  const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / options.grid_dt + 1e-9)) + 1;
  std::vector<double> pq(n, 0.0), pqh(n, 0.0), fq(n), fqh(n);
  const auto& fq_col = find_column(fluid, "Q");
  const auto& fqh_col = find_column(fluid, "Q_hat");
  for (std::size_t k = 0; k < n; ++k) {
    const double t = t0 + static_cast<double>(k) * options.grid_dt;
    fq[k] = hold_at(ft, fq_col, t);
    fqh[k] = hold_at(ft, fqh_col, t);
  }
  for (const auto& p : packet) {
    const auto& pt = p.column("t");
    const auto& q = find_column(p, "Q");
    const auto& qh = find_column(p, "Q_hat");
    for (std::size_t k = 0; k < n; ++k) {
      const double t = t0 + static_cast<double>(k) * options.grid_dt;
      pq[k] += hold_at(pt, q, t);
      pqh[k] += hold_at(pt, qh, t);
    }
  }
  const double runs = static_cast<double>(packet.size());
  for (std::size_t k = 0; k < n; ++k) {
    pq[k] /= runs;
    pqh[k] /= runs;
  }

  CompareResult r;
  r.t_start = t0;
  r.t_end = t0 + static_cast<double>(n - 1) * options.grid_dt;
  r.points = n;
  r.packet_runs = packet.size();
  r.q = errors(pq, fq);
  r.q_hat = errors(pqh, fqh);
  const double max_lag = options.max_lag > 0.0 ? options.max_lag : std::min(20.0, 0.25 * (t1 - t0));
  r.lag_packet = peak_lag(pq, pqh, options.grid_dt, max_lag);
  r.lag_fluid = peak_lag(fq, fqh, options.grid_dt, max_lag);
  return r;
}

std::string CompareResult::summary_line() const {
  std::ostringstream os;
  os << "SUMMARY t_start=" << format_number(t_start) << " t_end=" << format_number(t_end)
     << " points=" << points << " packet_runs=" << packet_runs
     << " q_rel_l1=" << format_number(q.rel_l1) << " q_rel_linf=" << format_number(q.rel_linf)
     << " q_mean_packet=" << format_number(q.mean_packet)
     << " q_mean_fluid=" << format_number(q.mean_fluid)
     << " qhat_rel_l1=" << format_number(q_hat.rel_l1)
     << " qhat_rel_linf=" << format_number(q_hat.rel_linf)
     << " qhat_mean_packet=" << format_number(q_hat.mean_packet)
     << " qhat_mean_fluid=" << format_number(q_hat.mean_fluid)
     << " lag_packet=" << format_number(lag_packet) << " lag_fluid=" << format_number(lag_fluid);
  return os.str();
}

}  // namespace redbench
