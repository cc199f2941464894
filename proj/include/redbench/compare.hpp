#ifndef REDBENCH_COMPARE_HPP
#define REDBENCH_COMPARE_HPP

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "redbench/dat_io.hpp"

namespace redbench {

class DisjointRangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CompareOptions {
  double warmup = 0.0;   // seconds discarded from the start
  double grid_dt = 0.01; // common resampling step
  double max_lag = 0.0;  // lag search window; 0 selects min(20 s, overlap / 4)
};

struct SeriesErrors {
  double rel_l1 = 0.0;    // sum|a - b| / sum|b|
  double rel_linf = 0.0;  // max|a - b| / max|b|
  double mean_packet = 0.0;
  double mean_fluid = 0.0;
};

struct CompareResult {
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t points = 0;
  std::size_t packet_runs = 0;
  SeriesErrors q;
  SeriesErrors q_hat;
  double lag_packet = 0.0;  // lag of the Q_hat cross-correlation peak against Q
  double lag_fluid = 0.0;

  /// Single machine-readable line: "SUMMARY key=value ...".
  std::string summary_line() const;
};

/// Sample-and-hold value of (t, v) at time `at`; the first value before the start.
double hold_at(std::span<const double> t, std::span<const double> v, double at);

/// Lag (in units of `dt`, converted to seconds) maximising the Pearson correlation of a(t) with
/// b(t + lag), searched over [-max_lag, max_lag].
double peak_lag(std::span<const double> a, std::span<const double> b, double dt, double max_lag);

/// Compares the Q and Q_hat columns of one or more packet queue tables (averaged) with a
/// fluid table (columns Q/Q_hat or mean_Q/mean_Q_hat) on a common post-warmup grid.
CompareResult compare_queue_series(const std::vector<DatTable>& packet, const DatTable& fluid,
                                   const CompareOptions& options);

}  // namespace redbench

#endif  // REDBENCH_COMPARE_HPP
