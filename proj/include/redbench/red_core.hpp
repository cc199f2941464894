#ifndef REDBENCH_RED_CORE_HPP
#define REDBENCH_RED_CORE_HPP

#include <cstddef>
#include <cstdint>

namespace redbench {

/// Configuration of the RED discipline. Thresholds are in packets.
struct RedParams {
  double q_min = 5.0;
  double q_max = 15.0;
  double p_max = 0.1;
  double w_q = 0.002;
  /// Count-adjusted probability p_b / (1 - count * p_b) instead of the plain per-packet p_b.
  bool use_count = false;

  /// Throws std::invalid_argument if the thresholds or weights are out of range.
  void validate() const;
};

struct RedState {
  double avg_queue = 0.0;
  std::int64_t count = 0;
  std::size_t occupancy = 0;
};

enum class RedAction { Enqueue, Drop };
enum class DropCause { None, Red, Tail };

struct RedDecision {
  RedAction action = RedAction::Enqueue;
  DropCause cause = DropCause::None;
  double base_probability = 0.0;       // p_b
  double effective_probability = 0.0;  // p_a (equals p_b without use_count)
  RedState state;                      // state after the decision
};

/// One EWMA step: (1 - w_q) * q_hat + w_q * q.
/// Throws std::domain_error for negative or non-finite queues or w_q outside [0, 1].
double ewma_update(double q_hat, double q, double w_q);

/// Piecewise-linear RED law: 0 below q_min, linear ramp to p_max, 1 at and above q_max.
double drop_probability(double q_hat, const RedParams& params);

/// Count adjustment of a base probability; clamps to [p_b, 1].
double count_adjusted_probability(double p_b, std::int64_t count);

/// Per-packet accept/drop decision on the current average queue.
/// `u` is a uniform draw in [0, 1); `buffer` is the queue capacity in packets.
/// A full buffer forces a drop flagged as DropCause::Tail.
RedDecision red_decide(const RedState& state, const RedParams& params, double u,
                       std::size_t buffer);

/// Continuous-time EWMA relaxation rate w_q * c * (q - q_hat), in packets/s.
double continuous_ewma_rate(double q_hat, double q, double w_q, double c);

}  // namespace redbench

#endif  // REDBENCH_RED_CORE_HPP
