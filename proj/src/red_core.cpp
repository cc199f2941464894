#include "redbench/red_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace redbench {

void RedParams::validate() const {
  if (!(q_min > 0.0) || !(q_max > q_min)) {
    throw std::invalid_argument("RED thresholds must satisfy 0 < q_min < q_max (got q_min=" +
                                std::to_string(q_min) + ", q_max=" + std::to_string(q_max) + ")");
  }
  if (!(p_max > 0.0) || p_max > 1.0) {
    throw std::invalid_argument("RED p_max must lie in (0, 1], got " + std::to_string(p_max));
  }
  if (!(w_q > 0.0) || w_q > 1.0) {
    throw std::invalid_argument("RED w_q must lie in (0, 1], got " + std::to_string(w_q));
  }
}

double ewma_update(double q_hat, double q, double w_q) {
  if (!std::isfinite(q_hat) || !std::isfinite(q) || !std::isfinite(w_q)) {
    throw std::domain_error("ewma_update: non-finite input");
  }
  if (q_hat < 0.0 || q < 0.0) {
    throw std::domain_error("ewma_update: negative queue length");
  }
  if (w_q < 0.0 || w_q > 1.0) {
    throw std::domain_error("ewma_update: weight outside [0, 1]");
  }
  return (1.0 - w_q) * q_hat + w_q * q;
}

double drop_probability(double q_hat, const RedParams& params) {
  if (q_hat < params.q_min) {
    return 0.0;
  }
  if (q_hat >= params.q_max) {
    return 1.0;
  }
  return params.p_max * (q_hat - params.q_min) / (params.q_max - params.q_min);
}

double count_adjusted_probability(double p_b, std::int64_t count) {
  const double denom = 1.0 - static_cast<double>(count) * p_b;
  if (denom <= 0.0) {
    return 1.0;
  }
  return std::clamp(p_b / denom, p_b, 1.0);
}

RedDecision red_decide(const RedState& state, const RedParams& params, double u,
                       std::size_t buffer) {
  RedDecision d;
  d.state = state;
  d.base_probability = drop_probability(state.avg_queue, params);
  d.effective_probability = params.use_count
                                ? count_adjusted_probability(d.base_probability, state.count)
                                : d.base_probability;

  if (u < d.effective_probability) {
    d.action = RedAction::Drop;
    d.cause = DropCause::Red;
  } else if (state.occupancy >= buffer) {
    d.action = RedAction::Drop;
    d.cause = DropCause::Tail;
  }

  if (d.action == RedAction::Drop) {
    d.state.count = 0;
  } else if (d.base_probability > 0.0) {
    ++d.state.count;
  } else {
    d.state.count = 0;
  }
  return d;
}

double continuous_ewma_rate(double q_hat, double q, double w_q, double c) {
  return w_q * c * (q - q_hat);
}

}  // namespace redbench
