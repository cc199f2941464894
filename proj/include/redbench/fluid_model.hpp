#ifndef REDBENCH_FLUID_MODEL_HPP
#define REDBENCH_FLUID_MODEL_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "redbench/red_core.hpp"

namespace redbench {

/// One segment is always in flight.
inline constexpr double kWindowFloor = 1.0;

struct FluidState {
  double w = kWindowFloor;  // congestion window, packets
  double q = 0.0;           // instantaneous queue, packets
  double q_hat = 0.0;       // EWMA of the queue, packets
  double t = 0.0;           // seconds
};

enum class MarkingMode {
  ExpectedDrift,  // dN replaced by its intensity in the drift
  PoissonEvents,  // dN sampled as Poisson counts, each event halves the window
};

struct FluidParams;

/// Marking intensity lambda(t) in events/s.
using IntensityFn = std::function<double(const FluidState&, const FluidParams&)>;

struct FluidParams {
  double rtt = 0.1;          // T, seconds
  double capacity = 100.0;   // C, packets/s
  double w_q = 0.002;        // EWMA weight
  RedParams red;             // drop law driving the marking intensity
  double buffer = 100.0;     // B, packets
  bool noise_enabled = true;
  bool marking_enabled = true;
  MarkingMode marking_mode = MarkingMode::ExpectedDrift;
  /// Use T = rtt + Q / C instead of the constant rtt.
  bool delay_coupled_rtt = false;
  /// Diagnostic: hold the drop probability constant instead of following the RED ramp.
  std::optional<double> fixed_drop_probability;
  /// Replaces the default intensity p(Q_hat) * W / T when set.
  IntensityFn intensity;

  void validate() const;
};

struct FluidRates {
  double dw = 0.0;
  double dq = 0.0;
  double dq_hat = 0.0;
};

struct NoiseAmplitudes {
  double sigma_w = 0.0;
  double sigma_q = 0.0;
};

class StepSizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NoEquilibriumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-acknowledgement window growth w + 1/w.
double window_per_ack(double w);

/// Round-trip time seen by the fluid sources in `state`.
double effective_rtt(const FluidState& state, const FluidParams& params);

/// Drop probability feeding the marking intensity (RED ramp or the diagnostic constant).
double marking_probability(const FluidState& state, const FluidParams& params);

/// lambda = p(Q_hat) * W / T, or the plugged intensity; 0 with marking disabled.
double marking_intensity(const FluidState& state, const FluidParams& params);

/// Expected-value drift of (W, Q, Q_hat). dQ is clipped at the buffer walls.
FluidRates drift(const FluidState& state, const FluidParams& params);

/// sigma_W = sqrt(1/T + W/2 * lambda), sigma_Q = sqrt(|W/T - C|).
NoiseAmplitudes diffusion(const FluidState& state, const FluidParams& params);

/// One Euler-Maruyama step. `n_events` is the sampled marking count, used only in
/// MarkingMode::PoissonEvents. With noise disabled the step is plain forward Euler.
/// Throws StepSizeError unless 0 < dt <= rtt / 10.
FluidState step_euler_maruyama(const FluidState& state, const FluidParams& params, double dt,
                               double z1, double z2, std::int64_t n_events);

struct FluidRunConfig {
  double t_end = 10.0;
  double dt = 0.0;          // 0 selects rtt / 100
  double sample_dt = 0.0;   // 0 records every step
  std::uint64_t seed = 1;
  std::size_t n_traj = 1;
  FluidState initial{};
  bool keep_trajectories = false;
  unsigned threads = 0;     // 0 selects hardware concurrency
};

struct EnsembleSeries {
  std::vector<double> t;
  std::vector<double> mean_w, mean_q, mean_q_hat;
  std::vector<double> var_w, var_q, var_q_hat;  // unbiased; 0 for a single trajectory
};

struct FluidRun {
  EnsembleSeries stats;
  std::vector<FluidState> final_states;             // one per trajectory
  std::vector<std::vector<FluidState>> trajectories;  // filled when keep_trajectories
};

/// Integrates `n_traj` independent trajectories. Trajectory i draws from the stream
/// derived from (seed, i), so results do not depend on the thread count.
FluidRun simulate_fluid(const FluidParams& params, const FluidRunConfig& config);

struct FixedPoint {
  FluidState state;
  double drop_probability = 0.0;
  double intensity = 0.0;
  /// False when the queue level is left free by the drift (balanced diagnostic case).
  bool queue_determined = true;
};

/// Equilibrium of the drift field. Throws NoEquilibriumError naming the violated constraint.
FixedPoint fixed_point(const FluidParams& params);

}  // namespace redbench

#endif  // REDBENCH_FLUID_MODEL_HPP
