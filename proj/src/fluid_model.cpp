#include "redbench/fluid_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <thread>

#include "redbench/rng.hpp"

namespace redbench {

namespace {

// Pairwise summation.
double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

void check_state(const FluidState& s, const FluidParams& p) {
  if (!(s.w >= kWindowFloor) || !(s.q >= 0.0) || !(s.q <= p.buffer) || !(s.q_hat >= 0.0)) {
    std::ostringstream os;
    os << "fluid state out of range (w=" << s.w << ", q=" << s.q << ", q_hat=" << s.q_hat
       << ", buffer=" << p.buffer << ")";
    throw std::invalid_argument(os.str());
  }
}

FluidState clamp_to_box(FluidState s, const FluidParams& p) {
  s.w = std::max(kWindowFloor, s.w);
  s.q = std::clamp(s.q, 0.0, p.buffer);
  s.q_hat = std::max(0.0, s.q_hat);
  return s;
}

}  // namespace

void FluidParams::validate() const {
  if (!(rtt > 0.0) || !std::isfinite(rtt)) {
    throw std::invalid_argument("fluid rtt must be positive");
  }
  if (!(capacity > 0.0) || !std::isfinite(capacity)) {
    throw std::invalid_argument("fluid capacity must be positive");
  }
  if (!(buffer > 0.0) || !std::isfinite(buffer)) {
    throw std::invalid_argument("fluid buffer must be positive");
  }
  if (!(w_q >= 0.0) || w_q > 1.0) {
    throw std::invalid_argument("fluid w_q must lie in [0, 1]");
  }
  if (fixed_drop_probability && !(*fixed_drop_probability >= 0.0 && *fixed_drop_probability <= 1.0)) {
    throw std::invalid_argument("fixed drop probability must lie in [0, 1]");
  }
  red.validate();
}

double window_per_ack(double w) {
  if (!(w >= kWindowFloor)) {
    throw std::domain_error("window_per_ack: window below one segment");
  }
  return w + 1.0 / w;
}

double effective_rtt(const FluidState& state, const FluidParams& params) {
  return params.delay_coupled_rtt ? params.rtt + state.q / params.capacity : params.rtt;
}

double marking_probability(const FluidState& state, const FluidParams& params) {
  if (params.fixed_drop_probability) {
    return *params.fixed_drop_probability;
  }
  return drop_probability(state.q_hat, params.red);
}

double marking_intensity(const FluidState& state, const FluidParams& params) {
  if (!params.marking_enabled) {
    return 0.0;
  }
  if (params.intensity) {
    return std::max(0.0, params.intensity(state, params));
  }
  return marking_probability(state, params) * state.w / effective_rtt(state, params);
}

FluidRates drift(const FluidState& state, const FluidParams& params) {
  const double rtt = effective_rtt(state, params);
  const double lambda = marking_intensity(state, params);
  FluidRates r;
  r.dw = 1.0 / rtt - 0.5 * state.w * lambda;
  r.dq = state.w / rtt - params.capacity;
  if (state.q <= 0.0 && r.dq < 0.0) r.dq = 0.0;
  if (state.q >= params.buffer && r.dq > 0.0) r.dq = 0.0;
  r.dq_hat = continuous_ewma_rate(state.q_hat, state.q, params.w_q, params.capacity);
  return r;
}

NoiseAmplitudes diffusion(const FluidState& state, const FluidParams& params) {
  const double rtt = effective_rtt(state, params);
  const double lambda = marking_intensity(state, params);
  return {std::sqrt(1.0 / rtt + 0.5 * state.w * lambda),
          std::sqrt(std::abs(state.w / rtt - params.capacity))};
}

FluidState step_euler_maruyama(const FluidState& state, const FluidParams& params, double dt,
                               double z1, double z2, std::int64_t n_events) {
  if (!(dt > 0.0) || dt > params.rtt / 10.0) {
    std::ostringstream os;
    os << "step size " << dt << " violates 0 < dt <= rtt/10 = " << params.rtt / 10.0;
    throw StepSizeError(os.str());
  }
  const FluidRates rates = drift(state, params);
  FluidState next = state;
  next.t = state.t + dt;

  if (!params.noise_enabled) {
    next.w = state.w + rates.dw * dt;
    next.q = state.q + rates.dq * dt;
    next.q_hat = state.q_hat + rates.dq_hat * dt;
    return clamp_to_box(next, params);
  }

  const NoiseAmplitudes sigma = diffusion(state, params);
  const double sqrt_dt = std::sqrt(dt);
  const bool sampled_marks =
      params.marking_enabled && params.marking_mode == MarkingMode::PoissonEvents;
  const double dw = sampled_marks ? 1.0 / effective_rtt(state, params) : rates.dw;

  next.w = state.w + dw * dt + sigma.sigma_w * sqrt_dt * z1;
  if (sampled_marks && n_events > 0) {
    next.w = std::ldexp(next.w, -static_cast<int>(std::min<std::int64_t>(n_events, 1000)));
  }
  next.q = state.q + rates.dq * dt + sigma.sigma_q * sqrt_dt * z2;
  next.q_hat = state.q_hat + rates.dq_hat * dt;
  return clamp_to_box(next, params);
}

FluidRun simulate_fluid(const FluidParams& params, const FluidRunConfig& config) {
  params.validate();
  check_state(config.initial, params);
  if (!(config.t_end > 0.0)) {
    throw std::invalid_argument("t_end must be positive");
  }
  if (config.n_traj < 1) {
    throw std::invalid_argument("n_traj must be at least 1");
  }
  const double dt = config.dt > 0.0 ? config.dt : params.rtt / 100.0;
  if (dt > params.rtt / 10.0) {
    throw StepSizeError("dt exceeds rtt/10");
  }

  const auto n_steps = static_cast<std::size_t>(std::ceil(config.t_end / dt - 1e-9));
  const std::size_t stride =
      config.sample_dt > 0.0
          ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(config.sample_dt / dt)))
          : 1;

  std::vector<std::size_t> sample_steps{0};
  for (std::size_t k = stride; k < n_steps; k += stride) sample_steps.push_back(k);
  if (sample_steps.back() != n_steps) sample_steps.push_back(n_steps);
  const std::size_t n_samples = sample_steps.size();
  const std::size_t n_traj = config.n_traj;

  auto step_time = [&](std::size_t k) {
    return k == n_steps ? config.t_end : static_cast<double>(k) * dt;
  };

  // values[(var * n_samples + s) * n_traj + i]
  std::vector<double> values(3 * n_samples * n_traj);
  FluidRun run;
  run.final_states.resize(n_traj);
  if (config.keep_trajectories) run.trajectories.resize(n_traj);

  const bool sampled_marks = params.noise_enabled && params.marking_enabled &&
                             params.marking_mode == MarkingMode::PoissonEvents;

  auto integrate = [&](std::size_t i) {
    Engine engine = make_engine(config.seed, i);
    std::normal_distribution<double> normal(0.0, 1.0);
    FluidState s = config.initial;
    s.t = 0.0;
    std::size_t next_sample = 0;
    auto record = [&](std::size_t k) {
      if (next_sample < n_samples && sample_steps[next_sample] == k) {
        values[(0 * n_samples + next_sample) * n_traj + i] = s.w;
        values[(1 * n_samples + next_sample) * n_traj + i] = s.q;
        values[(2 * n_samples + next_sample) * n_traj + i] = s.q_hat;
        if (config.keep_trajectories) run.trajectories[i].push_back(s);
        ++next_sample;
      }
    };
    record(0);
    for (std::size_t k = 1; k <= n_steps; ++k) {
      const double h = step_time(k) - step_time(k - 1);
      double z1 = 0.0, z2 = 0.0;
      std::int64_t events = 0;
      if (params.noise_enabled) {
        z1 = normal(engine);
        z2 = normal(engine);
      }
      if (sampled_marks) {
        const double mean = marking_intensity(s, params) * h;
        if (mean > 0.0) {
          events = std::poisson_distribution<std::int64_t>(mean)(engine);
        }
      }
      s = step_euler_maruyama(s, params, h, z1, z2, events);
      s.t = step_time(k);
      record(k);
    }
    run.final_states[i] = s;
  };

  unsigned threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  threads = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, n_traj));
  if (threads == 1) {
    for (std::size_t i = 0; i < n_traj; ++i) integrate(i);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < n_traj; i += threads) integrate(i);
      });
    }
  }

  EnsembleSeries& st = run.stats;
  st.t.resize(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) st.t[s] = step_time(sample_steps[s]);

  std::vector<double> dev(n_traj), dev_sq(n_traj);
  auto reduce = [&](int var, std::vector<double>& mean, std::vector<double>& var_out) {
    mean.resize(n_samples);
    var_out.resize(n_samples);
    for (std::size_t s = 0; s < n_samples; ++s) {
      const double* xs = &values[(static_cast<std::size_t>(var) * n_samples + s) * n_traj];
      const double shift = xs[0];
      for (std::size_t i = 0; i < n_traj; ++i) {
        dev[i] = xs[i] - shift;
        dev_sq[i] = dev[i] * dev[i];
      }
      const double s1 = pairwise_sum(dev);
      const double s2 = pairwise_sum(dev_sq);
      const double n = static_cast<double>(n_traj);
      mean[s] = shift + s1 / n;
      var_out[s] = n_traj > 1 ? std::max(0.0, (s2 - s1 * s1 / n) / (n - 1.0)) : 0.0;
    }
  };
  reduce(0, st.mean_w, st.var_w);
  reduce(1, st.mean_q, st.var_q);
  reduce(2, st.mean_q_hat, st.var_q_hat);
  return run;
}

namespace {

// Largest-precision bisection for an increasing function with f(lo) < 0 < f(hi).
template <class F>
double bisect_increasing(F&& f, double lo, double hi) {
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

FixedPoint finish(FluidState s, const FluidParams& params, bool determined = true) {
  FixedPoint fp;
  fp.state = s;
  fp.drop_probability = marking_probability(s, params);
  fp.intensity = marking_intensity(s, params);
  fp.queue_determined = determined;
  return fp;
}

}  // namespace

FixedPoint fixed_point(const FluidParams& params) {
  params.validate();
  if (!params.marking_enabled) {
    throw NoEquilibriumError("marking disabled: the window drift 1/T never vanishes");
  }
  const double c = params.capacity;

  // Window that balances the sending rate against C for a given average queue (Q = Q_hat).
  auto balanced_window = [&](double q) {
    FluidState s;
    s.q = q;
    return c * effective_rtt(s, params);
  };

  if (params.fixed_drop_probability) {
    const double p = *params.fixed_drop_probability;
    if (!(p > 0.0)) {
      throw NoEquilibriumError("fixed drop probability is zero: window grows without bound");
    }
    FluidState s;
    s.w = std::sqrt(2.0 / p);
    if (s.w < kWindowFloor) {
      throw NoEquilibriumError("fixed drop probability too large: W* = sqrt(2/p) < 1");
    }
    if (params.delay_coupled_rtt) {
      // W*/(T + Q/C) = C  =>  Q = W* - C*T
      const double q = s.w - c * params.rtt;
      s.q = s.q_hat = std::clamp(q, 0.0, params.buffer);
      return finish(s, params);
    }
    const double excess = s.w / params.rtt - c;
    if (std::abs(excess) <= 1e-12 * c) {
      return finish(s, params, false);
    }
    s.q = s.q_hat = excess > 0.0 ? params.buffer : 0.0;
    return finish(s, params);
  }

  if (params.intensity) {
    // Residual of the window drift along the curve W = C*T(Q), Q = Q_hat; decreasing in Q_hat.
    auto residual = [&](double q) {
      FluidState s;
      s.q = s.q_hat = q;
      s.w = balanced_window(q);
      return -(1.0 / effective_rtt(s, params) - 0.5 * s.w * marking_intensity(s, params));
    };
    if (residual(0.0) >= 0.0 || residual(params.buffer) <= 0.0) {
      throw NoEquilibriumError("plugged intensity: window drift does not change sign on [0, B]");
    }
    FluidState s;
    s.q = s.q_hat = bisect_increasing(residual, 0.0, params.buffer);
    s.w = balanced_window(s.q);
    return finish(s, params);
  }

  const RedParams& red = params.red;
  if (params.delay_coupled_rtt) {
    auto excess_p = [&](double q) {
      const double w = balanced_window(q);
      return drop_probability(q, red) - 2.0 / (w * w);
    };
    if (balanced_window(red.q_min) < kWindowFloor) {
      throw NoEquilibriumError("C*T below one packet: no interior equilibrium");
    }
    const double w_top = balanced_window(red.q_max);
    if (red.p_max - 2.0 / (w_top * w_top) <= 0.0) {
      throw NoEquilibriumError(
          "required drop probability 2/W*^2 stays above p_max across the RED ramp: "
          "equilibrium would lie at or above q_max");
    }
    FluidState s;
    s.q = s.q_hat = bisect_increasing(excess_p, red.q_min, red.q_max);
    if (s.q > params.buffer) {
      throw NoEquilibriumError("equilibrium queue exceeds the buffer");
    }
    s.w = balanced_window(s.q);
    return finish(s, params);
  }

  // Constant T: W* = C*T and p(Q_hat*) = 2 / W*^2, inverted on the linear ramp.
  FluidState s;
  s.w = c * params.rtt;
  if (s.w < kWindowFloor) {
    throw NoEquilibriumError("C*T below one packet: no interior equilibrium");
  }
  const double p_star = 2.0 / (s.w * s.w);
  if (p_star >= red.p_max) {
    std::ostringstream os;
    os << "required drop probability " << p_star << " >= p_max " << red.p_max
       << ": equilibrium would lie at or above q_max";
    throw NoEquilibriumError(os.str());
  }
  s.q = s.q_hat = red.q_min + (red.q_max - red.q_min) * p_star / red.p_max;
  if (s.q > params.buffer) {
    throw NoEquilibriumError("equilibrium queue exceeds the buffer");
  }
  return finish(s, params);
}

}  // namespace redbench
