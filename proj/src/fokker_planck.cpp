#include "redbench/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace redbench {

Grid1D Grid1D::uniform(double lo, double hi, std::size_t n) {
  if (!(hi > lo) || n < 3 || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("degenerate grid: need hi > lo and at least 3 cells");
  }
  Grid1D g;
  g.lo = lo;
  g.hi = hi;
  g.n = n;
  g.dx = (hi - lo) / static_cast<double>(n);
  g.density.assign(n, 0.0);
  return g;
}

std::size_t Grid1D::cell_of(double x) const {
  if (x <= lo) return 0;
  const auto i = static_cast<std::size_t>((x - lo) / dx);
  return std::min(i, n - 1);
}

double Grid1D::total_mass() const {
  double m = 0.0;
  for (double d : density) m += d;
  return m * dx;
}

double Grid1D::mean() const {
  double m = 0.0, s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m += density[i];
    s += density[i] * center(i);
  }
  return s / m;
}

double Grid1D::variance() const {
  const double mu = mean();
  double m = 0.0, s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = center(i) - mu;
    m += density[i];
    s += density[i] * d * d;
  }
  return s / m;
}

void Grid1D::set_delta(double x) {
  std::fill(density.begin(), density.end(), 0.0);
  density[cell_of(x)] = 1.0 / dx;
}

namespace {

void check_grid(const Grid1D& g) {
  if (g.n < 3 || !(g.dx > 0.0) || g.density.size() != g.n) {
    throw std::invalid_argument("degenerate grid");
  }
}

}  // namespace

double stable_fp_step(const Grid1D& grid, const Coefficient& drift,
                      const Coefficient& diffusion_sq, double safety) {
  check_grid(grid);
  double max_d = 0.0, max_a = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    max_d = std::max(max_d, std::abs(diffusion_sq(grid.center(i))));
    max_a = std::max(max_a, std::abs(drift(grid.center(i))));
  }
  double limit = std::numeric_limits<double>::infinity();
  if (max_d > 0.0) limit = std::min(limit, grid.dx * grid.dx / max_d);
  if (max_a > 0.0) limit = std::min(limit, grid.dx / max_a);
  return safety * limit;
}

FokkerPlanckResult solve_fokker_planck_1d(const Grid1D& grid, const Coefficient& drift,
                                          const Coefficient& diffusion_sq, double dt,
                                          double t_end) {
  check_grid(grid);
  if (!(dt > 0.0) || !(t_end >= 0.0)) {
    throw std::invalid_argument("Fokker-Planck: dt must be positive and t_end non-negative");
  }
  const std::size_t n = grid.n;
  const double dx = grid.dx;

  std::vector<double> a(n), d(n);
  double max_a = 0.0, max_d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = drift(grid.center(i));
    d[i] = diffusion_sq(grid.center(i));
    if (d[i] < 0.0) {
      throw std::invalid_argument("Fokker-Planck: negative diffusion coefficient");
    }
    max_a = std::max(max_a, std::abs(a[i]));
    max_d = std::max(max_d, d[i]);
  }
  if (dt * max_d > dx * dx || dt * max_a > dx) {
    std::ostringstream os;
    os << "Fokker-Planck: dt=" << dt << " violates dt <= dx^2/max(D)=" << dx * dx / max_d
       << " or dt <= dx/max|A|=" << dx / max_a;
    throw StabilityError(os.str());
  }

  FokkerPlanckResult result;
  result.grid = grid;
  std::vector<double>& w = result.grid.density;
  const double mass0 = result.grid.total_mass();
  std::vector<double> flux(n + 1, 0.0);

  const auto steps = t_end > 0.0 ? static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9)) : 0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double h = k == steps ? t_end - static_cast<double>(steps - 1) * dt : dt;
    for (std::size_t j = 1; j < n; ++j) {
      flux[j] = 0.5 * (a[j - 1] * w[j - 1] + a[j] * w[j]) -
                (d[j] * w[j] - d[j - 1] * w[j - 1]) / (2.0 * dx);
    }
    const double ratio = h / dx;
    bool clipped = false;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] -= ratio * (flux[i + 1] - flux[i]);
      if (w[i] < 0.0) {
        w[i] = 0.0;
        ++result.clip_events;
        clipped = true;
      }
    }
    const double mass = result.grid.total_mass();
    result.max_mass_error = std::max(result.max_mass_error, std::abs(mass - mass0));
    if (clipped && mass > 0.0) {
      const double scale = mass0 / mass;
      for (double& x : w) x *= scale;
    }
  }
  result.steps = steps;
  return result;
}

CoefficientPair window_coefficients(double rtt, double lambda, WindowDrift variant) {
  if (variant == WindowDrift::ConstantRtt) {
    const double inv_t = 1.0 / rtt;
    return {[=](double w) { return inv_t - 0.5 * w * lambda; },
            [=](double w) { return inv_t + 0.5 * w * lambda; }};
  }
  return {[=](double w) { return 1.0 / w - 0.5 * w * lambda; },
          [=](double w) { return 1.0 / w + 0.5 * w * lambda; }};
}

Grid1D histogram_density(std::span<const double> samples, double lo, double hi, std::size_t n) {
  Grid1D g = Grid1D::uniform(lo, hi, n);
  if (samples.empty()) return g;
  for (double x : samples) g.density[g.cell_of(x)] += 1.0;
  const double norm = 1.0 / (static_cast<double>(samples.size()) * g.dx);
  for (double& v : g.density) v *= norm;
  return g;
}

double l1_distance(const Grid1D& a, const Grid1D& b) {
  if (a.n != b.n || a.lo != b.lo || a.hi != b.hi) {
    throw std::invalid_argument("l1_distance: grids differ");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.n; ++i) s += std::abs(a.density[i] - b.density[i]);
  return s * a.dx;
}

}  // namespace redbench
