#ifndef REDBENCH_FOKKER_PLANCK_HPP
#define REDBENCH_FOKKER_PLANCK_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace redbench {

/// Uniform cell-centred grid carrying a probability density (mass = sum density * dx).
struct Grid1D {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n = 0;
  double dx = 0.0;
  std::vector<double> density;

  static Grid1D uniform(double lo, double hi, std::size_t n);

  double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * dx; }
  std::size_t cell_of(double x) const;

  double total_mass() const;
  double mean() const;
  double variance() const;

  /// Puts unit mass into the cell containing x.
  void set_delta(double x);
};

class StabilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Coefficient = std::function<double(double)>;

struct FokkerPlanckResult {
  Grid1D grid;
  std::size_t steps = 0;
  std::size_t clip_events = 0;   // cells clipped from negative values, summed over steps
  double max_mass_error = 0.0;   // max |mass - initial mass| before renormalisation
};

/// Evolves dw/dt = -d/dx[A w] + 1/2 d2/dx2[D w] with zero-flux (reflecting) ends, using
/// an explicit conservative finite-volume scheme. Throws StabilityError unless
/// dt <= dx^2 / max(D) and dt * max|A| <= dx.
FokkerPlanckResult solve_fokker_planck_1d(const Grid1D& grid, const Coefficient& drift,
                                          const Coefficient& diffusion_sq, double dt,
                                          double t_end);

/// Largest step allowed by the stability guard, scaled by `safety`.
double stable_fp_step(const Grid1D& grid, const Coefficient& drift,
                      const Coefficient& diffusion_sq, double safety = 0.5);

/// Window-equation coefficient sets for a frozen marking intensity.
enum class WindowDrift {
  ConstantRtt,  // A = 1/T - W/2 * lambda,  D = 1/T + W/2 * lambda
  InverseWindow // A = 1/W - W/2 * lambda,  D = 1/W + W/2 * lambda
};

struct CoefficientPair {
  Coefficient drift;
  Coefficient diffusion_sq;
};

CoefficientPair window_coefficients(double rtt, double lambda, WindowDrift variant);

/// Normalised histogram on the grid's cells; samples outside [lo, hi) go to the end cells.
Grid1D histogram_density(std::span<const double> samples, double lo, double hi, std::size_t n);

/// Sum |a - b| * dx over matching grids.
double l1_distance(const Grid1D& a, const Grid1D& b);

}  // namespace redbench

#endif  // REDBENCH_FOKKER_PLANCK_HPP
