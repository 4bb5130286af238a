#pragma once

#include <functional>
#include <span>
#include <vector>

#include "enerkin/density.hpp"
#include "enerkin/network.hpp"
#include "enerkin/types.hpp"

namespace enerkin {

/// Cell-centered densities rho_v(x_k), x_k = (k + 1/2) h, h = x_max / n_cells,
/// one array per type (index v - 1).
struct DensityGrid {
  double x_max = 1.0;
  int n_cells = 2;
  std::vector<std::vector<double>> values;

  DensityGrid() = default;
  DensityGrid(double x_max, int n_cells, int type_count);

  double h() const noexcept { return x_max / n_cells; }
  double center(int k) const noexcept { return (k + 0.5) * h(); }
  int type_count() const noexcept { return static_cast<int>(values.size()); }
  std::vector<double>& operator[](TypeId v) { return values[static_cast<std::size_t>(v - 1)]; }
  const std::vector<double>& operator[](TypeId v) const {
    return values[static_cast<std::size_t>(v - 1)];
  }

  /// Cell averages of `weight * density` for each type.
  static DensityGrid from_densities(double x_max, int n_cells,
                                    const std::vector<DensityFamily>& densities,
                                    const std::vector<double>& weights = {});
};

enum class Scheme { explicit_euler, rk4 };

struct SolverConfig {
  double dt = 0.01;
  double t_end = 0.0;
  Scheme scheme = Scheme::rk4;
  /// Sorted, within [0, t_end]; empty means {0, t_end}. A snapshot is taken at
  /// the first step boundary at or after each requested time.
  std::vector<double> snapshot_times;
  /// Fold gain leaking past x_max into the last cell and rescale to the
  /// initial mass after every step.
  bool renormalize_mass = false;
  /// Largest tolerated cumulative mass removed by clipping negatives.
  double clip_budget = 1e-6;
  /// Called after every step with (time, grid).
  std::function<void(double, const DensityGrid&)> observer;
};

struct GridSnapshot {
  double time = 0.0;
  DensityGrid grid;
};

/// alpha-free gain term of the one-type equation,
///   G(x_k) = sum_{m >= k} C(s_m) / s_m * h,  C(s_m) = sum_j rho_j rho_{m-j} h,
/// with s_m = (m + 1) h. When `leak` is given it receives the gain mass that
/// lands beyond x_max.
std::vector<double> gain_one_type(std::span<const double> rho, double h, double* leak = nullptr);
std::vector<double> gain_one_type(const DensityGrid& grid);

/// alpha * (gain - rho) for a single-type grid.
std::vector<double> rhs_one_type(const DensityGrid& grid, double alpha,
                                 bool fold_leak = false);

/// Gain minus loss of the multitype equation for every (type, cell).
/// Collisions of cell pairs use the cell-center energies; product energies
/// are distributed over cells by the split law's cell masses.
std::vector<std::vector<double>> rhs_multitype(const DensityGrid& grid,
                                               const ReactionNetwork& network,
                                               bool fold_leak = false);

/// Whether the network reduces to the one-type equation (V = 1, constant
/// rate, uniform kernel); returns the rate.
bool is_one_type_uniform(const ReactionNetwork& network, double& alpha);

/// Fixed-step explicit integration. The one-type path evolves with the loss
/// alpha * mass * rho, which equals rhs_one_type on normalized grids and keeps
/// mass conserved. Throws NumericalError naming the step on
/// NaN or when clipping removes more than `clip_budget` mass.
std::vector<GridSnapshot> integrate(const DensityGrid& initial, const ReactionNetwork& network,
                                    const SolverConfig& config);

double mass(const DensityGrid& grid);
/// sum_v int (I_v + x) rho_v(x) dx.
double mean_energy(const DensityGrid& grid, const TypeTable& types);

/// Heuristic dt bound from the largest loss rate (2 / max rate for Euler,
/// 2.78 / max rate for RK4). Not enforced.
double stability_dt_estimate(const DensityGrid& grid, const ReactionNetwork& network,
                             Scheme scheme);

}  // namespace enerkin
