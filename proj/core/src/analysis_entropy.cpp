#include <cmath>
#include <sstream>

#include "enerkin/analysis.hpp"
#include "enerkin/error.hpp"

namespace enerkin {

namespace {

double weight_of(const std::vector<double>& weights, std::size_t v) {
  return weights.empty() ? 1.0 : weights.at(v);
}

// f log(f0 / f) with the 0 log 0 = 0 convention.
double entropy_term(double f, double f0, int type, double x) {
  if (f <= 0.0) return 0.0;
  if (!(f0 > 0.0)) {
    std::ostringstream os;
    os << "relative_entropy: reference density vanishes at type " << type << ", x=" << x
       << " where f > 0";
    throw ValidationError(os.str());
  }
  return f * std::log(f0 / f);
}

}  // namespace

double relative_entropy(const std::vector<DensityFamily>& f, const std::vector<DensityFamily>& f0,
                        double x_max, int n_cells, const std::vector<double>& f_weights,
                        const std::vector<double>& f0_weights) {
  if (f.size() != f0.size()) throw ValidationError("relative_entropy: type counts differ");
  if (!(x_max > 0.0) || n_cells < 1) throw ValidationError("relative_entropy: bad grid");
  const double h = x_max / n_cells;
  double acc = 0.0;
  for (std::size_t v = 0; v < f.size(); ++v) {
    const double wf = weight_of(f_weights, v);
    const double w0 = weight_of(f0_weights, v);
    for (int k = 0; k < n_cells; ++k) {
      const double x = (k + 0.5) * h;
      acc += entropy_term(wf * f[v].pdf(x), w0 * f0[v].pdf(x), static_cast<int>(v) + 1, x);
    }
  }
  return acc * h;
}

double relative_entropy(const DensityGrid& f, const std::vector<DensityFamily>& f0,
                        const std::vector<double>& f0_weights) {
  if (static_cast<std::size_t>(f.type_count()) != f0.size())
    throw ValidationError("relative_entropy: type counts differ");
  double acc = 0.0;
  for (int v = 1; v <= f.type_count(); ++v) {
    const double w0 = weight_of(f0_weights, static_cast<std::size_t>(v - 1));
    const auto& row = f[v];
    for (int k = 0; k < f.n_cells; ++k) {
      const double x = f.center(k);
      acc += entropy_term(row[static_cast<std::size_t>(k)],
                          w0 * f0[static_cast<std::size_t>(v - 1)].pdf(x), v, x);
    }
  }
  return acc * f.h();
}

double relative_entropy(const DensityGrid& f, const DensityGrid& f0) {
  if (f.type_count() != f0.type_count() || f.n_cells != f0.n_cells || f.x_max != f0.x_max)
    throw ValidationError("relative_entropy: grids differ in shape");
  double acc = 0.0;
  for (int v = 1; v <= f.type_count(); ++v)
    for (int k = 0; k < f.n_cells; ++k)
      acc += entropy_term(f[v][static_cast<std::size_t>(k)], f0[v][static_cast<std::size_t>(k)],
                          v, f.center(k));
  return acc * f.h();
}

MonotonicityResult entropy_monotonicity_check(const std::vector<double>& entropies, double tol) {
  MonotonicityResult r;
  r.entropies = entropies;
  for (std::size_t k = 1; k < entropies.size(); ++k) {
    const double delta = entropies[k] - entropies[k - 1];
    if (delta < r.min_delta) {
      r.min_delta = delta;
      r.worst_step = k;
    }
    if (!(delta >= -tol)) r.passed = false;
  }
  return r;
}

MonotonicityResult entropy_monotonicity_check(const std::vector<GridSnapshot>& trajectory,
                                              const std::vector<DensityFamily>& f0, double tol,
                                              const std::vector<double>& f0_weights) {
  std::vector<double> h;
  h.reserve(trajectory.size());
  for (const auto& s : trajectory) h.push_back(relative_entropy(s.grid, f0, f0_weights));
  return entropy_monotonicity_check(h, tol);
}

}  // namespace enerkin
