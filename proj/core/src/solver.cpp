#include "enerkin/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "enerkin/error.hpp"
#include "enerkin/kinetics.hpp"

namespace enerkin {

DensityGrid::DensityGrid(double x_max_, int n_cells_, int type_count)
    : x_max(x_max_), n_cells(n_cells_) {
  if (!(x_max > 0.0) || !std::isfinite(x_max)) throw ValidationError("grid: x_max must be > 0");
  if (n_cells < 2) throw ValidationError("grid: n_cells must be >= 2");
  if (type_count < 1) throw ValidationError("grid: at least one type required");
  values.assign(static_cast<std::size_t>(type_count),
                std::vector<double>(static_cast<std::size_t>(n_cells), 0.0));
}

DensityGrid DensityGrid::from_densities(double x_max, int n_cells,
                                        const std::vector<DensityFamily>& densities,
                                        const std::vector<double>& weights) {
  if (!weights.empty() && weights.size() != densities.size())
    throw ValidationError("grid: weight count does not match density count");
  DensityGrid g(x_max, n_cells, static_cast<int>(densities.size()));
  const double h = g.h();
  for (std::size_t v = 0; v < densities.size(); ++v) {
    const double w = weights.empty() ? 1.0 : weights[v];
    double prev = densities[v].cdf(0.0);
    for (int k = 0; k < n_cells; ++k) {
      const double next = densities[v].cdf((k + 1) * h);
      g.values[v][static_cast<std::size_t>(k)] = w * std::max(0.0, next - prev) / h;
      prev = next;
    }
  }
  return g;
}

std::vector<double> gain_one_type(std::span<const double> rho, double h, double* leak) {
  const auto n = static_cast<std::ptrdiff_t>(rho.size());
  if (n == 0) return {};
  const std::ptrdiff_t m_count = 2 * n - 1;
  std::vector<double> reversed(rho.rbegin(), rho.rend());
  // conv[m] = sum_j rho_j rho_{m-j} (without the factor h), s_m = (m + 1) h.
  std::vector<double> conv(static_cast<std::size_t>(m_count), 0.0);
  for (std::ptrdiff_t m = 0; m < m_count; ++m) {
    const std::ptrdiff_t j0 = std::max<std::ptrdiff_t>(0, m - n + 1);
    const std::ptrdiff_t j_half = m >= 1 ? (m - 1) / 2 : -1;  // last j with j < m - j
    double acc = 0.0;
    if (j_half >= j0) {
      const double* a = rho.data() + j0;
      const double* b = reversed.data() + (n - 1 - m + j0);
      const std::ptrdiff_t len = j_half - j0 + 1;
      for (std::ptrdiff_t t = 0; t < len; ++t) acc += a[t] * b[t];
      acc *= 2.0;
    }
    if (m % 2 == 0 && m / 2 < n) acc += rho[static_cast<std::size_t>(m / 2)] * rho[static_cast<std::size_t>(m / 2)];
    conv[static_cast<std::size_t>(m)] = acc;
  }
  // G_k = sum_{m >= k} C_m h / s_m = h * sum_{m >= k} conv_m / (m + 1).
  std::vector<double> gain(static_cast<std::size_t>(n), 0.0);
  double tail = 0.0;
  double total = 0.0;
  for (std::ptrdiff_t m = m_count - 1; m >= 0; --m) {
    tail += conv[static_cast<std::size_t>(m)] / static_cast<double>(m + 1);
    total += conv[static_cast<std::size_t>(m)];
    if (m < n) gain[static_cast<std::size_t>(m)] = tail * h;
  }
  if (leak) {
    double in_grid = 0.0;
    for (double g : gain) in_grid += g;
    *leak = std::max(0.0, total * h * h - in_grid * h);
  }
  return gain;
}

std::vector<double> gain_one_type(const DensityGrid& grid) {
  if (grid.type_count() != 1) throw ValidationError("gain_one_type: single-type grid required");
  return gain_one_type(grid.values[0], grid.h());
}

std::vector<double> rhs_one_type(const DensityGrid& grid, double alpha, bool fold_leak) {
  if (grid.type_count() != 1) throw ValidationError("rhs_one_type: single-type grid required");
  if (!(alpha >= 0.0)) throw ValidationError("rhs_one_type: alpha must be >= 0");
  const auto& rho = grid.values[0];
  double leak = 0.0;
  auto out = gain_one_type(rho, grid.h(), fold_leak ? &leak : nullptr);
  if (fold_leak) out.back() += leak / grid.h();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = alpha * (out[k] - rho[k]);
  return out;
}

bool is_one_type_uniform(const ReactionNetwork& network, double& alpha) {
  if (network.types().count() != 1 || network.binary_channels().size() != 1 ||
      !network.unary_channels().empty())
    return false;
  const auto& ch = network.binary_channels().front();
  if (!ch.rate.energy_independent()) return false;
  for (const auto& o : ch.outcomes)
    if (o.weight > 0.0 && !o.split.is_uniform()) return false;
  alpha = ch.rate.constant_value();
  return true;
}

namespace {

// Cell masses of a split law on a grid of width h, computed from the
// (unnormalized) density at the midpoint of each cell's overlap with [0, A]
// and normalized over all covering cells, in-grid or not.
class SplitMasses {
 public:
  SplitMasses(const EnergySplit& split, double h, int n)
      : split_(split), h_(h), n_(n) {
    if (const auto* c = std::get_if<EnergySplit::Canonical>(&split.form())) {
      canonical_ = true;
      first_.resize(static_cast<std::size_t>(2 * n + 2));
      second_.resize(first_.size());
      for (std::size_t k = 0; k < first_.size(); ++k) {
        const double x = (static_cast<double>(k) + 0.5) * h;
        first_[k] = c->first.pdf(x);
        second_[k] = c->second.pdf(x);
      }
    }
  }

  // Fills masses for cells 0..K-1 (K = cells covering [0, A]); returns K.
  int compute(double available, bool mirror, std::vector<double>& masses) const {
    const double ratio = available / h_;
    const int covering = std::max(1, static_cast<int>(std::ceil(ratio - 1e-9)));
    masses.assign(static_cast<std::size_t>(covering), 0.0);
    const bool aligned = std::abs(ratio - std::round(ratio)) < 1e-9 &&
                         covering < static_cast<int>(first_.size());
    double total = 0.0;
    for (int k = 0; k < covering; ++k) {
      double w;
      if (canonical_ && aligned) {
        const auto a = static_cast<std::size_t>(k);
        const auto b = static_cast<std::size_t>(covering - 1 - k);
        w = mirror ? second_[a] * first_[b] : first_[a] * second_[b];
      } else {
        const double lo = k * h_;
        const double hi = std::min((k + 1) * h_, available);
        const double mid = 0.5 * (lo + hi);
        const double u = mirror ? available - mid : mid;
        w = split_.unnormalized(u, available) * (hi - lo);
      }
      if (!std::isfinite(w) || w < 0.0) w = 0.0;
      masses[static_cast<std::size_t>(k)] = w;
      total += w;
    }
    if (!(total > 0.0)) return 0;
    for (double& m : masses) m /= total;
    return covering;
  }

 private:
  const EnergySplit& split_;
  double h_;
  int n_;
  bool canonical_ = false;
  std::vector<double> first_;
  std::vector<double> second_;
};

}  // namespace

std::vector<std::vector<double>> rhs_multitype(const DensityGrid& grid,
                                               const ReactionNetwork& network, bool fold_leak) {
  const auto& types = network.types();
  if (grid.type_count() != types.count())
    throw ValidationError("rhs_multitype: grid type count does not match the network");
  if (!network.unary_channels().empty())
    throw ValidationError("rhs_multitype: unary channels are not part of the kinetic equation");
  const int n = grid.n_cells;
  const double h = grid.h();
  const auto vcount = static_cast<std::size_t>(types.count());
  std::vector<std::vector<double>> gain(vcount, std::vector<double>(static_cast<std::size_t>(n), 0.0));
  std::vector<std::vector<double>> loss = gain;
  // Difference arrays for uniform splits: constant mass over a cell range.
  std::vector<std::vector<double>> diff(vcount, std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
  std::vector<double> leak(vcount, 0.0);
  std::vector<double> masses;

  auto add_uniform = [&](TypeId type, double amount, double available) {
    // amount spread uniformly over [0, available].
    auto& d = diff[static_cast<std::size_t>(type - 1)];
    auto& g = gain[static_cast<std::size_t>(type - 1)];
    if (!(available > 0.0)) {
      g[0] += amount / h;
      return;
    }
    const double per_cell = amount * h / available;
    double full_d = std::floor(available / h);
    auto full = static_cast<long>(full_d);
    double partial = amount * (available - full_d * h) / available;
    if (full >= n) {
      d[0] += per_cell / h;
      d[static_cast<std::size_t>(n)] -= per_cell / h;
      leak[static_cast<std::size_t>(type - 1)] += amount - per_cell * n;
      return;
    }
    d[0] += per_cell / h;
    d[static_cast<std::size_t>(full)] -= per_cell / h;
    g[static_cast<std::size_t>(full)] += partial / h;
  };

  for (const auto& ch : network.binary_channels()) {
    const auto& ra = grid[ch.a];
    const auto& rb = grid[ch.b];
    const double cfac = ch.a == ch.b ? 0.5 : 1.0;
    const double ia = types.internal_energy(ch.a);
    const double ib = types.internal_energy(ch.b);
    std::vector<SplitMasses> split_first;
    std::vector<SplitMasses> split_second;
    split_first.reserve(ch.outcomes.size());
    split_second.reserve(ch.outcomes.size());
    for (const auto& o : ch.outcomes) {
      split_first.emplace_back(o.split, h, n);
      split_second.emplace_back(o.split, h, n);
    }
    std::vector<double> weights(ch.outcomes.size());
    std::vector<double> avail(ch.outcomes.size());
    for (int j = 0; j < n; ++j) {
      const double pa = ra[static_cast<std::size_t>(j)];
      if (pa == 0.0) continue;
      const double xj = grid.center(j);
      for (int l = 0; l < n; ++l) {
        const double pb = rb[static_cast<std::size_t>(l)];
        if (pb == 0.0) continue;
        const double xl = grid.center(l);
        const double rate = ch.rate(xj, xl);
        if (rate == 0.0) continue;
        double wsum = 0.0;
        for (std::size_t k = 0; k < ch.outcomes.size(); ++k) {
          const auto& o = ch.outcomes[k];
          avail[k] = ia + ib + xj + xl - types.internal_energy(o.first) -
                     types.internal_energy(o.second);
          weights[k] = (o.weight > 0.0 && avail[k] >= 0.0) ? o.weight : 0.0;
          wsum += weights[k];
        }
        if (wsum == 0.0) continue;  // nothing occurs: no gain, no loss
        const double flux = cfac * rate * pa * pb * h * h;
        loss[static_cast<std::size_t>(ch.a - 1)][static_cast<std::size_t>(j)] += flux / h;
        loss[static_cast<std::size_t>(ch.b - 1)][static_cast<std::size_t>(l)] += flux / h;
        for (std::size_t k = 0; k < ch.outcomes.size(); ++k) {
          if (weights[k] == 0.0) continue;
          const auto& o = ch.outcomes[k];
          const double amount = flux * weights[k] / wsum;
          if (o.split.is_uniform()) {
            add_uniform(o.first, amount, avail[k]);
            add_uniform(o.second, amount, avail[k]);
            continue;
          }
          for (int side = 0; side < 2; ++side) {
            const TypeId target = side == 0 ? o.first : o.second;
            const auto& sm = side == 0 ? split_first[k] : split_second[k];
            const int covering = sm.compute(avail[k], side == 1, masses);
            if (covering == 0) {
              std::ostringstream os;
              os << "rhs_multitype: kernel of channel (" << ch.a << "," << ch.b
                 << ") has no mass at available energy " << avail[k];
              throw InfeasibleError(os.str());
            }
            auto& g = gain[static_cast<std::size_t>(target - 1)];
            for (int c = 0; c < covering; ++c) {
              const double part = amount * masses[static_cast<std::size_t>(c)];
              if (c < n)
                g[static_cast<std::size_t>(c)] += part / h;
              else
                leak[static_cast<std::size_t>(target - 1)] += part;
            }
          }
        }
      }
    }
  }

  std::vector<std::vector<double>> out(vcount, std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (std::size_t v = 0; v < vcount; ++v) {
    double running = 0.0;
    for (int k = 0; k < n; ++k) {
      running += diff[v][static_cast<std::size_t>(k)];
      out[v][static_cast<std::size_t>(k)] =
          gain[v][static_cast<std::size_t>(k)] + running - loss[v][static_cast<std::size_t>(k)];
    }
    if (fold_leak) out[v].back() += leak[v] / h;
  }
  return out;
}

double mass(const DensityGrid& grid) {
  double acc = 0.0;
  for (const auto& row : grid.values)
    for (double x : row) acc += x;
  return acc * grid.h();
}

double mean_energy(const DensityGrid& grid, const TypeTable& types) {
  if (grid.type_count() != types.count())
    throw ValidationError("mean_energy: grid type count does not match the type table");
  double acc = 0.0;
  for (int v = 1; v <= grid.type_count(); ++v) {
    const double internal = types.internal_energy(v);
    const auto& row = grid[v];
    for (int k = 0; k < grid.n_cells; ++k)
      acc += (internal + grid.center(k)) * row[static_cast<std::size_t>(k)];
  }
  return acc * grid.h();
}

double stability_dt_estimate(const DensityGrid& grid, const ReactionNetwork& network,
                             Scheme scheme) {
  const int n = grid.n_cells;
  const double h = grid.h();
  double worst = 0.0;
  for (int v = 1; v <= grid.type_count(); ++v) {
    for (int j = 0; j < n; ++j) {
      double rate = 0.0;
      for (int w = 1; w <= grid.type_count(); ++w) {
        const auto& row = grid[w];
        for (int l = 0; l < n; ++l) {
          const double p = row[static_cast<std::size_t>(l)];
          if (p == 0.0) continue;
          rate += network.binary_rate(v, grid.center(j), w, grid.center(l)) * p * h;
        }
      }
      worst = std::max(worst, rate);
    }
  }
  if (!(worst > 0.0)) return std::numeric_limits<double>::infinity();
  return (scheme == Scheme::rk4 ? 2.78 : 2.0) / worst;
}

namespace {

using Field = std::vector<std::vector<double>>;

Field evaluate(const DensityGrid& g, const ReactionNetwork& network, bool one_type, double alpha,
               bool fold_leak) {
  if (!one_type) return rhs_multitype(g, network, fold_leak);
  // Loss alpha * m * rho keeps the mass fixed point m = 1 neutral; the form
  // alpha * rho makes it unstable, amplifying rounding error like e^{alpha t}.
  const auto& rho = g.values[0];
  double leak = 0.0;
  auto out = gain_one_type(rho, g.h(), fold_leak ? &leak : nullptr);
  if (fold_leak) out.back() += leak / g.h();
  const double m = mass(g);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = alpha * (out[k] - m * rho[k]);
  return {out};
}

DensityGrid offset(const DensityGrid& base, const Field& k, double scale) {
  DensityGrid out = base;
  for (std::size_t v = 0; v < out.values.size(); ++v)
    for (std::size_t c = 0; c < out.values[v].size(); ++c) out.values[v][c] += scale * k[v][c];
  return out;
}

}  // namespace

std::vector<GridSnapshot> integrate(const DensityGrid& initial, const ReactionNetwork& network,
                                    const SolverConfig& config) {
  if (!(config.dt > 0.0)) throw ValidationError("solver: dt must be > 0");
  if (!(config.t_end >= 0.0) || !std::isfinite(config.t_end))
    throw ValidationError("solver: t_end must be finite and >= 0");
  if (initial.type_count() != network.types().count())
    throw ValidationError("solver: grid type count does not match the network");
  std::vector<double> times = config.snapshot_times;
  if (times.empty()) {
    times.push_back(0.0);
    if (config.t_end > 0.0) times.push_back(config.t_end);
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0 || times[i] > config.t_end * (1.0 + 1e-12))
      throw ValidationError("solver: snapshot_times must lie in [0, t_end]");
    if (i > 0 && times[i] < times[i - 1])
      throw ValidationError("solver: snapshot_times must be sorted");
  }

  double alpha = 0.0;
  const bool one_type = is_one_type_uniform(network, alpha);
  const double initial_mass = mass(initial);
  const double h = initial.h();
  const double tol = 1e-9 * config.dt;

  std::vector<GridSnapshot> out;
  std::size_t next = 0;
  DensityGrid g = initial;
  double t = 0.0;
  auto record = [&] {
    while (next < times.size() && times[next] <= t + tol) {
      out.push_back(GridSnapshot{t, g});
      ++next;
    }
  };
  record();

  const auto steps = static_cast<long>(std::ceil(config.t_end / config.dt - 1e-9));
  double clipped_total = 0.0;
  for (long step = 1; step <= steps; ++step) {
    const double dt = std::min(config.dt, config.t_end - t);
    if (config.scheme == Scheme::explicit_euler) {
      const auto k1 = evaluate(g, network, one_type, alpha, config.renormalize_mass);
      g = offset(g, k1, dt);
    } else {
      const auto k1 = evaluate(g, network, one_type, alpha, config.renormalize_mass);
      const auto k2 = evaluate(offset(g, k1, 0.5 * dt), network, one_type, alpha, config.renormalize_mass);
      const auto k3 = evaluate(offset(g, k2, 0.5 * dt), network, one_type, alpha, config.renormalize_mass);
      const auto k4 = evaluate(offset(g, k3, dt), network, one_type, alpha, config.renormalize_mass);
      for (std::size_t v = 0; v < g.values.size(); ++v)
        for (std::size_t c = 0; c < g.values[v].size(); ++c)
          g.values[v][c] += dt / 6.0 * (k1[v][c] + 2.0 * k2[v][c] + 2.0 * k3[v][c] + k4[v][c]);
    }
    t = step == steps ? config.t_end : t + dt;

    double clipped = 0.0;
    for (auto& row : g.values) {
      for (double& x : row) {
        if (!std::isfinite(x)) {
          std::ostringstream os;
          os << "solver: non-finite density at step " << step << " (t=" << t
             << "); reduce dt below " << config.dt;
          throw NumericalError(os.str());
        }
        if (x < 0.0) {
          clipped -= x * h;
          x = 0.0;
        }
      }
    }
    clipped_total += clipped;
    if (clipped_total > config.clip_budget) {
      std::ostringstream os;
      os << "solver: clipping removed " << clipped_total << " mass by step " << step << " (t=" << t
         << "), above the budget " << config.clip_budget << "; reduce dt below " << config.dt;
      throw NumericalError(os.str());
    }
    if (config.renormalize_mass) {
      const double m = mass(g);
      if (m > 0.0)
        for (auto& row : g.values)
          for (double& x : row) x *= initial_mass / m;
    }
    if (config.observer) config.observer(t, g);
    record();
  }
  return out;
}

}  // namespace enerkin
