#include "enerkin/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "enerkin/csv.hpp"
#include "enerkin/error.hpp"
#include "enerkin/kinetics.hpp"

namespace enerkin {

namespace {

using nlohmann::json;

std::string numbered(const char* prefix, std::size_t k, int width, const char* suffix) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%0*zu%s", prefix, width, k, suffix);
  return buf;
}

template <class T>
T param(const json& params, const char* key, T fallback) {
  if (!params.contains(key)) return fallback;
  try {
    return params.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("check parameter '") + key + "' has the wrong type");
  }
}

std::vector<double> all_samples(const std::vector<Trajectory>& runs, TypeId type,
                                 const std::vector<double>& times) {
  std::vector<double> out;
  for (const auto& run : runs)
    for (const auto& snap : run.snapshots) {
      const bool wanted =
          times.empty() ? &snap == &run.snapshots.back()
                        : std::any_of(times.begin(), times.end(), [&](double t) {
                            return std::abs(t - snap.time) <= 1e-12 * std::max(1.0, t);
                          });
      if (!wanted) continue;
      for (const auto& p : snap.state.particles)
        if (p.type == type) out.push_back(p.kinetic_energy);
    }
  return out;
}

DensityGrid reference_grid(const Scenario& s) {
  const auto densities = s.reference_densities();
  const auto weights = s.reference_weights();
  DensityGrid g(s.solver->x_max, s.solver->n_cells, s.network.types().count());
  for (int v = 1; v <= g.type_count(); ++v)
    for (int k = 0; k < g.n_cells; ++k)
      g[v][static_cast<std::size_t>(k)] =
          weights[static_cast<std::size_t>(v - 1)] * densities[static_cast<std::size_t>(v - 1)].pdf(g.center(k));
  return g;
}

double max_abs(const std::vector<std::vector<double>>& field) {
  double m = 0.0;
  for (const auto& row : field)
    for (double x : row) m = std::max(m, std::abs(x));
  return m;
}

CheckResult evaluate_check(const Scenario& s, const CheckSpec& spec) {
  CheckResult r;
  r.name = param<std::string>(spec.params, "name", spec.kind);
  r.tolerance = spec.tolerance;
  const auto& types = s.network.types();
  const auto& p = spec.params;

  if (spec.kind == "kernel_normalization") {
    const auto samples = param<std::size_t>(p, "samples", 1000);
    r.samples = samples;
    try {
      s.network.validate(samples, param<std::uint64_t>(p, "seed", 7));
      r.observed = 0.0;
    } catch (const ValidationError&) {
      r.observed = std::numeric_limits<double>::infinity();
    }
  } else if (spec.kind == "detailed_balance") {
    const auto quads = sample_quadruples(types, param<std::size_t>(p, "samples", 1000),
                                         param<double>(p, "x_cap", 10.0));
    const auto res = detailed_balance_residual(
        make_transition_rate(s.network),
        state_function(s.reference_densities(), s.reference_weights()), types, quads);
    r.observed = res.max_residual;
    r.samples = res.evaluated;
  } else if (spec.kind == "local_equilibrium") {
    const auto pairs = sample_pairs(types, param<std::size_t>(p, "samples", 50),
                                    param<double>(p, "x_cap", 10.0));
    const auto res = local_equilibrium_residual(
        make_transition_rate(s.network),
        state_function(s.reference_densities(), s.reference_weights()), types, pairs);
    r.observed = res.max_residual;
    r.samples = res.evaluated;
  } else if (spec.kind == "fixed_point") {
    const auto count = param<std::size_t>(p, "samples", 8);
    const double x_cap = param<double>(p, "x_cap", 10.0);
    std::vector<std::pair<TypeId, double>> points;
    Halton seq(2);
    for (std::size_t i = 0; i < count; ++i) {
      const auto u = seq.next();
      const auto v = std::min(types.count(), 1 + static_cast<int>(u[1] * types.count()));
      points.emplace_back(v, u[0] * x_cap);
    }
    const auto res = fixed_point_residual(
        make_transition_rate(s.network),
        state_function(s.reference_densities(), s.reference_weights()), types, points);
    r.observed = res.max_residual;
    r.samples = res.evaluated;
  } else if (spec.kind == "additive_conservation") {
    std::vector<DensityFamily> f = s.reference_densities();
    std::vector<double> fw = s.reference_weights();
    if (p.contains("f")) {
      for (const auto& item : p.at("f")) {
        const auto v = static_cast<std::size_t>(item.at("type").get<int>() - 1);
        f.at(v) = DensityFamily::from_json(item.at("density"));
        fw.at(v) = item.value("weight", 1.0);
      }
    }
    const auto quads = sample_quadruples(types, param<std::size_t>(p, "samples", 1000),
                                         param<double>(p, "x_cap", 10.0));
    const auto res = additive_conservation_residual(
        state_function(f, fw), state_function(s.reference_densities(), s.reference_weights()),
        quads, make_transition_rate(s.network));
    r.observed = res.max_residual;
    r.samples = res.evaluated;
  } else if (spec.kind == "fixed_point_grid") {
    const auto grid = reference_grid(s);
    r.observed = max_abs(rhs_multitype(grid, s.network));
    r.samples = static_cast<std::size_t>(grid.n_cells * grid.type_count());
  } else if (spec.kind == "solver_convergence") {
    const auto snaps = integrate(s.solver_initial_grid(), s.network, s.solver_config());
    const auto target = reference_grid(s);
    double worst = 0.0;
    for (int v = 1; v <= target.type_count(); ++v)
      for (int k = 0; k < target.n_cells; ++k)
        worst = std::max(worst, std::abs(snaps.back().grid[v][static_cast<std::size_t>(k)] -
                                         target[v][static_cast<std::size_t>(k)]));
    r.observed = worst;
    r.samples = static_cast<std::size_t>(target.n_cells * target.type_count());
  } else if (spec.kind == "entropy_monotonicity") {
    auto config = s.solver_config();
    const auto f0 = s.reference_densities();
    const auto w0 = s.reference_weights();
    const auto initial = s.solver_initial_grid();
    std::vector<double> h{relative_entropy(initial, f0, w0)};
    config.observer = [&](double, const DensityGrid& g) { h.push_back(relative_entropy(g, f0, w0)); };
    integrate(initial, s.network, config);
    const auto mono = entropy_monotonicity_check(h, spec.tolerance);
    r.observed = std::isfinite(mono.min_delta) ? std::max(0.0, -mono.min_delta) : 0.0;
    r.samples = h.size();
    if (p.contains("terminal_tolerance")) {
      const double terminal = param<double>(p, "terminal_tolerance", 0.0);
      if (std::abs(h.back()) > terminal) r.observed = std::max(r.observed, std::abs(h.back()));
      r.passed = mono.passed && std::abs(h.back()) <= terminal;
      return r;
    }
    r.passed = mono.passed;
    return r;
  } else if (spec.kind == "mass_conservation") {
    const auto initial = s.solver_initial_grid();
    const double m0 = mass(initial);
    double worst = 0.0;
    for (const auto& snap : integrate(initial, s.network, s.solver_config()))
      worst = std::max(worst, std::abs(mass(snap.grid) - m0) / m0);
    r.observed = worst;
    r.samples = 1;
  } else if (spec.kind == "energy_conservation") {
    const auto config = s.simulator_config();
    const auto runs = run_ensemble(config);
    double worst = 0.0;
    for (const auto& run : runs) {
      const double e0 = total_energy(run.snapshots.front().state, types);
      const double e1 = total_energy(run.final_state, types);
      worst = std::max(worst, std::abs(e1 - e0) / std::max(std::abs(e0), 1e-300));
    }
    r.observed = worst;
    r.samples = runs.size();
  } else if (spec.kind == "simulation_ks") {
    const auto type = param<int>(p, "type", 1);
    if (!types.contains(type)) throw ValidationError("simulation_ks: unknown type");
    const auto runs = run_ensemble(s.simulator_config());
    const auto samples = all_samples(runs, type, param<std::vector<double>>(p, "pool_times", {}));
    const auto target = s.reference_densities()[static_cast<std::size_t>(type - 1)];
    r.observed = ks_distance(samples, [&](double x) { return target.cdf(x); });
    r.samples = samples.size();
  } else if (spec.kind == "admissible_pair") {
    const auto first = param<int>(p, "first", 1);
    const auto second = param<int>(p, "second", 2);
    const auto densities = s.reference_densities();
    const double gap = types.internal_energy(second) - types.internal_energy(first);
    std::vector<double> grid;
    const double x_cap = param<double>(p, "x_cap", 10.0);
    const auto points = param<std::size_t>(p, "points", 200);
    for (std::size_t k = 0; k < points; ++k) grid.push_back(x_cap * (k + 0.5) / points);
    r.observed = admissible_pair_check(densities[static_cast<std::size_t>(first - 1)],
                                       densities[static_cast<std::size_t>(second - 1)], gap, grid);
    r.samples = grid.size();
  } else if (spec.kind == "kolmogorov") {
    const auto chain = DiscreteChain::from_matrix(
        param<std::vector<std::vector<double>>>(p, "rates", {}));
    const auto res = kolmogorov_cycle_check(chain, param<int>(p, "max_cycle_len", 6),
                                            param<std::size_t>(p, "max_cycles", 100000),
                                            spec.tolerance);
    r.observed = std::abs(res.ratio - 1.0);
    r.samples = res.cycles;
    r.passed = res.passed;
    return r;
  } else {
    throw ValidationError("unknown check kind '" + spec.kind + "'");
  }
  r.passed = r.observed <= r.tolerance;
  return r;
}

}  // namespace

Scenario apply_overrides(Scenario scenario, const CommandOptions& options) {
  if (scenario.simulation) {
    if (options.seed) scenario.simulation->seed = *options.seed;
    if (options.replicas) {
      if (*options.replicas < 1) throw ValidationError("--replicas must be >= 1");
      scenario.simulation->replicas = *options.replicas;
    }
  }
  return scenario;
}

int command_simulate(const Scenario& input, const CommandOptions& options) {
  const Scenario s = apply_overrides(input, options);
  const auto config = s.simulator_config();
  const auto runs = run_ensemble(config);
  const auto& edges = s.simulation->histogram_edges;
  const int v_count = s.network.types().count();
  json replicas = json::array();
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto dir = options.out_dir / numbered("replica_", r, 3, "");
    std::vector<std::vector<double>> hist_rows;
    json snaps = json::array();
    for (std::size_t k = 0; k < runs[r].snapshots.size(); ++k) {
      const auto& snap = runs[r].snapshots[k];
      write_text_file(dir / numbered("snapshot_", k, 4, ".csv"), particles_csv(snap.state));
      for (TypeId v = 1; v <= v_count; ++v) {
        const auto h = empirical_histogram(snap.state, v, edges);
        for (std::size_t b = 0; b < h.size(); ++b)
          hist_rows.push_back({snap.time, static_cast<double>(v), edges[b], edges[b + 1], h[b]});
      }
      snaps.push_back({{"time", snap.time}, {"events", snap.events}, {"counts", snap.counts}});
    }
    write_text_file(dir / "histogram.csv",
                    table_csv({"time", "type_id", "bin_lo", "bin_hi", "density"}, hist_rows));
    replicas.push_back({{"replica", r},
                        {"events", runs[r].events},
                        {"null_events", runs[r].null_events},
                        {"snapshots", snaps}});
  }
  json summary{{"command", "simulate"},
               {"seed", config.seed},
               {"replicas", replicas}};
  write_text_file(options.out_dir / "summary.json", summary.dump(2) + "\n");
  return kExitOk;
}

int command_solve(const Scenario& s, const CommandOptions& options) {
  const auto initial = s.solver_initial_grid();
  const auto snaps = integrate(initial, s.network, s.solver_config());
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    write_text_file(options.out_dir / numbered("grid_", k, 4, ".csv"), grid_csv(snaps[k].grid));
    rows.push_back({snaps[k].time, mass(snaps[k].grid), mean_energy(snaps[k].grid, s.network.types())});
  }
  write_text_file(options.out_dir / "summary.csv", table_csv({"time", "mass", "mean_energy"}, rows));
  json summary{{"command", "solve"},
               {"snapshots", snaps.size()},
               {"stability_dt_estimate", stability_dt_estimate(initial, s.network, s.solver->scheme)}};
  write_text_file(options.out_dir / "summary.json", summary.dump(2) + "\n");
  return kExitOk;
}

int command_analyze(const Scenario& input, const CommandOptions& options) {
  const Scenario s = apply_overrides(input, options);
  if (!s.solver && !s.simulation)
    throw ValidationError("analyze needs a 'solver' or a 'simulation' section");
  const auto f0 = s.reference_densities();
  const auto w0 = s.reference_weights();
  if (s.solver) {
    std::vector<std::vector<double>> rows;
    for (const auto& snap : integrate(s.solver_initial_grid(), s.network, s.solver_config()))
      rows.push_back({snap.time, relative_entropy(snap.grid, f0, w0)});
    write_text_file(options.out_dir / "entropy.csv", table_csv({"time", "entropy"}, rows));
  }
  if (s.simulation) {
    const auto runs = run_ensemble(s.simulator_config());
    std::vector<std::vector<double>> rows;
    for (std::size_t r = 0; r < runs.size(); ++r)
      for (const auto& snap : runs[r].snapshots)
        for (TypeId v = 1; v <= s.network.types().count(); ++v) {
          std::vector<double> xs;
          for (const auto& p : snap.state.particles)
            if (p.type == v) xs.push_back(p.kinetic_energy);
          const auto& target = f0[static_cast<std::size_t>(v - 1)];
          const double d = xs.empty() ? std::numeric_limits<double>::quiet_NaN()
                                      : ks_distance(xs, [&](double x) { return target.cdf(x); });
          rows.push_back({static_cast<double>(r), snap.time, static_cast<double>(v),
                          static_cast<double>(xs.size()), d});
        }
    write_text_file(options.out_dir / "ks.csv",
                    table_csv({"replica", "time", "type_id", "count", "ks_distance"}, rows));
  }
  return kExitOk;
}

std::vector<CheckResult> run_checks(const Scenario& input, const CommandOptions& options) {
  const Scenario s = apply_overrides(input, options);
  std::vector<CheckResult> out;
  for (const auto& spec : s.checks) out.push_back(evaluate_check(s, spec));
  return out;
}

int command_check(const Scenario& s, const CommandOptions& options) {
  const auto results = run_checks(s, options);
  write_text_file(options.out_dir / "report.json", check_report(results).dump(2) + "\n");
  for (const auto& r : results)
    if (!r.passed) return kExitChecksFailed;
  return kExitOk;
}

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    if (dynamic_cast<const IoError*>(err)) return kExitIo;
    if (dynamic_cast<const NumericalError*>(err)) return kExitNumerical;
    return kExitValidation;
  }
  return kExitInternal;
}

json error_json(const std::exception& e) {
  const auto* err = dynamic_cast<const Error*>(&e);
  return {{"error", {{"kind", err ? err->kind() : "internal"}, {"message", e.what()}}}};
}

}  // namespace enerkin
