// Runs the acceptance criteria at their stated tolerances and prints one
// PASS/FAIL line per criterion. Usage: enerkin_acceptance [criterion ...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "enerkin/analysis.hpp"
#include "enerkin/simulator.hpp"
#include "enerkin/solver.hpp"

using namespace enerkin;

namespace {

constexpr std::uint64_t kMasterSeed = 20261016;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t seed_for(int criterion, std::uint64_t k = 0) {
  return stream_seed(kMasterSeed, static_cast<std::uint64_t>(criterion) * 1000000 + k);
}

struct Verdict {
  bool passed = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

ReactionNetwork one_type_uniform(double alpha) {
  return ReactionNetwork(TypeTable({0.0}),
                         {{1, 1, RateFunction::constant(alpha), {{1, 1, 1.0, EnergySplit::uniform()}}}});
}

std::function<double(double)> cdf_of(const DensityFamily& d) {
  return [d](double x) { return d.cdf(x); };
}

// Criteria 2 and 3 share one solver run.
struct RelaxationRun {
  DensityGrid final_grid;
  std::vector<double> entropies;
  double seconds = 0.0;
};

const RelaxationRun& relaxation_run() {
  static const RelaxationRun run = [] {
    const auto e1 = DensityFamily::exponential(1.0);
    const auto start = DensityGrid::from_densities(20.0, 2000, {DensityFamily::uniform(0.0, 2.0)});
    RelaxationRun r{start, {relative_entropy(start, {e1})}, 0.0};
    SolverConfig cfg;
    cfg.scheme = Scheme::rk4;
    cfg.dt = 0.01;
    cfg.t_end = 20.0;
    cfg.snapshot_times = {20.0};
    cfg.observer = [&](double, const DensityGrid& g) { r.entropies.push_back(relative_entropy(g, {e1})); };
    const Stopwatch clock;
    r.final_grid = integrate(start, one_type_uniform(1.0), cfg).back().grid;
    r.seconds = clock.seconds();
    return r;
  }();
  return run;
}

Verdict criterion_1() {
  const Stopwatch clock;
  SimulatorConfig cfg{one_type_uniform(1.0), ParticleSystem{std::vector<Particle>(1000, Particle{1, 1.0})}, 50.0};
  cfg.snapshot_times = {30.0, 40.0, 50.0};
  cfg.seed = seed_for(1);
  const auto tr = run(cfg);
  std::vector<double> pooled;
  for (const auto& snap : tr.snapshots)
    for (const auto& p : snap.state.particles) pooled.push_back(p.kinetic_energy);
  const double d = ks_distance(pooled, cdf_of(DensityFamily::exponential(1.0)));
  const double secs = clock.seconds();
  return {d < 0.06 && secs < 30.0,
          fmt("KS=%.4f (<0.06) over %zu pooled energies, %llu events, %.1f s (<30 s)", d, pooled.size(),
              static_cast<unsigned long long>(tr.events), secs)};
}

Verdict criterion_2() {
  const auto& r = relaxation_run();
  double err = 0.0;
  for (int k = 0; k < r.final_grid.n_cells; ++k)
    err = std::max(err, std::abs(r.final_grid[1][static_cast<std::size_t>(k)] - std::exp(-r.final_grid.center(k))));
  return {err < 1e-2 && r.seconds < 60.0,
          fmt("max|f(20)-e^-x|=%.3e (<1e-2), mass=%.12f, %.1f s (<60 s)", err, mass(r.final_grid), r.seconds)};
}

Verdict criterion_3() {
  const auto& r = relaxation_run();
  const auto mono = entropy_monotonicity_check(r.entropies, 1e-6);
  const double terminal = r.entropies.back();
  return {mono.passed && std::abs(terminal) < 1e-3,
          fmt("min dH=%.3e over %zu steps (>=-1e-6), H(0)=%.4f, |H(20)|=%.3e (<1e-3)", mono.min_delta,
              r.entropies.size() - 1, r.entropies.front(), std::abs(terminal))};
}

Verdict criterion_4() {
  auto residual = [](double beta, int n, bool cell_average) {
    const double x_max = 40.0 / beta;
    DensityGrid g(x_max, n, 1);
    if (cell_average) {
      g = DensityGrid::from_densities(x_max, n, {DensityFamily::exponential(beta)});
    } else {
      for (int k = 0; k < n; ++k) g[1][static_cast<std::size_t>(k)] = beta * std::exp(-beta * g.center(k));
    }
    double r = 0.0;
    for (double x : rhs_one_type(g, 1.0)) r = std::max(r, std::abs(x));
    return r;
  };
  bool ok = true;
  std::ostringstream os;
  for (double beta : {0.5, 1.0, 2.0}) {
    const double coarse = residual(beta, 2000, false);
    const double fine = residual(beta, 4000, false);
    const double ratio = fine / coarse;
    ok = ok && fine < 1e-3 && ratio <= 0.5;
    os << fmt("beta=%.1f: r(n=4000)=%.2e r(2000)/r(4000)=%.2f [cell avg %.0e]; ", beta, fine, 1.0 / ratio,
              residual(beta, 4000, true));
  }
  os << "need r<1e-3 and ratio>=2";
  return {ok, os.str()};
}

Verdict criterion_5() {
  const auto net = one_type_uniform(1.0);
  const int trials = 10000;
  Rng start(seed_for(5, 0));
  std::vector<double> out;
  for (int k = 0; k < trials; ++k) {
    const double t1 = start.uniform();
    Simulator sim(net, ParticleSystem{{{1, t1}, {1, 1.0 - t1}}}, seed_for(5, static_cast<std::uint64_t>(k + 1)));
    if (!sim.apply(sim.sample_next_event())) return {false, "first jump fizzled"};
    out.push_back(sim.state().particles[0].kinetic_energy);
  }
  const double d = ks_distance(out, [](double u) { return std::clamp(u, 0.0, 1.0); });
  const double crit = ks_critical_5pct(out.size());
  return {d < crit, fmt("KS=%.4f (<%.4f, 5%% level) over %d trials", d, crit, trials)};
}

Verdict criterion_6() {
  const auto e1 = DensityFamily::exponential(1.0);
  SimulatorConfig cfg{one_type_uniform(1.0), SampledInitial{{{1, 50, e1}}}, kInf};
  cfg.max_events = 10000;
  cfg.replicas = 20;
  cfg.seed = seed_for(6);
  std::vector<double> pooled;
  std::uint64_t min_events = std::numeric_limits<std::uint64_t>::max();
  for (const auto& tr : run_ensemble(cfg)) {
    min_events = std::min(min_events, tr.events);
    for (const auto& p : tr.final_state.particles) pooled.push_back(p.kinetic_energy);
  }
  const double d = ks_distance(pooled, cdf_of(e1));
  return {d < 0.05 && min_events == 10000,
          fmt("KS=%.4f (<0.05) over %zu pooled energies, %llu events per replica", d, pooled.size(),
              static_cast<unsigned long long>(min_events))};
}

Verdict criterion_7() {
  const auto net = one_type_uniform(1.0);
  const auto w = make_transition_rate(net);
  const auto quads = sample_quadruples(net.types(), 1000);
  const auto pairs = sample_pairs(net.types(), 50);
  std::vector<std::pair<TypeId, double>> points;
  for (int k = 0; k < 20; ++k) points.emplace_back(1, 0.05 + 0.5 * k);
  double db = 0.0;
  double le = 0.0;
  double fp = 0.0;
  std::size_t evaluated = std::numeric_limits<std::size_t>::max();
  for (double beta : {0.5, 1.0, 2.0}) {
    const auto f0 = state_function({DensityFamily::exponential(beta)});
    const auto r = detailed_balance_residual(w, f0, net.types(), quads);
    db = std::max(db, r.max_residual);
    evaluated = std::min(evaluated, r.evaluated);
    le = std::max(le, local_equilibrium_residual(w, f0, net.types(), pairs).max_residual);
    fp = std::max(fp, fixed_point_residual(w, f0, net.types(), points).max_residual);
  }
  return {db < 1e-12 && evaluated >= 1000 && le < 1e-8 && fp < 1e-8,
          fmt("beta in {0.5,1,2}: DB=%.2e (<1e-12, %zu quadruples), LE=%.2e, FP=%.2e (<1e-8)", db, evaluated, le,
              fp)};
}

Verdict criterion_8() {
  const auto r1 = DensityFamily::gamma(2.0, 1.0);
  const auto r2 = DensityFamily::exponential(1.0);
  ReactionNetwork net(TypeTable({0.0, 0.0}),
                      {{1, 1, RateFunction::constant(1.0), {{1, 1, 1.0, EnergySplit::canonical(r1, r1)}}},
                       {1, 2, RateFunction::constant(1.0), {{1, 2, 1.0, EnergySplit::canonical(r1, r2)}}},
                       {2, 2, RateFunction::constant(1.0), {{2, 2, 1.0, EnergySplit::canonical(r2, r2)}}}});
  SimulatorConfig cfg{net, SampledInitial{{{1, 300, r1}, {2, 300, r2}}}, kInf};
  cfg.max_events = 10000;
  cfg.seed = seed_for(8);
  const auto tr = run(cfg);
  std::vector<double> x1;
  std::vector<double> x2;
  for (const auto& p : tr.final_state.particles) (p.type == 1 ? x1 : x2).push_back(p.kinetic_energy);
  const double d1 = ks_distance(x1, cdf_of(r1));
  const double d2 = ks_distance(x2, cdf_of(r2));
  return {d1 < 0.07 && d2 < 0.07 && tr.events == 10000,
          fmt("KS type 1 vs Gamma(2,1)=%.4f, type 2 vs Exp(1)=%.4f (<0.07), n=(%zu,%zu), %llu events", d1, d2,
              x1.size(), x2.size(), static_cast<unsigned long long>(tr.events))};
}

Verdict criterion_9() {
  // (a) pi_1 Y_1 a_12 = pi_2 a_21 against one-particle occupancy.
  const double a12 = 1.0;
  const double a21 = 1.0;
  const double gap = std::log(2.0);
  const auto rho = DensityFamily::exponential(1.0);
  const auto [pi1, pi2] = two_type_unary_stationary(a12, a21, rho, gap);
  ReactionNetwork net(TypeTable({0.0, gap}), {},
                      {{1, 2, UnaryRate::constant(a12)}, {2, 1, UnaryRate::constant(a21)}});
  const int chains = 4000;
  const double t_end = 40.0;
  const int snaps = 81;
  Rng start(seed_for(9, 0));
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int c = 0; c < chains; ++c) {
    const TypeId v = start.uniform() < pi1 ? 1 : 2;
    Simulator sim(net, ParticleSystem{{{v, rho.sample(start)}}}, seed_for(9, static_cast<std::uint64_t>(c + 1)));
    double time = 0.0;
    int in_one = 0;
    for (int k = 0; k < snaps; ++k) {
      const double target = t_end * k / (snaps - 1);
      for (;;) {
        const auto e = sim.sample_next_event();
        if (time + e.wait > target) {
          // Memorylessness lets the next draw restart from the snapshot time.
          time = target;
          break;
        }
        time += e.wait;
        sim.apply(e);
      }
      if (sim.state().particles[0].type == 1) ++in_one;
    }
    const double occ = static_cast<double>(in_one) / snaps;
    sum += occ;
    sum_sq += occ * occ;
  }
  const double mean = sum / chains;
  const double se = std::sqrt(std::max(0.0, sum_sq / chains - mean * mean) / (chains - 1));
  const bool a_ok = std::abs(mean - pi1) <= 3.0 * se;

  // (b) energy-dependent unary rates with shifted Gamma laws.
  const auto b2 = unary_energy_dependent_stationary({0.5, 0.5}, {{0, 1}, {1, 0}}, {1, 1}, {0, 1}, 1.0);
  const auto b3 = unary_energy_dependent_stationary({0.1, 0.6, 0.3}, {{0, 3, 1}, {0.5, 0, 0.2}, {1.0 / 3.0, 0.4, 0}},
                                                    {0.5, 1.5, 3.0}, {0.0, 0.4, 2.0}, 0.8);
  const double rb = std::max(b2.residual, b3.residual);

  // (c) vector particles: nu_1 + nu_2 = 2 nu_3 and p_1 p_2 b_f = p_3^2 b_b.
  const auto c = vector_particle_stationary({0.2, 0.5, 0.3}, {1.0, 2.0, 1.5}, {0.0, 0.3, 0.5}, 1.3,
                                            {{{1, 2}, {3, 3}, 0.9, 1.0}});
  return {a_ok && rb < 1e-10 && c.residual < 1e-10,
          fmt("(a) occupancy %.4f vs pi_1=%.4f (pi_2=%.4f), |diff|=%.4f <= 3se=%.4f; (b) rev residual %.1e "
              "(pi=%.4f,%.4f); (c) rev residual %.1e (<1e-10)",
              mean, pi1, pi2, std::abs(mean - pi1), 3.0 * se, rb, b2.pi[0], b2.pi[1], c.residual)};
}

Verdict criterion_10() {
  Rng rng(seed_for(10));
  int passed = 0;
  const int chains = 200;
  for (int t = 0; t < chains; ++t) {
    std::vector<double> p(4);
    for (auto& x : p) x = 0.1 + rng.uniform();
    std::vector<std::vector<double>> rates(4, std::vector<double>(4, 0.0));
    for (int v = 0; v < 4; ++v)
      for (int w = v + 1; w < 4; ++w) {
        const double s = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
        rates[v][w] = s / p[v];
        rates[w][v] = s / p[w];
      }
    if (kolmogorov_cycle_check(DiscreteChain::from_matrix(rates)).passed) ++passed;
  }
  // Forward 1->2->3->1 has rates (1, 1, 1), backward (2, 1, 1).
  const auto bad = kolmogorov_cycle_check(DiscreteChain::from_matrix({{0, 1, 2}, {1, 0, 1}, {1, 1, 0}}));
  const bool planted = !bad.passed && std::abs(bad.ratio - 2.0) < 1e-12 && bad.worst_cycle.size() == 3;
  return {passed == chains && planted,
          fmt("%d/%d reversible 4-state chains pass; planted 3-cycle: detected=%s ratio=%.12g (2.0)", passed,
              chains, bad.passed ? "no" : "yes", bad.ratio)};
}

Verdict criterion_11() {
  const Stopwatch clock;
  const std::vector<double> times{1.0, 5.0};
  const auto u02 = DensityFamily::uniform(0.0, 2.0);
  const auto net = one_type_uniform(1.0);
  SolverConfig scfg;
  scfg.dt = 0.01;
  scfg.t_end = 5.0;
  scfg.snapshot_times = times;
  const auto grids = integrate(DensityGrid::from_densities(20.0, 2000, {u02}), net, scfg);

  const int m = 4000;
  const int replicas = 8;
  SimulatorConfig cfg{net, SampledInitial{{{1, static_cast<std::size_t>(m), u02}}}, 5.0};
  cfg.snapshot_times = times;
  cfg.replicas = replicas;
  cfg.seed = seed_for(11);
  const auto runs = run_ensemble(cfg);

  const int bins = 20;
  const double width = 0.4;
  const double n_total = static_cast<double>(m) * replicas;
  bool ok = true;
  double worst = 0.0;
  std::string where;
  for (std::size_t s = 0; s < times.size(); ++s) {
    const auto& g = grids[s].grid;
    std::vector<double> counts(bins, 0.0);
    for (const auto& tr : runs)
      for (const auto& p : tr.snapshots[s].state.particles) {
        const auto b = static_cast<int>(std::floor(p.kinetic_energy / width));
        if (b >= 0 && b < bins) counts[static_cast<std::size_t>(b)] += 1.0;
      }
    const int per_bin = static_cast<int>(std::lround(width / g.h()));
    for (int b = 0; b < bins; ++b) {
      double prob = 0.0;
      for (int k = b * per_bin; k < (b + 1) * per_bin; ++k) prob += g[1][static_cast<std::size_t>(k)] * g.h();
      const double sigma = std::sqrt(n_total * prob * (1.0 - prob));
      const double z = std::abs(counts[static_cast<std::size_t>(b)] - n_total * prob) / sigma;
      if (!(z <= 3.0)) ok = false;
      if (z > worst) {
        worst = z;
        where = fmt("t=%g bin [%.1f,%.1f)", times[s], b * width, (b + 1) * width);
      }
    }
  }
  const double secs = clock.seconds();
  return {ok && secs < 300.0,
          fmt("worst |count-N p|/sigma=%.2f (<=3) at %s over 2x%d bins, N=%.0f, %.1f s (<300 s)", worst,
              where.c_str(), bins, n_total, secs)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, Verdict (*)()>> criteria{
      {"exponential equilibrium of the one-type chain", criterion_1},
      {"solver convergence to e^-x", criterion_2},
      {"relative entropy nondecreasing", criterion_3},
      {"exponential fixed-point residual and refinement", criterion_4},
      {"two-particle first jump is uniform", criterion_5},
      {"product-measure invariance", criterion_6},
      {"detailed balance, local equilibrium, fixed point", criterion_7},
      {"canonical-kernel invariance", criterion_8},
      {"unary stationary laws", criterion_9},
      {"Kolmogorov cycle criterion", criterion_10},
      {"simulator and solver agreement", criterion_11},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!selected.empty() && !selected.contains(id)) continue;
    Verdict out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.passed) ++failures;
    std::printf("%s criterion %2d (%s): %s\n", out.passed ? "PASS" : "FAIL", id, criteria[i].first,
                out.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
