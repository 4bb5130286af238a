#include "enerkin/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>

#include "enerkin/error.hpp"
#include "enerkin/kinetics.hpp"

namespace enerkin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

Simulator::Simulator(const ReactionNetwork& network, ParticleSystem initial, std::uint64_t seed)
    : network_(&network), state_(std::move(initial)), rng_(seed) {
  const auto& types = network.types();
  for (std::size_t i = 0; i < state_.particles.size(); ++i) {
    const auto& p = state_.particles[i];
    if (!types.contains(p.type) || !(p.kinetic_energy >= 0.0) || !std::isfinite(p.kinetic_energy)) {
      std::ostringstream os;
      os << "simulator: particle " << i << " is invalid (type " << p.type << ", T="
         << p.kinetic_energy << ")";
      throw ValidationError(os.str());
    }
  }
  type_only_ = network.binary_rates_type_only();
  has_unary_ = !network.unary_channels().empty();
  rebuild();
}

double Simulator::checked_rate(const Particle& a, const Particle& b) const {
  const double r = network_->binary_rate(a.type, a.kinetic_energy, b.type, b.kinetic_energy);
  if (!(r >= 0.0) || !std::isfinite(r)) {
    std::ostringstream os;
    os << "collision rate alpha_{" << a.type << "," << b.type << "}(" << a.kinetic_energy << ","
       << b.kinetic_energy << ") = " << r << " is negative or not finite";
    throw ValidationError(os.str());
  }
  return r;
}

void Simulator::rebuild() {
  const auto m = state_.particles.size();
  const int v = network_->types().count();
  members_.assign(static_cast<std::size_t>(v), {});
  member_pos_.assign(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    auto& list = members_[static_cast<std::size_t>(state_.particles[i].type - 1)];
    member_pos_[i] = list.size();
    list.push_back(i);
  }
  if (!type_only_) {
    row_.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = i + 1; k < m; ++k) {
        const double r = checked_rate(state_.particles[i], state_.particles[k]);
        row_[i] += r;
        row_[k] += r;
      }
    }
    row_total_ = 0.0;
    for (double r : row_) row_total_ += r;
  }
  if (has_unary_) {
    unary_rate_.assign(m, 0.0);
    fenwick_.assign(m + 1, 0.0);
    unary_total_ = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& p = state_.particles[i];
      unary_rate_[i] = network_->unary_total_rate(p.type, p.kinetic_energy);
      unary_total_ += unary_rate_[i];
    }
    // O(M) Fenwick construction.
    for (std::size_t i = 1; i <= m; ++i) {
      fenwick_[i] += unary_rate_[i - 1];
      const std::size_t parent = i + (i & (~i + 1));
      if (parent <= m) fenwick_[parent] += fenwick_[i];
    }
  }
  updates_since_rebuild_ = 0;
}

double Simulator::binary_rate_total() const {
  const auto m = state_.particles.size();
  if (m < 2) return 0.0;
  const double md = static_cast<double>(m);
  if (!type_only_) return 0.5 * row_total_ / md;
  const int v = network_->types().count();
  double s = 0.0;
  for (int a = 1; a <= v; ++a) {
    const double na = static_cast<double>(members_[static_cast<std::size_t>(a - 1)].size());
    for (int b = a; b <= v; ++b) {
      const double c = network_->type_rate(a, b);
      if (c == 0.0) continue;
      const double nb = static_cast<double>(members_[static_cast<std::size_t>(b - 1)].size());
      s += c * (a == b ? 0.5 * na * (na - 1.0) : na * nb);
    }
  }
  return s / md;
}

double Simulator::unary_rate_total() const { return has_unary_ ? std::max(0.0, unary_total_) : 0.0; }

double Simulator::total_rate() const { return binary_rate_total() + unary_rate_total(); }

std::pair<std::size_t, std::size_t> Simulator::pick_pair_type_only() {
  const int v = network_->types().count();
  double s = 0.0;
  for (int a = 1; a <= v; ++a) {
    const double na = static_cast<double>(members_[static_cast<std::size_t>(a - 1)].size());
    for (int b = a; b <= v; ++b) {
      const double nb = static_cast<double>(members_[static_cast<std::size_t>(b - 1)].size());
      s += network_->type_rate(a, b) * (a == b ? 0.5 * na * (na - 1.0) : na * nb);
    }
  }
  double target = rng_.uniform() * s;
  int ca = 0;
  int cb = 0;
  for (int a = 1; a <= v && ca == 0; ++a) {
    const double na = static_cast<double>(members_[static_cast<std::size_t>(a - 1)].size());
    for (int b = a; b <= v; ++b) {
      const double nb = static_cast<double>(members_[static_cast<std::size_t>(b - 1)].size());
      const double w = network_->type_rate(a, b) * (a == b ? 0.5 * na * (na - 1.0) : na * nb);
      if (w <= 0.0) continue;
      ca = a;
      cb = b;
      if (target < w) break;
      target -= w;
      ca = 0;
    }
  }
  if (ca == 0) {
    // Rounding fell off the end: take the last class with positive weight.
    for (int a = v; a >= 1 && ca == 0; --a) {
      const double na = static_cast<double>(members_[static_cast<std::size_t>(a - 1)].size());
      for (int b = v; b >= a; --b) {
        const double nb = static_cast<double>(members_[static_cast<std::size_t>(b - 1)].size());
        if (network_->type_rate(a, b) * (a == b ? 0.5 * na * (na - 1.0) : na * nb) > 0.0) {
          ca = a;
          cb = b;
          break;
        }
      }
    }
  }
  const auto& la = members_[static_cast<std::size_t>(ca - 1)];
  const auto& lb = members_[static_cast<std::size_t>(cb - 1)];
  if (ca != cb) return {la[rng_.below(la.size())], lb[rng_.below(lb.size())]};
  const auto k1 = rng_.below(la.size());
  auto k2 = rng_.below(la.size() - 1);
  if (k2 >= k1) ++k2;
  return {la[k1], la[k2]};
}

std::pair<std::size_t, std::size_t> Simulator::pick_pair_generic() {
  const auto m = state_.particles.size();
  double target = rng_.uniform() * row_total_;
  std::size_t i = m;
  for (std::size_t k = 0; k < m; ++k) {
    if (row_[k] <= 0.0) continue;
    i = k;
    if (target < row_[k]) break;
    target -= row_[k];
  }
  const auto& pi = state_.particles[i];
  double target2 = rng_.uniform() * row_[i];
  std::size_t j = m;
  for (std::size_t k = 0; k < m; ++k) {
    if (k == i) continue;
    const double r = checked_rate(pi, state_.particles[k]);
    if (r <= 0.0) continue;
    j = k;
    if (target2 < r) break;
    target2 -= r;
  }
  if (j == m) throw NumericalError("simulator: pair selection found no partner");
  return {i, j};
}

std::size_t Simulator::pick_unary_particle() {
  const auto m = unary_rate_.size();
  double target = rng_.uniform() * unary_total_;
  // Fenwick descent.
  std::size_t pos = 0;
  std::size_t step = 1;
  while (step * 2 <= m) step *= 2;
  for (; step > 0; step /= 2) {
    const std::size_t next = pos + step;
    if (next <= m && fenwick_[next] <= target) {
      pos = next;
      target -= fenwick_[next];
    }
  }
  std::size_t i = std::min(pos, m - 1);
  // Guard against rounding landing on a zero-rate particle.
  if (unary_rate_[i] <= 0.0) {
    std::size_t k = i;
    while (k > 0 && unary_rate_[k] <= 0.0) --k;
    if (unary_rate_[k] <= 0.0) {
      k = i;
      while (k + 1 < m && unary_rate_[k] <= 0.0) ++k;
    }
    i = k;
  }
  return i;
}

TypeId Simulator::pick_unary_target(std::size_t i) {
  const auto& p = state_.particles[i];
  const auto& types = network_->types();
  const double total = types.internal_energy(p.type) + p.kinetic_energy;
  const auto& list = network_->unary_from(p.type);
  double target = rng_.uniform() * unary_rate_[i];
  TypeId pick = 0;
  for (int u : list) {
    const auto& ch = network_->unary_channels()[static_cast<std::size_t>(u)];
    const double r = ch.rate(total, types.internal_energy(ch.to));
    if (r <= 0.0) continue;
    pick = ch.to;
    if (target < r) break;
    target -= r;
  }
  if (pick == 0) throw NumericalError("simulator: unary selection found no target");
  return pick;
}

Event Simulator::sample_next_event() {
  Event ev;
  const double binary = binary_rate_total();
  const double unary = unary_rate_total();
  const double lambda = binary + unary;
  if (!(lambda > 0.0)) return ev;
  ev.wait = rng_.exponential(lambda);
  if (rng_.uniform() * lambda < binary) {
    ev.kind = Event::Kind::collision;
    std::tie(ev.i, ev.j) = type_only_ ? pick_pair_type_only() : pick_pair_generic();
  } else {
    ev.kind = Event::Kind::unary;
    ev.i = pick_unary_particle();
    ev.target = pick_unary_target(ev.i);
  }
  return ev;
}

void Simulator::fenwick_set(std::size_t i, double value) {
  const double delta = value - unary_rate_[i];
  unary_rate_[i] = value;
  unary_total_ += delta;
  for (std::size_t k = i + 1; k < fenwick_.size(); k += k & (~k + 1)) fenwick_[k] += delta;
}

void Simulator::move_member(std::size_t i, TypeId from, TypeId to) {
  if (from == to) return;
  auto& src = members_[static_cast<std::size_t>(from - 1)];
  const auto pos = member_pos_[i];
  src[pos] = src.back();
  member_pos_[src[pos]] = pos;
  src.pop_back();
  auto& dst = members_[static_cast<std::size_t>(to - 1)];
  member_pos_[i] = dst.size();
  dst.push_back(i);
}

void Simulator::particle_changed(std::size_t i, const Particle& before) {
  const auto& now = state_.particles[i];
  move_member(i, before.type, now.type);
  if (has_unary_) fenwick_set(i, network_->unary_total_rate(now.type, now.kinetic_energy));
  if (!type_only_) {
    const auto m = state_.particles.size();
    double fresh = 0.0;
    row_total_ = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (k == i) continue;
      const auto& pk = state_.particles[k];
      const double r_new = checked_rate(now, pk);
      row_[k] += r_new - checked_rate(before, pk);
      fresh += r_new;
      row_total_ += row_[k];
    }
    row_[i] = fresh;
    row_total_ += fresh;
  }
}

void Simulator::pair_changed(std::size_t i, const Particle& before_i, std::size_t j,
                             const Particle& before_j) {
  const auto& ni = state_.particles[i];
  const auto& nj = state_.particles[j];
  move_member(i, before_i.type, ni.type);
  move_member(j, before_j.type, nj.type);
  if (has_unary_) {
    fenwick_set(i, network_->unary_total_rate(ni.type, ni.kinetic_energy));
    fenwick_set(j, network_->unary_total_rate(nj.type, nj.kinetic_energy));
  }
  if (!type_only_) {
    const auto m = state_.particles.size();
    double fresh_i = 0.0;
    double fresh_j = 0.0;
    row_total_ = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (k == i || k == j) continue;
      const auto& pk = state_.particles[k];
      const double ri = checked_rate(ni, pk);
      const double rj = checked_rate(nj, pk);
      row_[k] += ri + rj - checked_rate(before_i, pk) - checked_rate(before_j, pk);
      fresh_i += ri;
      fresh_j += rj;
      row_total_ += row_[k];
    }
    const double rij = checked_rate(ni, nj);
    row_[i] = fresh_i + rij;
    row_[j] = fresh_j + rij;
    row_total_ += row_[i] + row_[j];
  }
}

bool Simulator::apply(const Event& event) {
  if (event.kind == Event::Kind::none) {
    state_.time = kInf;
    return false;
  }
  state_.time += event.wait;
  ++events_;
  bool changed = true;
  try {
    if (event.kind == Event::Kind::collision) {
      const Particle bi = state_.particles[event.i];
      const Particle bj = state_.particles[event.j];
      const auto outcome =
          network_->sample_collision(bi.type, bi.kinetic_energy, bj.type, bj.kinetic_energy, rng_);
      if (!outcome) {
        ++null_events_;
        changed = false;
      } else {
        apply_collision_inplace(state_, event.i, event.j, *outcome, network_->types());
        pair_changed(event.i, bi, event.j, bj);
      }
    } else {
      const Particle bi = state_.particles[event.i];
      apply_unary_inplace(state_, event.i, event.target, network_->types());
      particle_changed(event.i, bi);
    }
  } catch (const Error& e) {
    std::ostringstream os;
    os << e.what() << " [event " << events_ << " at t=" << state_.time << ", particles "
       << event.i;
    if (event.kind == Event::Kind::collision) os << "," << event.j;
    os << "]";
    if (dynamic_cast<const InfeasibleError*>(&e)) throw InfeasibleError(os.str());
    if (dynamic_cast<const ValidationError*>(&e)) throw ValidationError(os.str());
    throw NumericalError(os.str());
  }
  // Incremental sums drift; rebuild them every few M updates.
  if (changed && (!type_only_ || has_unary_) &&
      ++updates_since_rebuild_ >= 4 * std::max<std::size_t>(state_.particles.size(), 64)) {
    rebuild();
  }
  return changed;
}

void Simulator::renormalize_energy(double target_total) {
  enerkin::renormalize_energy(state_, network_->types(), target_total);
  rebuild();
}

ParticleSystem make_initial_state(const InitialCondition& initial, const TypeTable& types,
                                  Rng& rng) {
  if (const auto* explicit_state = std::get_if<ParticleSystem>(&initial)) {
    ParticleSystem s = *explicit_state;
    s.time = 0.0;
    return s;
  }
  ParticleSystem s;
  for (const auto& g : std::get<SampledInitial>(initial).groups) {
    if (!types.contains(g.type))
      throw ValidationError("initial condition: unknown type id " + std::to_string(g.type));
    for (std::size_t k = 0; k < g.count; ++k)
      s.particles.push_back(Particle{g.type, g.density.sample(rng)});
  }
  return s;
}

namespace {

Snapshot take_snapshot(double time, const Simulator& sim, int type_count) {
  Snapshot snap;
  snap.time = time;
  snap.events = sim.events();
  snap.state = sim.state();
  snap.state.time = time;
  snap.counts = type_counts(snap.state, type_count);
  return snap;
}

std::vector<double> effective_snapshot_times(const SimulatorConfig& config) {
  if (!config.snapshot_times.empty()) return config.snapshot_times;
  std::vector<double> t{0.0};
  if (std::isfinite(config.t_end) && config.t_end > 0.0) t.push_back(config.t_end);
  return t;
}

}  // namespace

void validate_config(const SimulatorConfig& config) {
  if (!(config.t_end >= 0.0)) throw ValidationError("simulation: t_end must be >= 0");
  if (!std::isfinite(config.t_end) && !config.max_events)
    throw ValidationError("simulation: an infinite t_end requires max_events");
  if (config.replicas < 1) throw ValidationError("simulation: replicas must be >= 1");
  double prev = -kInf;
  for (double t : config.snapshot_times) {
    if (!(t >= 0.0) || t > config.t_end)
      throw ValidationError("simulation: snapshot_times must lie in [0, t_end]");
    if (t < prev) throw ValidationError("simulation: snapshot_times must be sorted");
    prev = t;
  }
}

namespace {

Trajectory run_stream(const SimulatorConfig& config, std::uint64_t stream) {
  Rng init_rng(stream_seed(config.seed, stream) ^ 0x5eedULL);
  const auto& types = config.network.types();
  Simulator sim(config.network, make_initial_state(config.initial, types, init_rng),
                stream_seed(config.seed, stream));
  const auto times = effective_snapshot_times(config);
  const double initial_energy =
      config.renormalize_every > 0 ? total_energy(sim.state(), types) : 0.0;
  Trajectory traj;
  std::size_t next = 0;
  bool capped = false;
  while (true) {
    if (config.max_events && sim.events() >= *config.max_events) {
      capped = true;
      break;
    }
    const Event ev = sim.sample_next_event();
    const double t_next = sim.state().time + ev.wait;
    while (next < times.size() && times[next] < t_next) {
      traj.snapshots.push_back(take_snapshot(times[next], sim, types.count()));
      ++next;
    }
    if (ev.kind == Event::Kind::none || t_next > config.t_end) break;
    if (!sim.apply(ev)) ++traj.null_events;
    if (config.renormalize_every > 0 && sim.events() % config.renormalize_every == 0)
      sim.renormalize_energy(initial_energy);
  }
  traj.events = sim.events();
  traj.final_state = sim.state();
  if (!capped) traj.final_state.time = config.t_end;
  return traj;
}

}  // namespace

Trajectory run(const SimulatorConfig& config) {
  validate_config(config);
  return run_stream(config, 0);
}

unsigned worker_threads() {
  if (const char* env = std::getenv("ENERKIN_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

std::vector<Trajectory> run_ensemble(const SimulatorConfig& config) {
  validate_config(config);
  const auto replicas = static_cast<std::size_t>(config.replicas);
  std::vector<Trajectory> out(replicas);
  std::vector<std::exception_ptr> errors(replicas);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < replicas; k = next++) {
      try {
        out[k] = run_stream(config, k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const auto threads = std::min<std::size_t>(worker_threads(), replicas);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<double> empirical_histogram(const ParticleSystem& state, TypeId type,
                                        const std::vector<double>& bin_edges) {
  if (bin_edges.size() < 2) throw ValidationError("histogram: at least one bin required");
  for (std::size_t k = 1; k < bin_edges.size(); ++k)
    if (!(bin_edges[k] > bin_edges[k - 1]))
      throw ValidationError("histogram: bin edges must be strictly increasing");
  const std::size_t bins = bin_edges.size() - 1;
  std::vector<double> counts(bins, 0.0);
  const double m = static_cast<double>(state.particles.size());
  if (m == 0.0) return counts;
  for (const auto& p : state.particles) {
    if (p.type != type) continue;
    const double x = p.kinetic_energy;
    if (x < bin_edges.front() || x > bin_edges.back()) continue;
    auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), x);
    auto k = static_cast<std::size_t>(std::distance(bin_edges.begin(), it)) - 1;
    if (k >= bins) k = bins - 1;
    counts[k] += 1.0;
  }
  for (std::size_t k = 0; k < bins; ++k) counts[k] /= m * (bin_edges[k + 1] - bin_edges[k]);
  return counts;
}

double sample_uniform_kernel(double t, double t2, Rng& rng) {
  if (!(t >= 0.0) || !(t2 >= 0.0)) throw ValidationError("uniform kernel: energies must be >= 0");
  return EnergySplit::uniform().sample(t + t2, rng);
}

std::pair<double, double> sample_canonical_kernel(const DensityFamily& first,
                                                  const DensityFamily& second, double total,
                                                  Rng& rng) {
  if (!(total > 0.0)) throw ValidationError("canonical kernel: total energy must be > 0");
  const auto split = EnergySplit::canonical(first, second);
  const double x = split.sample(total, rng);
  return {x, total - x};
}

}  // namespace enerkin
