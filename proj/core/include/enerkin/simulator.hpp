#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "enerkin/density.hpp"
#include "enerkin/network.hpp"
#include "enerkin/rng.hpp"
#include "enerkin/types.hpp"

namespace enerkin {

/// `count` particles of `type` with i.i.d. kinetic energies from `density`.
struct SampledGroup {
  TypeId type = 1;
  std::size_t count = 0;
  DensityFamily density = DensityFamily::exponential(1.0);
};

struct SampledInitial {
  std::vector<SampledGroup> groups;
};

using InitialCondition = std::variant<ParticleSystem, SampledInitial>;

struct SimulatorConfig {
  ReactionNetwork network;
  InitialCondition initial;
  double t_end = 0.0;
  /// Sorted, within [0, t_end]. Empty means {0, t_end}.
  std::vector<double> snapshot_times;
  std::uint64_t seed = 1;
  int replicas = 1;
  /// Optional cap on the number of events; the run stops at whichever of
  /// t_end or max_events comes first.
  std::optional<std::uint64_t> max_events;
  /// Rescale kinetic energies to the initial total every this many events (0 = off).
  std::uint64_t renormalize_every = 0;
};

struct Snapshot {
  double time = 0.0;
  std::uint64_t events = 0;
  std::vector<std::size_t> counts;  // n_v for v = 1..V
  ParticleSystem state;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  ParticleSystem final_state;
  std::uint64_t events = 0;
  /// Collisions drawn whose products were all infeasible.
  std::uint64_t null_events = 0;
};

struct Event {
  enum class Kind { none, collision, unary };
  double wait = std::numeric_limits<double>::infinity();
  Kind kind = Kind::none;
  std::size_t i = 0;
  std::size_t j = 0;
  TypeId target = 0;  // unary target type
};

/// Exact continuous-time simulation of the finite particle chain.
///
/// Each unordered pair {i, j} collides at rate alpha(T_i, T_j) / M; each
/// particle of type v turns into w at rate a_vw(I(v) + T). Events are drawn
/// by the direct method. With type-only collision rates, pair selection is
/// O(1) through per-type member lists; otherwise per-particle rate row sums
/// are kept and updated in O(M) per event.
class Simulator {
 public:
  Simulator(const ReactionNetwork& network, ParticleSystem initial, std::uint64_t seed);

  /// Total event rate Lambda of the current state.
  double total_rate() const;
  double binary_rate_total() const;  // (1/M) sum_{i<j} alpha
  double unary_rate_total() const;

  /// Draw the waiting time and the next event without changing the state.
  Event sample_next_event();
  /// Advance time by `event.wait` and apply the event. Returns false when the
  /// collision fizzled (no feasible products).
  bool apply(const Event& event);

  const ParticleSystem& state() const noexcept { return state_; }
  std::uint64_t events() const noexcept { return events_; }
  std::uint64_t null_events() const noexcept { return null_events_; }
  Rng& rng() noexcept { return rng_; }
  void renormalize_energy(double target_total);

 private:
  void rebuild();
  void particle_changed(std::size_t i, const Particle& before);
  void pair_changed(std::size_t i, const Particle& before_i, std::size_t j,
                    const Particle& before_j);
  double checked_rate(const Particle& a, const Particle& b) const;
  std::pair<std::size_t, std::size_t> pick_pair_type_only();
  std::pair<std::size_t, std::size_t> pick_pair_generic();
  std::size_t pick_unary_particle();
  TypeId pick_unary_target(std::size_t i);
  void fenwick_set(std::size_t i, double value);
  void move_member(std::size_t i, TypeId from, TypeId to);

  const ReactionNetwork* network_;
  ParticleSystem state_;
  Rng rng_;
  std::uint64_t events_ = 0;
  std::uint64_t null_events_ = 0;
  std::uint64_t updates_since_rebuild_ = 0;

  bool type_only_ = true;
  std::vector<std::vector<std::size_t>> members_;  // per type
  std::vector<std::size_t> member_pos_;
  std::vector<double> row_;  // generic mode: sum_{k != i} alpha(i, k)
  double row_total_ = 0.0;   // generic mode: sum_i row_i = 2 sum_{i<j} alpha

  bool has_unary_ = false;
  std::vector<double> unary_rate_;
  std::vector<double> fenwick_;
  double unary_total_ = 0.0;
};

/// Throws ValidationError for a bad time window, snapshot list or replica count.
void validate_config(const SimulatorConfig& config);

/// Run one trajectory (uses RNG stream 0 of `config.seed`).
Trajectory run(const SimulatorConfig& config);

/// Run `config.replicas` independent trajectories; replica k uses RNG stream k.
/// Output order is the replica index whatever the thread schedule.
std::vector<Trajectory> run_ensemble(const SimulatorConfig& config);

/// Build the initial state of a replica from its RNG.
ParticleSystem make_initial_state(const InitialCondition& initial, const TypeTable& types,
                                  Rng& rng);

/// Per-bin density of type `type`: count / (M * width). Particles outside the
/// edges are not counted; the last bin is closed on the right.
std::vector<double> empirical_histogram(const ParticleSystem& state, TypeId type,
                                        const std::vector<double>& bin_edges);

/// U ~ Uniform[0, T + T'].
double sample_uniform_kernel(double t, double t2, Rng& rng);

/// (x, total - x) with x drawn from the canonical law of (first, second)
/// conditioned on their sum. Throws InfeasibleError when the conditioning
/// event has no mass.
std::pair<double, double> sample_canonical_kernel(const DensityFamily& first,
                                                  const DensityFamily& second, double total,
                                                  Rng& rng);

/// Worker threads for ensembles: ENERKIN_THREADS if set (>= 1), else the
/// hardware concurrency.
unsigned worker_threads();

}  // namespace enerkin
