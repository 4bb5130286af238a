#pragma once

#include <cstddef>

#include "enerkin/types.hpp"

namespace enerkin {

/// Σ_i [I(v_i) + T_i]. Throws ValidationError naming the first particle
/// with an unknown type id.
double total_energy(const ParticleSystem& system, const TypeTable& types);

/// Energy left for the products' kinetic energies:
///   I(v) + T + I(v') + T' - I(v1) - I(v1').
double available_kinetic_energy(TypeId v, double t, TypeId v2, double t2, TypeId out1,
                                TypeId out2, const TypeTable& types);

/// A binary reaction (v,T),(v',T') -> (v1,.),(v1',.) is possible iff the
/// available kinetic energy is nonnegative. Equality counts as feasible.
bool collision_feasible(TypeId v, double t, TypeId v2, double t2, TypeId out1, TypeId out2,
                        const TypeTable& types);

/// Outcome of a binary collision: particle i becomes (first_type, energy),
/// particle j becomes (second_type, available - energy).
struct CollisionOutcome {
  TypeId first_type = 1;
  double energy = 0.0;
  TypeId second_type = 1;
};

/// Replace particles i and j by the outcome. Throws InfeasibleError when the
/// product types are not reachable or `energy` is outside [0, available].
ParticleSystem apply_collision(ParticleSystem system, std::size_t i, std::size_t j,
                               const CollisionOutcome& outcome, const TypeTable& types);

/// In-place variant used by the simulator hot loop.
void apply_collision_inplace(ParticleSystem& system, std::size_t i, std::size_t j,
                             const CollisionOutcome& outcome, const TypeTable& types);

/// Whether particle (v, t) may turn into type w: t + I(v) - I(w) >= 0.
bool unary_feasible(TypeId v, double t, TypeId w, const TypeTable& types);

/// Particle i of type v becomes (w, T + I(v) - I(w)). Throws InfeasibleError
/// when the result would be negative.
ParticleSystem apply_unary(ParticleSystem system, std::size_t i, TypeId w,
                           const TypeTable& types);

void apply_unary_inplace(ParticleSystem& system, std::size_t i, TypeId w,
                         const TypeTable& types);

}  // namespace enerkin

namespace enerkin {

/// Scale kinetic energies so that total_energy equals `target_total`,
/// spreading floating-point drift proportionally. No-op when the system
/// carries no kinetic energy. Off by default in the simulator.
void renormalize_energy(ParticleSystem& system, const TypeTable& types, double target_total);

}  // namespace enerkin
