#include "enerkin/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "enerkin/error.hpp"

namespace enerkin {

TypeTable::TypeTable(std::vector<double> internal_energy, std::vector<std::string> labels)
    : internal_energy_(std::move(internal_energy)), labels_(std::move(labels)) {
  if (internal_energy_.empty()) throw ValidationError("type table: at least one type required");
  for (std::size_t k = 0; k < internal_energy_.size(); ++k) {
    const double e = internal_energy_[k];
    if (!std::isfinite(e) || e < 0.0) {
      std::ostringstream os;
      os << "type table: internal_energy of type " << k + 1 << " must be finite and >= 0, got "
         << e;
      throw ValidationError(os.str());
    }
  }
  if (!labels_.empty() && labels_.size() != internal_energy_.size())
    throw ValidationError("type table: label count does not match type count");
  labels_.resize(internal_energy_.size());
}

double TypeTable::internal_energy(TypeId v) const {
  if (!contains(v)) throw ValidationError("unknown type id " + std::to_string(v));
  return internal_energy_[static_cast<std::size_t>(v - 1)];
}

const std::string& TypeTable::label(TypeId v) const {
  if (!contains(v)) throw ValidationError("unknown type id " + std::to_string(v));
  return labels_[static_cast<std::size_t>(v - 1)];
}

bool same_multiset(const ParticleSystem& a, const ParticleSystem& b) {
  if (a.size() != b.size()) return false;
  auto key = [](const Particle& p, const Particle& q) {
    return p.type != q.type ? p.type < q.type : p.kinetic_energy < q.kinetic_energy;
  };
  auto x = a.particles;
  auto y = b.particles;
  std::sort(x.begin(), x.end(), key);
  std::sort(y.begin(), y.end(), key);
  return x == y;
}

std::vector<std::size_t> type_counts(const ParticleSystem& system, int type_count) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(type_count), 0);
  for (const auto& p : system.particles) {
    if (p.type < 1 || p.type > type_count)
      throw ValidationError("unknown type id " + std::to_string(p.type));
    ++counts[static_cast<std::size_t>(p.type - 1)];
  }
  return counts;
}

double total_energy(const ParticleSystem& system, const TypeTable& types) {
  double sum = 0.0;
  for (std::size_t i = 0; i < system.particles.size(); ++i) {
    const auto& p = system.particles[i];
    if (!types.contains(p.type)) {
      std::ostringstream os;
      os << "total_energy: particle " << i << " has unknown type id " << p.type;
      throw ValidationError(os.str());
    }
    sum += types.internal_energy(p.type) + p.kinetic_energy;
  }
  return sum;
}

double available_kinetic_energy(TypeId v, double t, TypeId v2, double t2, TypeId out1,
                                TypeId out2, const TypeTable& types) {
  const double in = types.internal_energy(v) + t + types.internal_energy(v2) + t2;
  return in - (types.internal_energy(out1) + types.internal_energy(out2));
}

bool collision_feasible(TypeId v, double t, TypeId v2, double t2, TypeId out1, TypeId out2,
                        const TypeTable& types) {
  // Identity channel: nothing is converted, so it is always possible.
  if ((out1 == v && out2 == v2) || (out1 == v2 && out2 == v)) return true;
  return available_kinetic_energy(v, t, v2, t2, out1, out2, types) >= 0.0;
}

void apply_collision_inplace(ParticleSystem& system, std::size_t i, std::size_t j,
                             const CollisionOutcome& outcome, const TypeTable& types) {
  const auto m = system.particles.size();
  if (i >= m || j >= m || i == j) throw ValidationError("apply_collision: invalid pair indices");
  auto& a = system.particles[i];
  auto& b = system.particles[j];
  if (!collision_feasible(a.type, a.kinetic_energy, b.type, b.kinetic_energy, outcome.first_type,
                          outcome.second_type, types)) {
    std::ostringstream os;
    os << "apply_collision: products (" << outcome.first_type << "," << outcome.second_type
       << ") not reachable from particles " << i << "," << j;
    throw InfeasibleError(os.str());
  }
  const double available =
      std::max(0.0, available_kinetic_energy(a.type, a.kinetic_energy, b.type, b.kinetic_energy,
                                             outcome.first_type, outcome.second_type, types));
  if (!(outcome.energy >= 0.0 && outcome.energy <= available)) {
    std::ostringstream os;
    os << "apply_collision: energy " << outcome.energy << " outside [0, " << available << "]";
    throw InfeasibleError(os.str());
  }
  a = Particle{outcome.first_type, outcome.energy};
  b = Particle{outcome.second_type, available - outcome.energy};
}

ParticleSystem apply_collision(ParticleSystem system, std::size_t i, std::size_t j,
                               const CollisionOutcome& outcome, const TypeTable& types) {
  apply_collision_inplace(system, i, j, outcome, types);
  return system;
}

bool unary_feasible(TypeId v, double t, TypeId w, const TypeTable& types) {
  return t + types.internal_energy(v) - types.internal_energy(w) >= 0.0;
}

void apply_unary_inplace(ParticleSystem& system, std::size_t i, TypeId w,
                         const TypeTable& types) {
  if (i >= system.particles.size()) throw ValidationError("apply_unary: invalid index");
  auto& p = system.particles[i];
  const double t = p.kinetic_energy + types.internal_energy(p.type) - types.internal_energy(w);
  if (!(t >= 0.0)) {
    std::ostringstream os;
    os << "apply_unary: particle " << i << " (type " << p.type << ", T=" << p.kinetic_energy
       << ") cannot become type " << w;
    throw InfeasibleError(os.str());
  }
  p = Particle{w, t};
}

ParticleSystem apply_unary(ParticleSystem system, std::size_t i, TypeId w,
                           const TypeTable& types) {
  apply_unary_inplace(system, i, w, types);
  return system;
}

void renormalize_energy(ParticleSystem& system, const TypeTable& types, double target_total) {
  double internal = 0.0;
  double kinetic = 0.0;
  for (const auto& p : system.particles) {
    internal += types.internal_energy(p.type);
    kinetic += p.kinetic_energy;
  }
  if (kinetic <= 0.0) return;
  const double scale = (target_total - internal) / kinetic;
  if (!(scale > 0.0)) throw NumericalError("renormalize_energy: target below internal energy");
  for (auto& p : system.particles) p.kinetic_energy *= scale;
}

}  // namespace enerkin
