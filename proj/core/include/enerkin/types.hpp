#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace enerkin {

/// Molecule type id, 1-based (1..V) everywhere including serialization.
using TypeId = int;

/// The V molecule types and their internal (chemical) energies.
class TypeTable {
 public:
  TypeTable() = default;
  explicit TypeTable(std::vector<double> internal_energy,
                     std::vector<std::string> labels = {});

  int count() const noexcept { return static_cast<int>(internal_energy_.size()); }
  bool contains(TypeId v) const noexcept { return v >= 1 && v <= count(); }

  /// I(v). Throws ValidationError for an unknown id.
  double internal_energy(TypeId v) const;
  const std::string& label(TypeId v) const;

  const std::vector<double>& internal_energies() const noexcept { return internal_energy_; }

  friend bool operator==(const TypeTable&, const TypeTable&) = default;

 private:
  std::vector<double> internal_energy_;
  std::vector<std::string> labels_;
};

struct Particle {
  TypeId type = 1;
  double kinetic_energy = 0.0;

  friend bool operator==(const Particle&, const Particle&) = default;
};

/// State of the finite chain: an unordered multiset of particles plus the
/// current macrotime. Indices are an implementation detail.
struct ParticleSystem {
  std::vector<Particle> particles;
  double time = 0.0;

  std::size_t size() const noexcept { return particles.size(); }
};

/// Multiset equality (ignores order and time).
bool same_multiset(const ParticleSystem& a, const ParticleSystem& b);

/// Per-type counts n_v, indexed 0..V-1 for type v = index + 1.
std::vector<std::size_t> type_counts(const ParticleSystem& system, int type_count);

}  // namespace enerkin
