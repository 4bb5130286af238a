#include <gtest/gtest.h>

#include <cmath>

#include "enerkin/error.hpp"
#include "enerkin/kinetics.hpp"
#include "enerkin/rng.hpp"

using namespace enerkin;

TEST(TypeTable, RejectsBadEnergies) {
  EXPECT_THROW(TypeTable(std::vector<double>{}), ValidationError);
  EXPECT_THROW(TypeTable(std::vector<double>{-1.0}), ValidationError);
  EXPECT_THROW(TypeTable(std::vector<double>{std::nan("")}), ValidationError);
  TypeTable t({0.0, 2.5}, {"A", "B"});
  EXPECT_EQ(t.count(), 2);
  EXPECT_EQ(t.internal_energy(2), 2.5);
  EXPECT_EQ(t.label(1), "A");
  EXPECT_THROW(t.internal_energy(3), ValidationError);
  EXPECT_THROW(t.internal_energy(0), ValidationError);
}

TEST(TotalEnergy, Examples) {
  TypeTable one({0.0});
  EXPECT_DOUBLE_EQ(total_energy({{{1, 0.5}, {1, 1.5}}}, one), 2.0);
  TypeTable two({0.0, 3.0});
  EXPECT_DOUBLE_EQ(total_energy({{{2, 0.0}}}, two), 3.0);
}

TEST(TotalEnergy, MatchesLeftToRightSum) {
  TypeTable types({0.0, 0.7, 2.0});
  Rng rng(42);
  ParticleSystem s;
  double oracle = 0.0;
  for (int i = 0; i < 100; ++i) {
    const TypeId v = 1 + static_cast<TypeId>(rng.below(3));
    const double t = rng.exponential(0.3);
    s.particles.push_back({v, t});
    oracle += types.internal_energies()[static_cast<std::size_t>(v - 1)] + t;
  }
  EXPECT_NEAR(total_energy(s, types), oracle, 1e-12 * oracle);
}

TEST(TotalEnergy, UnknownTypeNamesIndex) {
  TypeTable types({0.0});
  try {
    total_energy({{{1, 1.0}, {1, 1.0}, {4, 1.0}}}, types);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
}

TEST(CollisionFeasible, Examples) {
  TypeTable zero({0.0, 0.0});
  EXPECT_TRUE(collision_feasible(1, 1.0, 1, 1.0, 2, 2, zero));
  TypeTable types({0.0, 1.0});
  EXPECT_FALSE(collision_feasible(1, 0.5, 1, 0.5, 2, 2, types));
  // Equality is feasible, with nothing left for kinetic energy.
  EXPECT_TRUE(collision_feasible(1, 1.0, 1, 1.0, 2, 2, types));
  EXPECT_EQ(available_kinetic_energy(1, 1.0, 1, 1.0, 2, 2, types), 0.0);
}

TEST(CollisionFeasible, IdentityChannelAlwaysFeasible) {
  TypeTable types({0.0, 5.0, 1.0});
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const TypeId v = 1 + static_cast<TypeId>(rng.below(3));
    const TypeId w = 1 + static_cast<TypeId>(rng.below(3));
    EXPECT_TRUE(collision_feasible(v, rng.exponential(1.0), w, rng.exponential(1.0), v, w, types));
  }
}

TEST(ApplyCollision, Examples) {
  TypeTable types({0.0});
  const ParticleSystem s{{{1, 2.0}, {1, 3.0}}};
  const auto out = apply_collision(s, 0, 1, {1, 1.5, 1}, types);
  EXPECT_EQ(out.particles[0].kinetic_energy, 1.5);
  EXPECT_EQ(out.particles[1].kinetic_energy, 3.5);
  const auto full = apply_collision(s, 0, 1, {1, 5.0, 1}, types);
  EXPECT_EQ(full.particles[1].kinetic_energy, 0.0);
}

TEST(ApplyCollision, Faults) {
  TypeTable types({0.0, 10.0});
  const ParticleSystem s{{{1, 2.0}, {1, 3.0}}};
  EXPECT_THROW(apply_collision(s, 0, 1, {2, 0.0, 1}, types), InfeasibleError);
  EXPECT_THROW(apply_collision(s, 0, 1, {1, 5.5, 1}, types), InfeasibleError);
  EXPECT_THROW(apply_collision(s, 0, 1, {1, -0.1, 1}, types), InfeasibleError);
  EXPECT_THROW(apply_collision(s, 0, 0, {1, 1.0, 1}, types), ValidationError);
  EXPECT_THROW(apply_collision(s, 0, 2, {1, 1.0, 1}, types), ValidationError);
}

TEST(ApplyCollision, RandomOutcomesConserveEnergy) {
  TypeTable types({0.0, 0.4, 1.3});
  Rng rng(9);
  ParticleSystem s;
  for (int i = 0; i < 50; ++i)
    s.particles.push_back({1 + static_cast<TypeId>(rng.below(3)), rng.exponential(0.5)});
  const double e0 = total_energy(s, types);
  const auto m = s.size();
  for (int trial = 0; trial < 10000; ++trial) {
    const auto i = rng.below(m);
    auto j = rng.below(m - 1);
    if (j >= i) ++j;
    const TypeId o1 = 1 + static_cast<TypeId>(rng.below(3));
    const TypeId o2 = 1 + static_cast<TypeId>(rng.below(3));
    const auto& a = s.particles[i];
    const auto& b = s.particles[j];
    if (!collision_feasible(a.type, a.kinetic_energy, b.type, b.kinetic_energy, o1, o2, types))
      continue;
    const double avail =
        available_kinetic_energy(a.type, a.kinetic_energy, b.type, b.kinetic_energy, o1, o2, types);
    apply_collision_inplace(s, i, j, {o1, rng.uniform() * avail, o2}, types);
    EXPECT_LE(std::abs(total_energy(s, types) - e0), 1e-9 * e0);
  }
  EXPECT_EQ(s.size(), m);
}

TEST(ApplyCollision, ReverseRestoresMultiset) {
  TypeTable types({0.0, 0.5});
  const ParticleSystem s{{{1, 2.0}, {2, 0.25}, {1, 7.0}}};
  const auto fwd = apply_collision(s, 0, 1, {2, 1.0, 1}, types);
  const auto back = apply_collision(fwd, 0, 1, {1, 2.0, 2}, types);
  EXPECT_TRUE(same_multiset(s, back));
}

TEST(ApplyUnary, Examples) {
  TypeTable types({0.0, 1.0});
  const auto down = apply_unary({{{2, 0.3}}}, 0, 1, types);
  EXPECT_EQ(down.particles[0].type, 1);
  EXPECT_DOUBLE_EQ(down.particles[0].kinetic_energy, 1.3);
  EXPECT_THROW(apply_unary({{{1, 0.5}}}, 0, 2, types), InfeasibleError);
  const auto edge = apply_unary({{{1, 1.0}}}, 0, 2, types);
  EXPECT_EQ(edge.particles[0].type, 2);
  EXPECT_EQ(edge.particles[0].kinetic_energy, 0.0);
}

TEST(Renormalize, RestoresTarget) {
  TypeTable types({0.0, 1.0});
  ParticleSystem s{{{1, 2.0}, {2, 3.0}}};
  renormalize_energy(s, types, 7.0);
  EXPECT_NEAR(total_energy(s, types), 7.0, 1e-15);
}

TEST(TypeCounts, CountsPerType) {
  const ParticleSystem s{{{1, 0.0}, {3, 1.0}, {3, 2.0}}};
  EXPECT_EQ(type_counts(s, 3), (std::vector<std::size_t>{1, 0, 2}));
}
