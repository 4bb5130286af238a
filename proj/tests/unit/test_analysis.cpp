#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "enerkin/analysis.hpp"
#include "enerkin/error.hpp"

using namespace enerkin;

namespace {

ReactionNetwork one_type(double alpha) {
  return ReactionNetwork(TypeTable({0.0}),
                         {{1, 1, RateFunction::constant(alpha), {{1, 1, 1.0, EnergySplit::uniform()}}}});
}

ReactionNetwork canonical_two_type() {
  const auto r1 = DensityFamily::gamma(2.0, 1.0);
  const auto r2 = DensityFamily::exponential(1.0);
  return ReactionNetwork(
      TypeTable({0.0, 0.0}),
      {{1, 1, RateFunction::constant(1.0), {{1, 1, 1.0, EnergySplit::canonical(r1, r1)}}},
       {1, 2, RateFunction::constant(2.0), {{1, 2, 1.0, EnergySplit::canonical(r1, r2)}}},
       {2, 2, RateFunction::constant(0.5), {{2, 2, 1.0, EnergySplit::canonical(r2, r2)}}}});
}

StateFunction perturbed_exponential() {
  // e^{-x} (1 + 0.1 sin x) has mass 1.05.
  return [](TypeId, double x) { return std::exp(-x) * (1.0 + 0.1 * std::sin(x)) / 1.05; };
}

std::vector<std::pair<TypeId, double>> points(const std::vector<double>& xs, TypeId v = 1) {
  std::vector<std::pair<TypeId, double>> out;
  for (double x : xs) out.emplace_back(v, x);
  return out;
}

}  // namespace

// ------------------------------------------------------------------ entropy

TEST(RelativeEntropy, Examples) {
  const auto e1 = DensityFamily::exponential(1.0);
  const auto e2 = DensityFamily::exponential(2.0);
  EXPECT_EQ(relative_entropy({e1}, {e1}, 40.0, 4000), 0.0);
  EXPECT_NEAR(relative_entropy({e2}, {e1}, 40.0, 40000), -std::log(2.0) + 0.5, 1e-6);
  EXPECT_THROW(relative_entropy({e1}, {DensityFamily::uniform(0.0, 1.0)}, 4.0, 100), ValidationError);
  // f = 0 where f0 = 0 contributes nothing.
  EXPECT_NO_THROW(relative_entropy({DensityFamily::uniform(0.0, 1.0)}, {DensityFamily::uniform(0.0, 2.0)}, 4.0, 100));
}

TEST(RelativeEntropy, NonPositiveForRandomTabulated) {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    DensityGrid f(5.0, 40, 2);
    DensityGrid f0(5.0, 40, 2);
    double mf = 0.0;
    double m0 = 0.0;
    for (TypeId v = 1; v <= 2; ++v)
      for (int k = 0; k < 40; ++k) {
        f[v][k] = rng.uniform() * (rng.uniform() < 0.2 ? 0.0 : 1.0);
        f0[v][k] = 0.05 + rng.uniform();
        mf += f[v][k] * f.h();
        m0 += f0[v][k] * f0.h();
      }
    for (auto* g : {&f, &f0})
      for (auto& row : g->values)
        for (auto& x : row) x /= (g == &f ? mf : m0);
    EXPECT_LT(relative_entropy(f, f0), 0.0);
    EXPECT_NEAR(relative_entropy(f0, f0), 0.0, 1e-15);
  }
}

TEST(EntropyMonotonicity, Examples) {
  const auto net = one_type(1.0);
  const auto e1 = DensityFamily::exponential(1.0);
  SolverConfig cfg;
  cfg.dt = 0.05;
  cfg.t_end = 3.0;
  cfg.snapshot_times = {0.0, 1.0, 2.0, 3.0};
  const auto start = DensityGrid::from_densities(20.0, 400, {e1});
  const auto flat = entropy_monotonicity_check(integrate(start, net, cfg), {e1});
  EXPECT_TRUE(flat.passed);
  EXPECT_LT(std::abs(flat.entropies.back() - flat.entropies.front()), 1e-6);

  cfg.t_end = 20.0;
  cfg.snapshot_times = {};
  for (int k = 0; k <= 40; ++k) cfg.snapshot_times.push_back(0.5 * k);
  const auto traj = integrate(DensityGrid::from_densities(20.0, 400, {DensityFamily::uniform(0.0, 2.0)}), net, cfg);
  const auto rising = entropy_monotonicity_check(traj, {e1});
  EXPECT_TRUE(rising.passed) << rising.min_delta;
  EXPECT_LT(rising.entropies.front(), -0.1);
  EXPECT_NEAR(rising.entropies.back(), 0.0, 1e-3);
  for (std::size_t k = 1; k < 10; ++k) EXPECT_GT(rising.entropies[k], rising.entropies[k - 1]);

  auto reversed = rising.entropies;
  std::reverse(reversed.begin(), reversed.end());
  const auto back = entropy_monotonicity_check(reversed);
  EXPECT_FALSE(back.passed);
  EXPECT_LT(back.min_delta, -1e-6);
}

// ------------------------------------------------------------------ balance

TEST(DetailedBalance, ExponentialOneType) {
  const auto net = one_type(1.0);
  const auto w = make_transition_rate(net);
  const auto quads = sample_quadruples(net.types(), 1000);
  for (double beta : {0.5, 1.0, 2.0}) {
    const auto r = detailed_balance_residual(w, state_function({DensityFamily::exponential(beta)}),
                                             net.types(), quads);
    EXPECT_LT(r.max_residual, 1e-12);
    EXPECT_GE(r.evaluated, 1000u);
  }
}

TEST(DetailedBalance, PerturbedFails) {
  const auto net = one_type(1.0);
  const auto r = detailed_balance_residual(make_transition_rate(net), perturbed_exponential(), net.types(),
                                           sample_quadruples(net.types(), 200));
  EXPECT_GT(r.max_residual, 1e-3);
}

TEST(DetailedBalance, ZeroRateAndSkippedQuadruples) {
  const auto net = one_type(0.0);
  const auto r = detailed_balance_residual(make_transition_rate(net), perturbed_exponential(), net.types(),
                                           sample_quadruples(net.types(), 100));
  EXPECT_EQ(r.max_residual, 0.0);
  const Quadruple broken{1, 1.0, 1, 1.0, 1, 0.5, 1, 0.5};
  const auto s = detailed_balance_residual(make_transition_rate(one_type(1.0)), perturbed_exponential(),
                                           net.types(), {broken});
  EXPECT_EQ(s.skipped, 1u);
  EXPECT_EQ(s.evaluated, 0u);
}

TEST(LocalEquilibrium, ExponentialPassesAndOthersFail) {
  const auto net = one_type(1.0);
  const auto w = make_transition_rate(net);
  const auto pairs = sample_pairs(net.types(), 40);
  EXPECT_LT(local_equilibrium_residual(w, state_function({DensityFamily::exponential(1.0)}), net.types(), pairs)
                .max_residual,
            1e-8);
  EXPECT_GT(local_equilibrium_residual(w, state_function({DensityFamily::gamma(2.0, 2.0)}), net.types(), pairs)
                .max_residual,
            1e-3);
  EXPECT_GT(local_equilibrium_residual(w, perturbed_exponential(), net.types(), pairs).max_residual, 1e-3);
}

TEST(FixedPoint, ExponentialPassesAndOthersFail) {
  const auto net = one_type(1.0);
  const auto w = make_transition_rate(net);
  const auto xs = points({0.0, 0.3, 1.0, 2.5});
  EXPECT_LT(fixed_point_residual(w, state_function({DensityFamily::exponential(1.0)}), net.types(), xs)
                .max_residual,
            1e-8);
  EXPECT_GT(fixed_point_residual(w, state_function({DensityFamily::gamma(2.0, 2.0)}), net.types(), xs)
                .max_residual,
            1e-3);
}

TEST(BalanceChain, CanonicalTwoTypeDbLeFp) {
  const auto net = canonical_two_type();
  const auto w = make_transition_rate(net);
  const auto f0 = state_function({DensityFamily::gamma(2.0, 1.0), DensityFamily::exponential(1.0)}, {0.4, 0.6});
  const auto db = detailed_balance_residual(w, f0, net.types(), sample_quadruples(net.types(), 300));
  EXPECT_LT(db.max_residual, 1e-12);
  const auto le = local_equilibrium_residual(w, f0, net.types(), sample_pairs(net.types(), 10));
  EXPECT_LT(le.max_residual, 1e-8);
  const auto fp = fixed_point_residual(w, f0, net.types(), {{1, 0.7}, {2, 1.4}});
  EXPECT_LT(fp.max_residual, 1e-8);
}

TEST(AdditiveConservation, Examples) {
  const auto net = one_type(1.0);
  const auto quads = sample_quadruples(net.types(), 500);
  const auto f = state_function({DensityFamily::exponential(2.0)});
  const auto f0 = state_function({DensityFamily::exponential(1.0)});
  EXPECT_LT(additive_conservation_residual(f, f0, quads).max_residual, 1e-12);
  EXPECT_EQ(additive_conservation_residual(f0, f0, quads).max_residual, 0.0);
  const auto g = state_function({DensityFamily::gamma(2.0, 1.0)});
  std::vector<Quadruple> interior;
  for (const auto& q : quads)
    if (q.x > 0 && q.x1 > 0 && q.xp > 0 && q.x1p > 0) interior.push_back(q);
  EXPECT_GT(additive_conservation_residual(g, f0, interior).max_residual, 0.1);
  EXPECT_THROW(additive_conservation_residual(g, f0, {{1, 0.0, 1, 1.0, 1, 0.5, 1, 0.5}}), ValidationError);
}

// ------------------------------------------------------------------ kernels

TEST(CanonicalKernelDensity, Examples) {
  const auto e = DensityFamily::exponential(1.7);
  for (double x : {0.0, 0.4, 2.0}) EXPECT_NEAR(canonical_kernel_density(e, e, 2.0, x), 0.5, 1e-12);
  EXPECT_NEAR(canonical_kernel_density(DensityFamily::gamma(2.0, 1.0), DensityFamily::gamma(1.0, 1.0), 1.0, 0.5),
              1.0, 1e-10);
  EXPECT_EQ(canonical_kernel_density(e, e, 2.0, 2.5), 0.0);
  EXPECT_EQ(canonical_kernel_density(e, e, 2.0, -0.1), 0.0);
  EXPECT_THROW(canonical_kernel_density(DensityFamily::shifted_gamma(1.0, 1.0, 2.0), e, 1.0, 0.5), InfeasibleError);
}

TEST(CanonicalKernelDensity, IntegratesToOne) {
  const std::vector<DensityFamily> forms{DensityFamily::exponential(1.0), DensityFamily::gamma(0.5, 2.0),
                                         DensityFamily::gamma(3.0, 1.0), DensityFamily::uniform(0.0, 1.5),
                                         DensityFamily::shifted_gamma(1.5, 1.0, 0.3)};
  boost::math::quadrature::tanh_sinh<double> ts;
  for (const auto& a : forms)
    for (const auto& b : forms)
      for (double total : {0.7, 3.0}) {
        if (convolution_density(a, b, total) == 0.0) {
          EXPECT_THROW(canonical_kernel_density(a, b, total, 0.5 * total), InfeasibleError);
          continue;
        }
        // The upper half is integrated through the mirrored kernel in y = total - x.
        const double half = 0.5 * total;
        std::vector<double> cuts{0.0, half};
        for (double c : {1.5, total - 1.5, 0.3, total - 0.3})
          if (c > 0.0 && c < half) cuts.push_back(c);
        std::sort(cuts.begin(), cuts.end());
        double mass = 0.0;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
          if (!(cuts[k + 1] > cuts[k])) continue;
          mass += ts.integrate([&](double x) { return canonical_kernel_density(a, b, total, x); }, cuts[k],
                               cuts[k + 1], 1e-10);
          mass += ts.integrate([&](double y) { return canonical_kernel_density(b, a, total, y); }, cuts[k],
                               cuts[k + 1], 1e-10);
        }
        EXPECT_NEAR(mass, 1.0, 1e-8) << a.kind_name() << " " << b.kind_name() << " T=" << total;
      }
}

TEST(Convolution, Examples) {
  const auto e = DensityFamily::exponential(1.0);
  for (double x : {0.1, 1.0, 3.0}) EXPECT_NEAR(convolution_density(e, e, x), x * std::exp(-x), 1e-12);
  EXPECT_EQ(convolution_density(e, e, 0.0), 0.0);
  const auto g4 = DensityFamily::gamma(4.0, 1.3);
  for (double x : {0.2, 1.0, 4.0, 9.0})
    EXPECT_NEAR(convolution_density(DensityFamily::gamma(1.5, 1.3), DensityFamily::gamma(2.5, 1.3), x), g4.pdf(x),
                1e-8);
}

TEST(ConvolutionEquality, Examples) {
  std::vector<double> grid;
  for (int k = 0; k <= 50; ++k) grid.push_back(0.2 * k);
  const auto e = DensityFamily::exponential(2.0);
  EXPECT_EQ(convolution_equality_check(e, e, e, e, grid), 0.0);
  EXPECT_LT(convolution_equality_check(DensityFamily::gamma(1.0, 2.0), DensityFamily::gamma(3.0, 2.0),
                                       DensityFamily::gamma(2.0, 2.0), DensityFamily::gamma(2.0, 2.0), grid),
            1e-8);
  const auto e1 = DensityFamily::exponential(1.0);
  EXPECT_GT(convolution_equality_check(e1, e1, e, e, grid), 0.1);
}

TEST(AdmissiblePair, Examples) {
  std::vector<double> grid;
  for (int k = 0; k <= 40; ++k) grid.push_back(0.25 * k);
  const auto e = DensityFamily::exponential(1.5);
  for (double di : {0.0, 0.7, 3.0}) EXPECT_LT(admissible_pair_check(e, e, di, grid), 1e-12);
  const auto rho2 = DensityFamily::gamma(2.0, 1.0);
  EXPECT_LT(admissible_pair_check(DensityFamily::shifted(rho2, 1.2), rho2, 1.2, grid), 1e-12);
  EXPECT_GT(admissible_pair_check(DensityFamily::uniform(0.0, 2.0), DensityFamily::exponential(1.0), 1.0, grid), 0.3);
  EXPECT_THROW(admissible_pair_check(e, e, -1.0, grid), ValidationError);
  EXPECT_THROW(admissible_pair_check(DensityFamily::uniform(0.0, 1.0), e, 2.0, grid), InfeasibleError);
}

TEST(MeasureTransform, Examples) {
  const auto e = DensityFamily::exponential(2.0);
  for (double x : {0.1, 1.0, 5.0}) EXPECT_NEAR(measure_transform(e, 2.0, x), x, 1e-12);
  EXPECT_NEAR(measure_transform(DensityFamily::uniform(0.0, 1.0), 1.0, 0.5), std::log(2.0), 1e-14);
  EXPECT_THROW(measure_transform(DensityFamily::uniform(0.0, 1.0), 1.0, 1.5), InfeasibleError);
  double prev = -1.0;
  const auto g = DensityFamily::gamma(2.0, 1.0);
  for (int k = 1; k < 100; ++k) {
    const double u = measure_transform(g, 1.0, 0.1 * k);
    EXPECT_GT(u, prev);
    prev = u;
  }
}

TEST(MeasureTransform, PushesForwardToExponential) {
  const auto g = DensityFamily::gamma(2.0, 1.0);
  const double beta = 1.5;
  Rng rng(31);
  std::vector<double> us;
  for (int k = 0; k < 5000; ++k) us.push_back(measure_transform(g, beta, g.sample(rng)));
  EXPECT_LT(ks_distance(us, [&](double u) { return u <= 0 ? 0.0 : -std::expm1(-beta * u); }),
            ks_critical_5pct(us.size()));
}

// ------------------------------------------------------------------ stationary laws

TEST(TwoTypeUnary, Examples) {
  const auto e = DensityFamily::exponential(1.0);
  const auto [a, b] = two_type_unary_stationary(2.0, 2.0, e, 0.0);
  EXPECT_DOUBLE_EQ(a, 0.5);
  EXPECT_DOUBLE_EQ(b, 0.5);
  const auto [c, d] = two_type_unary_stationary(1.0, 1.0, e, std::log(2.0));
  EXPECT_NEAR(c, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(d, 1.0 / 3.0, 1e-15);
  EXPECT_THROW(two_type_unary_stationary(0.0, 0.0, e, 1.0), ValidationError);
}

TEST(UnaryEnergyDependent, Examples) {
  const auto same = unary_energy_dependent_stationary({0.2, 0.3, 0.5}, {{0, 1.5, 1}, {1, 0, 1}, {0.4, 0.6, 0}},
                                                      {2, 2, 2}, {1, 1, 1}, 1.3);
  EXPECT_NEAR(same.pi[0], 0.2, 1e-14);
  EXPECT_NEAR(same.pi[1], 0.3, 1e-14);
  EXPECT_NEAR(same.pi[2], 0.5, 1e-14);
  const auto two = unary_energy_dependent_stationary({0.5, 0.5}, {{0, 1}, {1, 0}}, {1, 1}, {0, 1}, 1.0);
  EXPECT_NEAR(two.pi[0], 0.731058578630005, 1e-12);
  EXPECT_NEAR(two.pi[1], 0.268941421369995, 1e-12);
  EXPECT_LT(two.residual, 1e-10);
  EXPECT_EQ(two.samples, 1000u);
  const auto mixed = unary_energy_dependent_stationary({0.1, 0.6, 0.3}, {{0, 3, 1}, {0.5, 0, 0.2}, {1.0 / 3.0, 0.4, 0}},
                                                       {0.5, 1.5, 3.0}, {0.0, 0.4, 2.0}, 0.8);
  EXPECT_LT(mixed.residual, 1e-10);
  try {
    unary_energy_dependent_stationary({0.5, 0.5}, {{0, 1}, {2, 0}}, {1, 1}, {0, 1}, 1.0);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("(1,2)"), std::string::npos) << e.what();
  }
}

TEST(VectorParticle, Examples) {
  const auto same = vector_particle_stationary({0.25, 0.75}, {1.5, 1.5}, {0, 0}, 2.0, {{{1, 1}, {2, 2}, 9.0, 1.0}});
  EXPECT_NEAR(same.pi[0], 0.25, 1e-14);
  EXPECT_NEAR(same.pi[1], 0.75, 1e-14);
  EXPECT_LT(same.residual, 1e-10);
  try {
    vector_particle_stationary({0.5, 0.5}, {1.0, 2.0}, {0, 0}, 1.0, {{{1, 1}, {2, 1}, 1.0, 1.0}});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("(1,1)->(2,1)"), std::string::npos) << e.what();
  }
  // With constant nu the product form agrees with the unary law.
  const auto vec = vector_particle_stationary({0.4, 0.6}, {2.0, 2.0}, {0.0, 0.8}, 1.2, {{{1, 2}, {2, 2}, 1.5, 1.0}});
  EXPECT_LT(vec.residual, 1e-10);
  const auto un = unary_energy_dependent_stationary({0.4, 0.6}, {{0, 1.5}, {1, 0}}, {2.0, 2.0}, {0.0, 0.8}, 1.2);
  EXPECT_NEAR(vec.pi[0], un.pi[0], 1e-12);
  EXPECT_NEAR(vec.pi[1], un.pi[1], 1e-12);
}

// ------------------------------------------------------------------ Kolmogorov

TEST(Kolmogorov, Examples) {
  EXPECT_TRUE(kolmogorov_cycle_check(DiscreteChain::from_matrix({{0, 1, 2}, {1, 0, 3}, {2, 3, 0}})).passed);
  // Forward 1->2->3->1 has rates (1, 1, 1), backward (2, 1, 1).
  const auto bad = kolmogorov_cycle_check(DiscreteChain::from_matrix({{0, 1, 2}, {1, 0, 1}, {1, 1, 0}}));
  EXPECT_FALSE(bad.passed);
  EXPECT_NEAR(bad.ratio, 2.0, 1e-14);
  EXPECT_EQ(bad.cycles, 1u);
  ASSERT_EQ(bad.worst_cycle.size(), 3u);
  EXPECT_EQ(bad.worst_cycle[0], 1);
  const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
  std::vector<std::vector<double>> rates(4, std::vector<double>(4, 0.0));
  Rng rng(4);
  for (int v = 0; v < 4; ++v)
    for (int w = v + 1; w < 4; ++w) {
      const double s = rng.uniform();
      rates[v][w] = s / p[v];
      rates[w][v] = s / p[w];
    }
  const auto good = kolmogorov_cycle_check(DiscreteChain::from_matrix(rates));
  EXPECT_TRUE(good.passed);
  EXPECT_EQ(good.cycles, 4u + 3u);
  EXPECT_THROW(DiscreteChain::from_matrix({{1, 1}, {1, 0}}), ValidationError);
  EXPECT_THROW(DiscreteChain::from_matrix({{0, -1}, {1, 0}}), ValidationError);
}

// ------------------------------------------------------------------ statistics

TEST(KsDistance, Examples) {
  EXPECT_DOUBLE_EQ(ks_distance({0.5}, [](double x) { return std::clamp(x, 0.0, 1.0); }), 0.5);
  EXPECT_GE(ks_distance(std::vector<double>(100, 0.3), [](double x) { return std::clamp(x, 0.0, 1.0); }), 0.5);
  EXPECT_THROW(ks_distance({}, [](double x) { return x; }), ValidationError);
  EXPECT_NEAR(ks_critical_5pct(10000), 0.0136, 1e-4);
}

TEST(KsDistance, CalibratedOverSeeds) {
  const boost::math::gamma_distribution<> g(2.0, 1.0);
  const auto d = DensityFamily::gamma(2.0, 1.0);
  int passes = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(stream_seed(2024, seed));
    std::vector<double> xs(10000);
    for (auto& x : xs) x = d.sample(rng);
    if (ks_distance(xs, [&](double x) { return x <= 0 ? 0.0 : boost::math::cdf(g, x); }) < ks_critical_5pct(xs.size()))
      ++passes;
  }
  EXPECT_GE(passes, 93);
}

TEST(Halton, LowDiscrepancy) {
  Halton h(2);
  const auto first = h.next();
  EXPECT_DOUBLE_EQ(first[0], 0.5);
  EXPECT_DOUBLE_EQ(first[1], 1.0 / 3.0);
  double mean = 0.0;
  for (int k = 1; k < 1000; ++k) mean += h.next()[0];
  EXPECT_NEAR(mean / 999.0, 0.5, 5e-3);
}

TEST(CheckReport, NonFiniteValuesSerialize) {
  CheckResult r{"x", 1e-3, std::numeric_limits<double>::infinity(), false, 3};
  const auto j = check_report({r});
  EXPECT_EQ(j["checks"][0]["observed"], "inf");
  EXPECT_EQ(j["checks"][0]["passed"], false);
  EXPECT_EQ(j["passed"], false);
}
