#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "enerkin/density.hpp"
#include "enerkin/network.hpp"
#include "enerkin/solver.hpp"
#include "enerkin/types.hpp"

namespace enerkin {

// ---------------------------------------------------------------- reports

struct CheckResult {
  std::string name;
  double tolerance = 0.0;
  double observed = 0.0;
  bool passed = false;
  std::size_t samples = 0;

  nlohmann::json to_json() const;
};

/// {"passed": all, "checks": [...]}.
nlohmann::json check_report(const std::vector<CheckResult>& checks);

// ---------------------------------------------------------------- statistics

/// Halton low-discrepancy sequence in [0,1)^dims (first `dims` primes).
class Halton {
 public:
  explicit Halton(int dims, std::uint64_t skip = 1);
  std::vector<double> next();
  int dims() const noexcept { return static_cast<int>(bases_.size()); }

 private:
  std::vector<std::uint64_t> bases_;
  std::uint64_t index_;
};

/// sup |F_n - F| for the empirical CDF of `samples`. Throws on an empty set.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Asymptotic 5% critical value 1.36 / sqrt(n).
double ks_critical_5pct(std::size_t n);

// ---------------------------------------------------------------- entropy

/// H(f, f0) = sum_v int f log(f0 / f) on a midpoint grid of [0, x_max].
/// Cells with f = 0 contribute 0; f0 = 0 where f > 0 throws.
double relative_entropy(const std::vector<DensityFamily>& f, const std::vector<DensityFamily>& f0,
                        double x_max, int n_cells, const std::vector<double>& f_weights = {},
                        const std::vector<double>& f0_weights = {});
/// Grid version; f0 is evaluated at the cell centers.
double relative_entropy(const DensityGrid& f, const std::vector<DensityFamily>& f0,
                        const std::vector<double>& f0_weights = {});
double relative_entropy(const DensityGrid& f, const DensityGrid& f0);

struct MonotonicityResult {
  bool passed = true;
  /// Smallest successive difference H_{k+1} - H_k (+inf for fewer than 2 values).
  double min_delta = std::numeric_limits<double>::infinity();
  std::size_t worst_step = 0;
  std::vector<double> entropies;
};

MonotonicityResult entropy_monotonicity_check(const std::vector<double>& entropies,
                                              double tol = 1e-6);
MonotonicityResult entropy_monotonicity_check(const std::vector<GridSnapshot>& trajectory,
                                              const std::vector<DensityFamily>& f0,
                                              double tol = 1e-6,
                                              const std::vector<double>& f0_weights = {});

// ---------------------------------------------------------------- balance

/// f(v, x) on V x R+.
using StateFunction = std::function<double(TypeId, double)>;

/// f(v, x) = weight_v * density_v(x); weights default to 1.
StateFunction state_function(const std::vector<DensityFamily>& densities,
                             const std::vector<double>& weights = {});

/// w(gamma, gamma1 | gamma', gamma1') with the delta factor removed: rate
/// density at which the pair gamma' = (vp, xp), gamma1' = (v1p, x1p) produces
/// (v, x) together with a v1 particle whose energy is fixed by conservation.
using TransitionRate = std::function<double(TypeId v, double x, TypeId v1, TypeId vp, double xp,
                                            TypeId v1p, double x1p)>;

/// alpha_{vp v1p}(xp, x1p) * P((v, x), v1 | (vp, xp), (v1p, x1p)).
TransitionRate make_transition_rate(const ReactionNetwork& network);

/// A pair of states and a candidate pair of partners.
struct Quadruple {
  TypeId v = 1;
  double x = 0.0;
  TypeId v1 = 1;
  double x1 = 0.0;
  TypeId vp = 1;
  double xp = 0.0;
  TypeId v1p = 1;
  double x1p = 0.0;
};

/// Energy-conserving quadruples from a Halton sweep of [0, x_cap]^2 and the
/// feasible split range, plus corner cases (zero energies, split endpoints).
std::vector<Quadruple> sample_quadruples(const TypeTable& types, std::size_t count,
                                         double x_cap = 10.0);

struct ResidualResult {
  double max_residual = 0.0;
  std::size_t evaluated = 0;
  /// Inputs outside the support of w (energy not conserved, or an infeasible point).
  std::size_t skipped = 0;
};

/// max |w(g,g1|g',g1') f(g') f(g1') - w(g',g1'|g,g1) f(g) f(g1)|.
ResidualResult detailed_balance_residual(const TransitionRate& w, const StateFunction& f0,
                                         const TypeTable& types,
                                         const std::vector<Quadruple>& quadruples);

struct PairPoint {
  TypeId v = 1;
  double x = 0.0;
  TypeId v1 = 1;
  double x1 = 0.0;
};

std::vector<PairPoint> sample_pairs(const TypeTable& types, std::size_t count, double x_cap = 10.0);

/// max over (g, g1) of |sum_{g', g1'} [w(g,g1|g',g1') f f - w(g',g1'|g,g1) f f]|,
/// the inner integral by adaptive quadrature.
ResidualResult local_equilibrium_residual(const TransitionRate& w, const StateFunction& f,
                                          const TypeTable& types,
                                          const std::vector<PairPoint>& pairs,
                                          double quad_tol = 1e-10);

/// The local-equilibrium bracket additionally integrated over g1 = (v1, x1),
/// x1 in [0, inf).
ResidualResult fixed_point_residual(const TransitionRate& w, const StateFunction& f,
                                    const TypeTable& types,
                                    const std::vector<std::pair<TypeId, double>>& points,
                                    double quad_tol = 1e-10);

/// max |log f(g') + log f(g1') - log f(g) - log f(g1) - (same with f0)| over
/// quadruples where `w` (if given) is positive. Nonpositive densities throw.
ResidualResult additive_conservation_residual(const StateFunction& f, const StateFunction& f0,
                                              const std::vector<Quadruple>& quadruples,
                                              const TransitionRate& w = nullptr);

// ---------------------------------------------------------------- kernels

/// Z(T) = int_0^T rho_v(y) rho_w(T - y) dy by quadrature.
double convolution_density(const DensityFamily& rho_v, const DensityFamily& rho_w, double total);

/// rho_v(x) rho_w(T - x) / Z(T); 0 outside [0, T]. Throws InfeasibleError when Z(T) = 0.
double canonical_kernel_density(const DensityFamily& rho_v, const DensityFamily& rho_w,
                                double total, double x);

/// max_T |rho_vw(T) - rho_v'w'(T)| over `grid`.
double convolution_equality_check(const DensityFamily& rho_v, const DensityFamily& rho_w,
                                  const DensityFamily& rho_v2, const DensityFamily& rho_w2,
                                  const std::vector<double>& grid);

/// max_x |rho_1(x + dI) / Y_1 - rho_2(x)| over `grid`, Y_1 = P(xi_1 > dI).
double admissible_pair_check(const DensityFamily& rho_1, const DensityFamily& rho_2,
                             double delta_i, const std::vector<double>& grid);

/// U(x) = -log(1 - F(x)) / beta: maps rho onto Exp(beta) monotonically.
double measure_transform(const DensityFamily& rho, double beta, double x);

// ---------------------------------------------------------------- stationary laws

/// (pi_1, pi_2) solving pi_1 Y_1 a_12 = pi_2 a_21, Y_1 = P(xi_1 > dI), where
/// rho_1 is the kinetic-energy density of type 1 and dI = I_2 - I_1.
std::pair<double, double> two_type_unary_stationary(double a12, double a21,
                                                    const DensityFamily& rho_1, double delta_i);

struct StationaryResult {
  std::vector<double> pi;
  /// Largest relative reversibility residual over the sampled energies.
  double residual = 0.0;
  std::size_t samples = 0;
};

/// pi_v proportional to p_v exp(-beta I_v) Gamma(nu_v) beta^{-nu_v} for unary
/// rates a_vw(U) = (U - I_w)^{nu_w - 1} b_vw and shifted Gamma energy laws.
/// `b` is V x V (b[v][w], zero diagonal). Checks p_v b_vw = p_w b_wv and
/// evaluates pi_v f_v a_vw = pi_w f_w a_wv at `samples` energies per pair.
StationaryResult unary_energy_dependent_stationary(const std::vector<double>& p,
                                                   const std::vector<std::vector<double>>& b,
                                                   const std::vector<double>& nu,
                                                   const std::vector<double>& internal,
                                                   double beta, std::size_t samples = 1000);

/// Binary reaction (v, w) <-> (v', w') between vector particles.
struct VectorChannel {
  std::pair<TypeId, TypeId> from;
  std::pair<TypeId, TypeId> to;
  double rate_forward = 1.0;   // b_{ij}
  double rate_backward = 1.0;  // b_{ji}
};

/// pi_v proportional to p_v exp(-beta I_v) beta^{-nu_v}. Requires
/// nu_v + nu_w = nu_v' + nu_w' and p_v p_w b_ij = p_v' p_w' b_ji on every
/// channel; checks the pair-level reversibility identity at `samples`
/// energies per channel.
StationaryResult vector_particle_stationary(const std::vector<double>& p,
                                            const std::vector<double>& nu,
                                            const std::vector<double>& internal, double beta,
                                            const std::vector<VectorChannel>& channels,
                                            std::size_t samples = 1000);

// ---------------------------------------------------------------- Kolmogorov

/// Finite chain given by its rate matrix (zero diagonal, finite, >= 0).
struct DiscreteChain {
  std::vector<std::vector<double>> rates;

  static DiscreteChain from_matrix(std::vector<std::vector<double>> rates);
  std::size_t size() const noexcept { return rates.size(); }
};

struct CycleCheckResult {
  bool passed = true;
  /// States of the worst cycle, in the forward direction.
  std::vector<int> worst_cycle;
  /// max(forward/backward, backward/forward) on the worst cycle (inf when one
  /// product vanishes); 1 when no cycle was found.
  double ratio = 1.0;
  std::size_t cycles = 0;
  bool truncated = false;
};

/// Enumerates simple cycles of length 3..max_cycle_len and compares the
/// forward and backward rate products (relative tolerance `tol`).
CycleCheckResult kolmogorov_cycle_check(const DiscreteChain& chain, int max_cycle_len = 6,
                                        std::size_t max_cycles = 100000, double tol = 1e-10);

}  // namespace enerkin
