#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "enerkin/density.hpp"
#include "enerkin/kinetics.hpp"
#include "enerkin/rng.hpp"
#include "enerkin/types.hpp"

namespace enerkin {

/// Pair collision rate alpha_{vv'}(T, T'). Catalog forms are symmetric in
/// their arguments, nonnegative and bounded.
class RateFunction {
 public:
  struct Constant {
    double value;
  };
  /// value * (1 - exp(-(T + T') / scale)): depends on the energy sum only.
  struct SaturatingSum {
    double value;
    double scale;
  };
  /// Arbitrary evaluator; not serializable.
  struct Custom {
    std::function<double(double, double)> fn;
  };
  using Form = std::variant<Constant, SaturatingSum, Custom>;

  RateFunction() : form_(Constant{1.0}) {}
  static RateFunction constant(double value);
  static RateFunction saturating_sum(double value, double scale);
  static RateFunction custom(std::function<double(double, double)> fn);

  double operator()(double t, double t2) const {
    if (const auto* c = std::get_if<Constant>(&form_)) return c->value;
    return evaluate_slow(t, t2);
  }

  bool energy_independent() const noexcept { return std::holds_alternative<Constant>(form_); }
  /// Value of a constant rate (only meaningful when energy_independent()).
  double constant_value() const;
  const Form& form() const noexcept { return form_; }

  nlohmann::json to_json() const;
  static RateFunction from_json(const nlohmann::json& j);
  bool same_as(const RateFunction& other) const;

 private:
  explicit RateFunction(Form f) : form_(std::move(f)) {}
  double evaluate_slow(double t, double t2) const;
  Form form_;
};

/// Unary reaction rate a_vw, evaluated at the particle's total energy
/// U = I(v) + T. Both forms vanish when U < I(w).
class UnaryRate {
 public:
  struct Constant {
    double value;
  };
  /// b * (U - I(w))^exponent.
  struct Power {
    double b;
    double exponent;
  };
  using Form = std::variant<Constant, Power>;

  UnaryRate() : form_(Constant{1.0}) {}
  static UnaryRate constant(double value);
  static UnaryRate power(double b, double exponent);

  /// Rate at total energy `total` for a target type of internal energy `target_internal`.
  double operator()(double total, double target_internal) const;

  const Form& form() const noexcept { return form_; }
  nlohmann::json to_json() const;
  static UnaryRate from_json(const nlohmann::json& j);

 private:
  explicit UnaryRate(Form f) : form_(f) {}
  Form form_;
};

/// Law of the first product's kinetic energy U on [0, A] given the energy A
/// available to the products; the second product receives A - U.
class EnergySplit {
 public:
  struct Uniform {};
  /// Conditional law of (xi_1, xi_2) with densities (first, second) given
  /// xi_1 + xi_2 = A.
  struct Canonical {
    DensityFamily first;
    DensityFamily second;
  };
  /// Arbitrary evaluator density(u, A); normalized numerically.
  struct Custom {
    std::function<double(double, double)> density;
  };
  using Form = std::variant<Uniform, Canonical, Custom>;

  EnergySplit() : form_(Uniform{}) {}
  static EnergySplit uniform() { return EnergySplit(Uniform{}); }
  static EnergySplit canonical(DensityFamily first, DensityFamily second);
  static EnergySplit custom(std::function<double(double, double)> density);

  /// Density of U at u given A. A == 0 is a point mass at 0 and returns 0 here.
  double density(double u, double available) const;
  /// P(U <= u | A).
  double cdf(double u, double available) const;
  /// Normalizing constant of the unnormalized law (1 for uniform).
  double normalizer(double available) const;
  /// Draw U. Throws InfeasibleError when the law has no mass at A.
  double sample(double available, Rng& rng) const;
  /// Split law seen from the second product: U' = A - U.
  EnergySplit mirrored() const;
  /// Density of U up to an A-dependent constant (rho_1(u) rho_2(A - u) for
  /// canonical kernels).
  double unnormalized(double u, double available) const;
  /// Sub-interval of [0, A] where the density can be nonzero.
  std::pair<double, double> window(double available) const;

  bool is_uniform() const noexcept { return std::holds_alternative<Uniform>(form_); }
  const Form& form() const noexcept { return form_; }

  nlohmann::json to_json() const;
  static EnergySplit from_json(const nlohmann::json& j);

 private:
  explicit EnergySplit(Form f) : form_(std::move(f)) {}
  Form form_;
};

/// One product pair (first, second) with a selection weight and split law.
struct Outcome {
  TypeId first = 1;
  TypeId second = 1;
  double weight = 1.0;
  EnergySplit split;
};

/// All reactions of the reactant class {a, b}. Outcomes are written for the
/// ordered input (a, b): the first product replaces the type-a particle.
struct BinaryChannel {
  TypeId a = 1;
  TypeId b = 1;
  RateFunction rate;
  std::vector<Outcome> outcomes;
};

struct UnaryChannel {
  TypeId from = 1;
  TypeId to = 2;
  UnaryRate rate;
};

/// Binary channels (at most one per unordered type pair) plus unary channels.
class ReactionNetwork {
 public:
  ReactionNetwork() = default;
  ReactionNetwork(TypeTable types, std::vector<BinaryChannel> binary,
                  std::vector<UnaryChannel> unary = {});

  const TypeTable& types() const noexcept { return types_; }
  const std::vector<BinaryChannel>& binary_channels() const noexcept { return binary_; }
  const std::vector<UnaryChannel>& unary_channels() const noexcept { return unary_; }

  /// Channel index for the unordered pair, or -1.
  int channel_index(TypeId v, TypeId w) const;

  /// alpha_{vw}(t, t2); 0 when no channel covers {v, w}.
  double binary_rate(TypeId v, double t, TypeId w, double t2) const;

  /// True when every binary rate depends on the reactant types only.
  bool binary_rates_type_only() const noexcept { return type_only_rates_; }
  /// Rate of the class {v, w} for type-only networks.
  double type_rate(TypeId v, TypeId w) const;

  /// Sum over targets w of a_{vw}(I(v) + t), counting feasible targets only.
  double unary_total_rate(TypeId v, double t) const;
  /// Unary channels leaving type v.
  const std::vector<int>& unary_from(TypeId v) const;

  /// Sample the products for the ordered input ((v,t),(w,t2)); the returned
  /// outcome assigns `first_type` to the first input. nullopt when no outcome
  /// is feasible ("nothing occurs").
  std::optional<CollisionOutcome> sample_collision(TypeId v, double t, TypeId w, double t2,
                                                   Rng& rng) const;

  /// P((out1, u), out2 | (v, t), (w, t2)): density of the first product's
  /// energy for the ordered input. Same-type inputs use the exchange-
  /// symmetrized kernel because the two reactants are indistinguishable.
  double kernel_density(TypeId out1, double u, TypeId out2, TypeId v, double t, TypeId w,
                        double t2) const;

  /// Total outcome mass for the input: 1 when some outcome is feasible,
  /// 0 otherwise (the collision fizzles).
  double outcome_mass(TypeId v, double t, TypeId w, double t2) const;

  /// True when the network only has channels (a,b) -> (a,b).
  bool type_preserving() const;

  /// Spot checks: alpha symmetry for same-type channels, nonnegative rates,
  /// kernel normalization at `samples` random inputs. Throws ValidationError.
  void validate(std::size_t samples = 1000, std::uint64_t seed = 7) const;

 private:
  struct Resolved {
    const BinaryChannel* channel = nullptr;
    bool swapped = false;
  };
  Resolved resolve(TypeId v, TypeId w) const;
  // Normalized weights of feasible outcomes for the channel's own order.
  void feasible_weights(const BinaryChannel& ch, double ta, double tb,
                        std::vector<double>& out) const;
  double ordered_kernel_density(const BinaryChannel& ch, TypeId out1, double u, TypeId out2,
                                double ta, double tb) const;

  TypeTable types_;
  std::vector<BinaryChannel> binary_;
  std::vector<UnaryChannel> unary_;
  std::vector<int> pair_index_;           // V*V, -1 when absent
  std::vector<std::vector<int>> unary_from_;
  std::vector<double> type_rate_;         // V*V, valid when type_only_rates_
  bool type_only_rates_ = true;
};

}  // namespace enerkin
