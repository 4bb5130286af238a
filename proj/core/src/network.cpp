#include "enerkin/network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "enerkin/error.hpp"

namespace enerkin {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double number_field(const nlohmann::json& j, const char* key, const char* what) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw ValidationError(std::string(what) + ": field '" + key + "' must be a number");
  return j.at(key).get<double>();
}

void require_rate(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

// Same-beta shifted Gamma pair: the canonical law of U - o1 given the
// available energy is A' * Beta(nu1, nu2) with A' = A - o1 - o2.
struct GammaPair {
  double nu1, nu2, beta, o1, o2;
};

std::optional<GammaPair> gamma_pair(const EnergySplit::Canonical& c) {
  GammaPair g{};
  double b2 = 0.0;
  if (!c.first.as_gamma(g.nu1, g.beta, g.o1)) return std::nullopt;
  if (!c.second.as_gamma(g.nu2, b2, g.o2)) return std::nullopt;
  if (b2 != g.beta) return std::nullopt;
  return g;
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-12);
}

constexpr int kSplitTableCells = 1024;

}  // namespace

// ---------------------------------------------------------------- RateFunction

RateFunction RateFunction::constant(double value) {
  require_rate(std::isfinite(value) && value >= 0.0, "rate: constant value must be finite and >= 0");
  return RateFunction(Constant{value});
}

RateFunction RateFunction::saturating_sum(double value, double scale) {
  require_rate(std::isfinite(value) && value >= 0.0,
               "rate: saturating_sum value must be finite and >= 0");
  require_rate(std::isfinite(scale) && scale > 0.0, "rate: saturating_sum scale must be > 0");
  return RateFunction(SaturatingSum{value, scale});
}

RateFunction RateFunction::custom(std::function<double(double, double)> fn) {
  require_rate(static_cast<bool>(fn), "rate: custom evaluator is empty");
  return RateFunction(Custom{std::move(fn)});
}

double RateFunction::constant_value() const {
  if (const auto* c = std::get_if<Constant>(&form_)) return c->value;
  throw ValidationError("rate: not a constant rate");
}

double RateFunction::evaluate_slow(double t, double t2) const {
  return std::visit(overloaded{
                        [](const Constant& c) { return c.value; },
                        [t, t2](const SaturatingSum& s) {
                          return s.value * -std::expm1(-(t + t2) / s.scale);
                        },
                        [t, t2](const Custom& c) { return c.fn(t, t2); },
                    },
                    form_);
}

nlohmann::json RateFunction::to_json() const {
  return std::visit(
      overloaded{
          [](const Constant& c) { return nlohmann::json{{"kind", "constant"}, {"value", c.value}}; },
          [](const SaturatingSum& s) {
            return nlohmann::json{{"kind", "saturating_sum"}, {"value", s.value}, {"scale", s.scale}};
          },
          [](const Custom&) -> nlohmann::json {
            throw ValidationError("rate: custom evaluators cannot be serialized");
          },
      },
      form_);
}

RateFunction RateFunction::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ValidationError("rate: object with string field 'kind' required");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "constant") return constant(number_field(j, "value", "rate"));
  if (kind == "saturating_sum")
    return saturating_sum(number_field(j, "value", "rate"), number_field(j, "scale", "rate"));
  throw ValidationError("rate: unknown kind '" + kind + "'");
}

bool RateFunction::same_as(const RateFunction& other) const {
  if (std::holds_alternative<Custom>(form_) || std::holds_alternative<Custom>(other.form_))
    return false;
  return to_json() == other.to_json();
}

// ------------------------------------------------------------------- UnaryRate

UnaryRate UnaryRate::constant(double value) {
  require_rate(std::isfinite(value) && value >= 0.0, "unary rate: value must be finite and >= 0");
  return UnaryRate(Constant{value});
}

UnaryRate UnaryRate::power(double b, double exponent) {
  require_rate(std::isfinite(b) && b >= 0.0, "unary rate: b must be finite and >= 0");
  require_rate(std::isfinite(exponent) && exponent > -1.0, "unary rate: exponent must be > -1");
  return UnaryRate(Power{b, exponent});
}

double UnaryRate::operator()(double total, double target_internal) const {
  const double excess = total - target_internal;
  if (excess < 0.0) return 0.0;
  if (const auto* c = std::get_if<Constant>(&form_)) return c->value;
  const auto& p = std::get<Power>(form_);
  if (p.exponent == 0.0) return p.b;
  if (excess == 0.0) return p.exponent > 0.0 ? 0.0 : p.b * std::pow(excess, p.exponent);
  return p.b * std::pow(excess, p.exponent);
}

nlohmann::json UnaryRate::to_json() const {
  if (const auto* c = std::get_if<Constant>(&form_))
    return {{"kind", "constant"}, {"value", c->value}};
  const auto& p = std::get<Power>(form_);
  return {{"kind", "power"}, {"b", p.b}, {"exponent", p.exponent}};
}

UnaryRate UnaryRate::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ValidationError("unary rate: object with string field 'kind' required");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "constant") return constant(number_field(j, "value", "unary rate"));
  if (kind == "power")
    return power(number_field(j, "b", "unary rate"), number_field(j, "exponent", "unary rate"));
  throw ValidationError("unary rate: unknown kind '" + kind + "'");
}

// ----------------------------------------------------------------- EnergySplit

EnergySplit EnergySplit::canonical(DensityFamily first, DensityFamily second) {
  return EnergySplit(Canonical{std::move(first), std::move(second)});
}

EnergySplit EnergySplit::custom(std::function<double(double, double)> density) {
  if (!density) throw ValidationError("split: custom density is empty");
  return EnergySplit(Custom{std::move(density)});
}

std::pair<double, double> EnergySplit::window(double available) const {
  if (const auto* c = std::get_if<Canonical>(&form_)) {
    const double lo = std::max({0.0, c->first.support_lower(),
                                available - c->second.support_upper()});
    const double hi = std::min({available, c->first.support_upper(),
                                available - c->second.support_lower()});
    return {lo, hi};
  }
  return {0.0, available};
}

double EnergySplit::unnormalized(double u, double available) const {
  return std::visit(overloaded{
                        [](const Uniform&) { return 1.0; },
                        [u, available](const Canonical& c) {
                          return c.first.pdf(u) * c.second.pdf(available - u);
                        },
                        [u, available](const Custom& c) { return c.density(u, available); },
                    },
                    form_);
}

double EnergySplit::normalizer(double available) const {
  if (!(available > 0.0)) return 0.0;
  if (is_uniform()) return available;
  if (const auto* c = std::get_if<Canonical>(&form_)) {
    if (auto g = gamma_pair(*c)) {
      const double reduced = available - g->o1 - g->o2;
      if (!(reduced > 0.0)) return 0.0;
      const double nu = g->nu1 + g->nu2;
      return std::exp(nu * std::log(g->beta) + (nu - 1.0) * std::log(reduced) -
                      g->beta * reduced - std::lgamma(nu));
    }
  }
  const auto [lo, hi] = window(available);
  return integrate([this, available](double u) { return unnormalized(u, available); }, lo, hi);
}

double EnergySplit::density(double u, double available) const {
  if (!(available > 0.0) || u < 0.0 || u > available) return 0.0;
  if (is_uniform()) return 1.0 / available;
  if (const auto* c = std::get_if<Canonical>(&form_)) {
    if (auto g = gamma_pair(*c)) {
      const double reduced = available - g->o1 - g->o2;
      if (!(reduced > 0.0)) return 0.0;
      const double y = (u - g->o1) / reduced;
      if (y < 0.0 || y > 1.0) return 0.0;
      return boost::math::ibeta_derivative(g->nu1, g->nu2, y) / reduced;
    }
  }
  const double z = normalizer(available);
  if (!(z > 0.0)) return 0.0;
  return unnormalized(u, available) / z;
}

double EnergySplit::cdf(double u, double available) const {
  if (!(available > 0.0)) return u >= 0.0 ? 1.0 : 0.0;
  if (u <= 0.0) return 0.0;
  if (u >= available) return 1.0;
  if (is_uniform()) return u / available;
  if (const auto* c = std::get_if<Canonical>(&form_)) {
    if (auto g = gamma_pair(*c)) {
      const double reduced = available - g->o1 - g->o2;
      if (!(reduced > 0.0)) return 1.0;
      const double y = (u - g->o1) / reduced;
      if (y <= 0.0) return 0.0;
      if (y >= 1.0) return 1.0;
      return boost::math::ibeta(g->nu1, g->nu2, y);
    }
  }
  const double z = normalizer(available);
  if (!(z > 0.0)) return 0.0;
  const auto [lo, hi] = window(available);
  return std::clamp(
      integrate([this, available](double x) { return unnormalized(x, available); }, lo,
                std::min(u, hi)) / z,
      0.0, 1.0);
}

double EnergySplit::sample(double available, Rng& rng) const {
  if (available == 0.0) return 0.0;
  if (!(available > 0.0)) throw InfeasibleError("split: negative available energy");
  if (is_uniform()) return std::min(available, available * rng.uniform());
  if (const auto* c = std::get_if<Canonical>(&form_)) {
    if (auto g = gamma_pair(*c)) {
      const double reduced = available - g->o1 - g->o2;
      if (!(reduced > 0.0)) {
        std::ostringstream os;
        os << "canonical kernel: no mass at total energy " << available;
        throw InfeasibleError(os.str());
      }
      const double y = boost::math::ibeta_inv(g->nu1, g->nu2, rng.uniform());
      return std::clamp(g->o1 + reduced * y, 0.0, available);
    }
  }
  // Tabulated inverse CDF over the support window; resolution window/1024.
  const auto [lo, hi] = window(available);
  if (!(hi > lo)) {
    std::ostringstream os;
    os << "split: no mass at total energy " << available;
    throw InfeasibleError(os.str());
  }
  const double w = (hi - lo) / kSplitTableCells;
  std::vector<double> cum(kSplitTableCells + 1, 0.0);
  double left = unnormalized(lo, available);
  for (int k = 0; k < kSplitTableCells; ++k) {
    const double right = unnormalized(lo + (k + 1) * w, available);
    const double mid = unnormalized(lo + (k + 0.5) * w, available);
    // Simpson on each cell keeps the table positive for smooth densities.
    const double cell = std::max(0.0, (left + 4.0 * mid + right) * w / 6.0);
    cum[k + 1] = cum[k] + (std::isfinite(cell) ? cell : 0.0);
    left = right;
  }
  const double total = cum.back();
  if (!(total > 0.0)) {
    std::ostringstream os;
    os << "split: no mass at total energy " << available;
    throw InfeasibleError(os.str());
  }
  const double target = rng.uniform() * total;
  const auto it = std::upper_bound(cum.begin() + 1, cum.end(), target);
  const auto k = static_cast<int>(std::distance(cum.begin() + 1, it));
  const int cell = std::min(k, kSplitTableCells - 1);
  const double mass = cum[cell + 1] - cum[cell];
  const double frac = mass > 0.0 ? (target - cum[cell]) / mass : 0.5;
  return std::clamp(lo + (cell + frac) * w, 0.0, available);
}

EnergySplit EnergySplit::mirrored() const {
  return std::visit(overloaded{
                        [](const Uniform&) { return EnergySplit::uniform(); },
                        [](const Canonical& c) { return EnergySplit::canonical(c.second, c.first); },
                        [](const Custom& c) {
                          auto f = c.density;
                          return EnergySplit::custom(
                              [f](double u, double a) { return f(a - u, a); });
                        },
                    },
                    form_);
}

nlohmann::json EnergySplit::to_json() const {
  return std::visit(overloaded{
                        [](const Uniform&) { return nlohmann::json{{"kind", "uniform"}}; },
                        [](const Canonical& c) {
                          return nlohmann::json{{"kind", "canonical"},
                                                {"first", c.first.to_json()},
                                                {"second", c.second.to_json()}};
                        },
                        [](const Custom&) -> nlohmann::json {
                          throw ValidationError("split: custom evaluators cannot be serialized");
                        },
                    },
                    form_);
}

EnergySplit EnergySplit::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ValidationError("split: object with string field 'kind' required");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "uniform") return uniform();
  if (kind == "canonical") {
    if (!j.contains("first") || !j.contains("second"))
      throw ValidationError("split: canonical kernel needs 'first' and 'second' densities");
    return canonical(DensityFamily::from_json(j.at("first")),
                     DensityFamily::from_json(j.at("second")));
  }
  throw ValidationError("split: unknown kernel kind '" + kind + "'");
}

// ------------------------------------------------------------- ReactionNetwork

ReactionNetwork::ReactionNetwork(TypeTable types, std::vector<BinaryChannel> binary,
                                 std::vector<UnaryChannel> unary)
    : types_(std::move(types)), binary_(std::move(binary)), unary_(std::move(unary)) {
  const int v = types_.count();
  pair_index_.assign(static_cast<std::size_t>(v * v), -1);
  type_rate_.assign(static_cast<std::size_t>(v * v), 0.0);
  unary_from_.assign(static_cast<std::size_t>(v), {});
  for (std::size_t c = 0; c < binary_.size(); ++c) {
    const auto& ch = binary_[c];
    if (!types_.contains(ch.a) || !types_.contains(ch.b)) {
      std::ostringstream os;
      os << "binary channel " << c << ": unknown reactant type (" << ch.a << "," << ch.b << ")";
      throw ValidationError(os.str());
    }
    auto& slot = pair_index_[static_cast<std::size_t>((ch.a - 1) * v + (ch.b - 1))];
    auto& mirror = pair_index_[static_cast<std::size_t>((ch.b - 1) * v + (ch.a - 1))];
    if (slot != -1) {
      const auto& other = binary_[static_cast<std::size_t>(slot)];
      std::ostringstream os;
      if (!other.rate.same_as(ch.rate))
        os << "asymmetric rate: alpha_{" << other.a << "," << other.b << "} differs from alpha_{"
           << ch.a << "," << ch.b << "}";
      else
        os << "duplicate binary channel for reactant pair (" << ch.a << "," << ch.b << ")";
      throw ValidationError(os.str());
    }
    slot = static_cast<int>(c);
    mirror = static_cast<int>(c);
    if (ch.outcomes.empty()) {
      std::ostringstream os;
      os << "binary channel (" << ch.a << "," << ch.b << "): at least one outcome required";
      throw ValidationError(os.str());
    }
    bool any_weight = false;
    for (const auto& o : ch.outcomes) {
      if (!types_.contains(o.first) || !types_.contains(o.second)) {
        std::ostringstream os;
        os << "binary channel (" << ch.a << "," << ch.b << "): unknown product type";
        throw ValidationError(os.str());
      }
      if (!(std::isfinite(o.weight) && o.weight >= 0.0))
        throw ValidationError("binary channel: outcome weights must be finite and >= 0");
      any_weight = any_weight || o.weight > 0.0;
    }
    if (!any_weight) throw ValidationError("binary channel: all outcome weights are zero");
    if (ch.rate.energy_independent()) {
      const double r = ch.rate.constant_value();
      type_rate_[static_cast<std::size_t>((ch.a - 1) * v + (ch.b - 1))] = r;
      type_rate_[static_cast<std::size_t>((ch.b - 1) * v + (ch.a - 1))] = r;
    } else {
      type_only_rates_ = false;
    }
  }
  for (std::size_t u = 0; u < unary_.size(); ++u) {
    const auto& ch = unary_[u];
    if (!types_.contains(ch.from) || !types_.contains(ch.to) || ch.from == ch.to) {
      std::ostringstream os;
      os << "unary channel " << u << ": invalid types (" << ch.from << " -> " << ch.to << ")";
      throw ValidationError(os.str());
    }
    unary_from_[static_cast<std::size_t>(ch.from - 1)].push_back(static_cast<int>(u));
  }
}

int ReactionNetwork::channel_index(TypeId v, TypeId w) const {
  if (!types_.contains(v) || !types_.contains(w)) return -1;
  return pair_index_[static_cast<std::size_t>((v - 1) * types_.count() + (w - 1))];
}

ReactionNetwork::Resolved ReactionNetwork::resolve(TypeId v, TypeId w) const {
  const int idx = channel_index(v, w);
  if (idx < 0) return {};
  const auto& ch = binary_[static_cast<std::size_t>(idx)];
  return {&ch, ch.a != v};
}

double ReactionNetwork::binary_rate(TypeId v, double t, TypeId w, double t2) const {
  const auto r = resolve(v, w);
  if (!r.channel) return 0.0;
  return r.swapped ? r.channel->rate(t2, t) : r.channel->rate(t, t2);
}

double ReactionNetwork::type_rate(TypeId v, TypeId w) const {
  return type_rate_[static_cast<std::size_t>((v - 1) * types_.count() + (w - 1))];
}

const std::vector<int>& ReactionNetwork::unary_from(TypeId v) const {
  return unary_from_[static_cast<std::size_t>(v - 1)];
}

double ReactionNetwork::unary_total_rate(TypeId v, double t) const {
  const auto& list = unary_from(v);
  if (list.empty()) return 0.0;
  const double total = types_.internal_energy(v) + t;
  double sum = 0.0;
  for (int u : list) {
    const auto& ch = unary_[static_cast<std::size_t>(u)];
    sum += ch.rate(total, types_.internal_energy(ch.to));
  }
  return sum;
}

void ReactionNetwork::feasible_weights(const BinaryChannel& ch, double ta, double tb,
                                       std::vector<double>& out) const {
  out.assign(ch.outcomes.size(), 0.0);
  double sum = 0.0;
  for (std::size_t k = 0; k < ch.outcomes.size(); ++k) {
    const auto& o = ch.outcomes[k];
    if (o.weight > 0.0 && collision_feasible(ch.a, ta, ch.b, tb, o.first, o.second, types_)) {
      out[k] = o.weight;
      sum += o.weight;
    }
  }
  if (sum > 0.0)
    for (double& x : out) x /= sum;
}

std::optional<CollisionOutcome> ReactionNetwork::sample_collision(TypeId v, double t, TypeId w,
                                                                  double t2, Rng& rng) const {
  const auto r = resolve(v, w);
  if (!r.channel) return std::nullopt;
  const auto& ch = *r.channel;
  const double ta = r.swapped ? t2 : t;
  const double tb = r.swapped ? t : t2;
  thread_local std::vector<double> weights;
  feasible_weights(ch, ta, tb, weights);
  double total = 0.0;
  for (double x : weights) total += x;
  if (!(total > 0.0)) return std::nullopt;

  std::size_t pick = 0;
  if (ch.outcomes.size() > 1) {
    double target = rng.uniform() * total;
    pick = ch.outcomes.size() - 1;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if (weights[k] > 0.0 && target < weights[k]) {
        pick = k;
        break;
      }
      target -= weights[k];
    }
    while (weights[pick] == 0.0 && pick > 0) --pick;
  }
  const auto& o = ch.outcomes[pick];
  const double available =
      std::max(0.0, available_kinetic_energy(ch.a, ta, ch.b, tb, o.first, o.second, types_));
  const double u = o.split.sample(available, rng);
  if (!r.swapped) return CollisionOutcome{o.first, u, o.second};
  return CollisionOutcome{o.second, available - u, o.first};
}

double ReactionNetwork::ordered_kernel_density(const BinaryChannel& ch, TypeId out1, double u,
                                               TypeId out2, double ta, double tb) const {
  thread_local std::vector<double> weights;
  feasible_weights(ch, ta, tb, weights);
  double p = 0.0;
  for (std::size_t k = 0; k < ch.outcomes.size(); ++k) {
    const auto& o = ch.outcomes[k];
    if (weights[k] == 0.0 || o.first != out1 || o.second != out2) continue;
    const double available = available_kinetic_energy(ch.a, ta, ch.b, tb, o.first, o.second, types_);
    p += weights[k] * o.split.density(u, available);
  }
  return p;
}

double ReactionNetwork::kernel_density(TypeId out1, double u, TypeId out2, TypeId v, double t,
                                       TypeId w, double t2) const {
  const auto r = resolve(v, w);
  if (!r.channel) return 0.0;
  const auto& ch = *r.channel;
  auto mirrored = [&](double ta, double tb) {
    // First input is the channel's b-particle: it receives the second product.
    double p = 0.0;
    thread_local std::vector<double> weights;
    feasible_weights(ch, ta, tb, weights);
    for (std::size_t k = 0; k < ch.outcomes.size(); ++k) {
      const auto& o = ch.outcomes[k];
      if (weights[k] == 0.0 || o.second != out1 || o.first != out2) continue;
      const double available =
          available_kinetic_energy(ch.a, ta, ch.b, tb, o.first, o.second, types_);
      p += weights[k] * o.split.density(available - u, available);
    }
    return p;
  };
  if (ch.a == ch.b)
    return 0.5 * (ordered_kernel_density(ch, out1, u, out2, t, t2) + mirrored(t2, t));
  if (!r.swapped) return ordered_kernel_density(ch, out1, u, out2, t, t2);
  return mirrored(t2, t);
}

double ReactionNetwork::outcome_mass(TypeId v, double t, TypeId w, double t2) const {
  const auto r = resolve(v, w);
  if (!r.channel) return 0.0;
  const auto& ch = *r.channel;
  const double ta = r.swapped ? t2 : t;
  const double tb = r.swapped ? t : t2;
  for (const auto& o : ch.outcomes)
    if (o.weight > 0.0 && collision_feasible(ch.a, ta, ch.b, tb, o.first, o.second, types_))
      return 1.0;
  return 0.0;
}

bool ReactionNetwork::type_preserving() const {
  for (const auto& ch : binary_)
    for (const auto& o : ch.outcomes)
      if (o.weight > 0.0 && !(o.first == ch.a && o.second == ch.b)) return false;
  return unary_.empty();
}

void ReactionNetwork::validate(std::size_t samples, std::uint64_t seed) const {
  Rng rng(seed);
  for (const auto& ch : binary_) {
    const bool custom_rate = std::holds_alternative<RateFunction::Custom>(ch.rate.form());
    for (std::size_t s = 0; s < samples && custom_rate; ++s) {
      const double x = rng.exponential(0.5);
      const double y = rng.exponential(0.5);
      const double r = ch.rate(x, y);
      if (!(std::isfinite(r) && r >= 0.0)) {
        std::ostringstream os;
        os << "rate alpha_{" << ch.a << "," << ch.b << "}(" << x << "," << y
           << ") is negative or not finite";
        throw ValidationError(os.str());
      }
      if (ch.a == ch.b && std::abs(r - ch.rate(y, x)) > 1e-12 * std::max(1.0, std::abs(r))) {
        std::ostringstream os;
        os << "asymmetric rate: alpha_{" << ch.a << "," << ch.a << "}(T,T') != alpha_{" << ch.a
           << "," << ch.a << "}(T',T)";
        throw ValidationError(os.str());
      }
    }
    for (std::size_t k = 0; k < ch.outcomes.size(); ++k) {
      const auto& o = ch.outcomes[k];
      if (o.split.is_uniform() || o.weight == 0.0) continue;
      for (std::size_t s = 0; s < samples; ++s) {
        const double ta = rng.exponential(0.5);
        const double tb = rng.exponential(0.5);
        const double available = available_kinetic_energy(ch.a, ta, ch.b, tb, o.first, o.second, types_);
        if (!(available > 0.0)) continue;
        const auto [lo, hi] = o.split.window(available);
        const double mass = integrate(
            [&o, available](double u) { return o.split.density(u, available); }, lo, hi);
        if (std::abs(mass - 1.0) > 1e-6) {
          std::ostringstream os;
          os << "kernel of channel (" << ch.a << "," << ch.b << ") outcome " << k
             << " is not normalized at available energy " << available << " (mass " << mass
             << ")";
          throw ValidationError(os.str());
        }
      }
    }
  }
}

}  // namespace enerkin
