#include "enerkin/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "enerkin/error.hpp"

namespace enerkin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassTolerance = 1e-8;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError("density: " + message);
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

double gamma_pdf(double nu, double beta, double y) {
  if (y < 0.0) return 0.0;
  if (y == 0.0) {
    if (nu < 1.0) return kInf;
    return nu == 1.0 ? beta : 0.0;
  }
  return std::exp(nu * std::log(beta) + (nu - 1.0) * std::log(y) - beta * y -
                  std::lgamma(nu));
}

}  // namespace

DensityFamily DensityFamily::exponential(double beta) {
  require(finite_positive(beta), "exponential beta must be finite and > 0");
  return DensityFamily(Exponential{beta});
}

DensityFamily DensityFamily::shifted_gamma(double nu, double beta, double offset) {
  require(finite_positive(nu), "gamma nu must be finite and > 0");
  require(finite_positive(beta), "gamma beta must be finite and > 0");
  require(std::isfinite(offset) && offset >= 0.0, "gamma offset must be finite and >= 0");
  return DensityFamily(ShiftedGamma{nu, beta, offset});
}

DensityFamily DensityFamily::uniform(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo >= 0.0 && hi > lo,
          "uniform bounds must satisfy 0 <= lo < hi");
  return DensityFamily(Uniform{lo, hi});
}

DensityFamily DensityFamily::tabulated(double x_max, std::vector<double> values, bool normalize) {
  require(finite_positive(x_max), "tabulated x_max must be finite and > 0");
  require(!values.empty(), "tabulated values must be nonempty");
  for (double v : values) require(std::isfinite(v) && v >= 0.0, "tabulated values must be >= 0");
  const double h = x_max / static_cast<double>(values.size());
  const double mass = std::accumulate(values.begin(), values.end(), 0.0) * h;
  if (normalize) {
    require(mass > 0.0, "tabulated values carry no mass");
    for (double& v : values) v /= mass;
  } else {
    std::ostringstream os;
    os << "tabulated density integrates to " << mass << ", expected 1";
    require(std::abs(mass - 1.0) <= kMassTolerance, os.str());
  }
  return DensityFamily(Tabulated{x_max, std::move(values)});
}

DensityFamily DensityFamily::shifted(const DensityFamily& base, double offset) {
  require(std::isfinite(offset) && offset >= 0.0, "shift offset must be finite and >= 0");
  return DensityFamily(Shifted{std::make_shared<const DensityFamily>(base), offset});
}

double DensityFamily::pdf(double x) const {
  return std::visit(
      overloaded{
          [x](const Exponential& e) { return x < 0.0 ? 0.0 : e.beta * std::exp(-e.beta * x); },
          [x](const ShiftedGamma& g) { return gamma_pdf(g.nu, g.beta, x - g.offset); },
          [x](const Uniform& u) { return (x < u.lo || x > u.hi) ? 0.0 : 1.0 / (u.hi - u.lo); },
          [x](const Tabulated& t) {
            if (x < 0.0 || x >= t.x_max) return 0.0;
            const double h = t.x_max / static_cast<double>(t.values.size());
            const auto k = std::min(t.values.size() - 1, static_cast<std::size_t>(x / h));
            return t.values[k];
          },
          [x](const Shifted& s) { return s.base->pdf(x - s.offset); },
      },
      form_);
}

double DensityFamily::cdf(double x) const {
  return std::visit(
      overloaded{
          [x](const Exponential& e) { return x <= 0.0 ? 0.0 : -std::expm1(-e.beta * x); },
          [x](const ShiftedGamma& g) {
            const double y = x - g.offset;
            return y <= 0.0 ? 0.0 : boost::math::gamma_p(g.nu, g.beta * y);
          },
          [x](const Uniform& u) {
            if (x <= u.lo) return 0.0;
            if (x >= u.hi) return 1.0;
            return (x - u.lo) / (u.hi - u.lo);
          },
          [x](const Tabulated& t) {
            if (x <= 0.0) return 0.0;
            if (x >= t.x_max) return 1.0;
            const double h = t.x_max / static_cast<double>(t.values.size());
            const auto k = std::min(t.values.size() - 1, static_cast<std::size_t>(x / h));
            double acc = 0.0;
            for (std::size_t i = 0; i < k; ++i) acc += t.values[i];
            return std::min(1.0, (acc + t.values[k] * (x / h - static_cast<double>(k))) * h);
          },
          [x](const Shifted& s) { return s.base->cdf(x - s.offset); },
      },
      form_);
}

double DensityFamily::survival(double x) const {
  return std::visit(
      overloaded{
          [x](const Exponential& e) { return x <= 0.0 ? 1.0 : std::exp(-e.beta * x); },
          [x](const ShiftedGamma& g) {
            const double y = x - g.offset;
            return y <= 0.0 ? 1.0 : boost::math::gamma_q(g.nu, g.beta * y);
          },
          [this, x](const auto&) { return std::max(0.0, 1.0 - cdf(x)); },
      },
      form_);
}

double DensityFamily::mean() const {
  return std::visit(overloaded{
                        [](const Exponential& e) { return 1.0 / e.beta; },
                        [](const ShiftedGamma& g) { return g.offset + g.nu / g.beta; },
                        [](const Uniform& u) { return 0.5 * (u.lo + u.hi); },
                        [](const Tabulated& t) {
                          const double h = t.x_max / static_cast<double>(t.values.size());
                          double acc = 0.0;
                          for (std::size_t k = 0; k < t.values.size(); ++k)
                            acc += t.values[k] * (static_cast<double>(k) + 0.5) * h;
                          return acc * h;
                        },
                        [](const Shifted& s) { return s.offset + s.base->mean(); },
                    },
                    form_);
}

double DensityFamily::support_lower() const {
  return std::visit(overloaded{
                        [](const Exponential&) { return 0.0; },
                        [](const ShiftedGamma& g) { return g.offset; },
                        [](const Uniform& u) { return u.lo; },
                        [](const Tabulated& t) {
                          const double h = t.x_max / static_cast<double>(t.values.size());
                          std::size_t k = 0;
                          while (k < t.values.size() && t.values[k] == 0.0) ++k;
                          return static_cast<double>(k) * h;
                        },
                        [](const Shifted& s) { return s.offset + s.base->support_lower(); },
                    },
                    form_);
}

double DensityFamily::support_upper() const {
  return std::visit(overloaded{
                        [](const Exponential&) { return kInf; },
                        [](const ShiftedGamma&) { return kInf; },
                        [](const Uniform& u) { return u.hi; },
                        [](const Tabulated& t) {
                          const double h = t.x_max / static_cast<double>(t.values.size());
                          std::size_t k = t.values.size();
                          while (k > 0 && t.values[k - 1] == 0.0) --k;
                          return static_cast<double>(k) * h;
                        },
                        [](const Shifted& s) { return s.offset + s.base->support_upper(); },
                    },
                    form_);
}

double DensityFamily::sample(Rng& rng) const {
  return std::visit(
      overloaded{
          [&rng](const Exponential& e) { return rng.exponential(e.beta); },
          [&rng](const ShiftedGamma& g) {
            const double u = rng.uniform();
            return g.offset + boost::math::gamma_p_inv(g.nu, u) / g.beta;
          },
          [&rng](const Uniform& u) { return rng.uniform(u.lo, u.hi); },
          [&rng](const Tabulated& t) {
            const double h = t.x_max / static_cast<double>(t.values.size());
            const double target = rng.uniform();
            double acc = 0.0;
            for (std::size_t k = 0; k < t.values.size(); ++k) {
              const double cell = t.values[k] * h;
              if (cell > 0.0 && acc + cell > target)
                return (static_cast<double>(k) + (target - acc) / cell) * h;
              acc += cell;
            }
            return t.x_max;
          },
          [&rng](const Shifted& s) { return s.offset + s.base->sample(rng); },
      },
      form_);
}

std::string DensityFamily::kind_name() const {
  return std::visit(overloaded{
                        [](const Exponential&) { return std::string("exponential"); },
                        [](const ShiftedGamma& g) {
                          return std::string(g.offset == 0.0 ? "gamma" : "shifted_gamma");
                        },
                        [](const Uniform&) { return std::string("uniform"); },
                        [](const Tabulated&) { return std::string("tabulated"); },
                        [](const Shifted&) { return std::string("shifted"); },
                    },
                    form_);
}

bool DensityFamily::as_gamma(double& nu, double& beta, double& offset) const {
  if (const auto* e = std::get_if<Exponential>(&form_)) {
    nu = 1.0;
    beta = e->beta;
    offset = 0.0;
    return true;
  }
  if (const auto* g = std::get_if<ShiftedGamma>(&form_)) {
    nu = g->nu;
    beta = g->beta;
    offset = g->offset;
    return true;
  }
  if (const auto* s = std::get_if<Shifted>(&form_)) {
    if (s->base->as_gamma(nu, beta, offset)) {
      offset += s->offset;
      return true;
    }
  }
  return false;
}

nlohmann::json DensityFamily::to_json() const {
  return std::visit(
      overloaded{
          [](const Exponential& e) {
            return nlohmann::json{{"kind", "exponential"}, {"beta", e.beta}};
          },
          [](const ShiftedGamma& g) {
            nlohmann::json j{{"kind", "shifted_gamma"}, {"nu", g.nu}, {"beta", g.beta}};
            j["offset"] = g.offset;
            return j;
          },
          [](const Uniform& u) {
            return nlohmann::json{{"kind", "uniform"}, {"lo", u.lo}, {"hi", u.hi}};
          },
          [](const Tabulated& t) {
            return nlohmann::json{{"kind", "tabulated"}, {"x_max", t.x_max}, {"values", t.values}};
          },
          [](const Shifted& s) {
            return nlohmann::json{
                {"kind", "shifted"}, {"offset", s.offset}, {"base", s.base->to_json()}};
          },
      },
      form_);
}

namespace {

double number_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw ValidationError(std::string("density: field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace

DensityFamily DensityFamily::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ValidationError("density: object with string field 'kind' required");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "exponential") return exponential(number_field(j, "beta"));
  if (kind == "gamma") return gamma(number_field(j, "nu"), number_field(j, "beta"));
  if (kind == "shifted_gamma") {
    const double offset = j.contains("offset") ? number_field(j, "offset") : 0.0;
    return shifted_gamma(number_field(j, "nu"), number_field(j, "beta"), offset);
  }
  if (kind == "uniform") return uniform(number_field(j, "lo"), number_field(j, "hi"));
  if (kind == "tabulated") {
    if (!j.contains("values") || !j.at("values").is_array())
      throw ValidationError("density: field 'values' must be an array");
    const bool normalize = j.value("normalize", false);
    return tabulated(number_field(j, "x_max"), j.at("values").get<std::vector<double>>(),
                     normalize);
  }
  if (kind == "shifted") {
    if (!j.contains("base")) throw ValidationError("density: field 'base' required");
    return shifted(from_json(j.at("base")), number_field(j, "offset"));
  }
  throw ValidationError("density: unknown kind '" + kind + "'");
}

}  // namespace enerkin
