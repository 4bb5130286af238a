#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "enerkin/rng.hpp"

namespace enerkin {

/// Probability density on R+ drawn from a closed catalog of named forms.
///
/// Every family is validated at construction: parameters must be finite and
/// in range, and the total mass must be 1 to within 1e-8 (checked by
/// quadrature for tabulated and shifted forms).
class DensityFamily {
 public:
  struct Exponential {
    double beta;
  };
  /// Gamma(nu, beta) in U - offset; zero below offset.
  struct ShiftedGamma {
    double nu;
    double beta;
    double offset;
  };
  struct Uniform {
    double lo;
    double hi;
  };
  /// Piecewise-constant density on cells of width x_max / values.size().
  struct Tabulated {
    double x_max;
    std::vector<double> values;
  };
  struct Shifted {
    std::shared_ptr<const DensityFamily> base;
    double offset;
  };
  using Form = std::variant<Exponential, ShiftedGamma, Uniform, Tabulated, Shifted>;

  static DensityFamily exponential(double beta);
  static DensityFamily gamma(double nu, double beta) { return shifted_gamma(nu, beta, 0.0); }
  static DensityFamily shifted_gamma(double nu, double beta, double offset);
  static DensityFamily uniform(double lo, double hi);
  /// Values are renormalized only if `normalize` is set; otherwise their
  /// mass must already be 1 within 1e-8.
  static DensityFamily tabulated(double x_max, std::vector<double> values, bool normalize = false);
  /// x -> base(x - offset).
  static DensityFamily shifted(const DensityFamily& base, double offset);

  double pdf(double x) const;
  double cdf(double x) const;
  /// 1 - cdf(x), computed without cancellation where the form allows.
  double survival(double x) const;
  double mean() const;
  /// Infimum of the support.
  double support_lower() const;
  /// Supremum of the support (+inf for unbounded forms).
  double support_upper() const;
  double sample(Rng& rng) const;

  const Form& form() const noexcept { return form_; }
  std::string kind_name() const;

  /// Gamma-family view (exponential is Gamma(1, beta)): returns true and fills
  /// nu, beta, offset when the density belongs to the shifted Gamma family.
  bool as_gamma(double& nu, double& beta, double& offset) const;

  nlohmann::json to_json() const;
  static DensityFamily from_json(const nlohmann::json& j);

 private:
  explicit DensityFamily(Form form) : form_(std::move(form)) {}
  Form form_;
};

}  // namespace enerkin
