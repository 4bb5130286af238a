#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "enerkin/analysis.hpp"
#include "enerkin/error.hpp"

namespace enerkin {

namespace {

// Points where the density may jump or lose smoothness.
void breakpoints(const DensityFamily& d, double shift, std::vector<double>& out) {
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, DensityFamily::ShiftedGamma>) {
          out.push_back(shift + f.offset);
        } else if constexpr (std::is_same_v<T, DensityFamily::Uniform>) {
          out.push_back(shift + f.lo);
          out.push_back(shift + f.hi);
        } else if constexpr (std::is_same_v<T, DensityFamily::Tabulated>) {
          const double h = f.x_max / static_cast<double>(f.values.size());
          for (std::size_t k = 0; k <= f.values.size(); ++k)
            out.push_back(shift + static_cast<double>(k) * h);
        } else if constexpr (std::is_same_v<T, DensityFamily::Shifted>) {
          out.push_back(shift + f.offset);
          breakpoints(*f.base, shift + f.offset, out);
        } else {
          out.push_back(shift);
        }
      },
      d.form());
}

}  // namespace

double convolution_density(const DensityFamily& rho_v, const DensityFamily& rho_w, double total) {
  if (!(total > 0.0)) return 0.0;
  const double lo = std::max({0.0, rho_v.support_lower(), total - rho_w.support_upper()});
  const double hi = std::min({total, rho_v.support_upper(), total - rho_w.support_lower()});
  if (!(hi > lo)) return 0.0;

  std::vector<double> cuts{lo, hi};
  std::vector<double> kinks;
  breakpoints(rho_v, 0.0, kinks);
  std::vector<double> kinks_w;
  breakpoints(rho_w, 0.0, kinks_w);
  for (double k : kinks_w) kinks.push_back(total - k);
  for (double k : kinks)
    if (k > lo && k < hi) cuts.push_back(k);
  const double mid = 0.5 * (lo + hi);
  cuts.push_back(mid);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // The upper half is integrated in y = total - x, so each factor is evaluated at an
  // argument measured from its own support edge and endpoint singularities stay resolved.
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto in_x = [&](double x) { return rho_v.pdf(x) * rho_w.pdf(total - x); };
  auto in_y = [&](double y) { return rho_v.pdf(total - y) * rho_w.pdf(y); };
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    if (cuts[i + 1] <= mid)
      acc += integrator.integrate(in_x, cuts[i], cuts[i + 1], 1e-12);
    else
      acc += integrator.integrate(in_y, total - cuts[i + 1], total - cuts[i], 1e-12);
  }
  return acc;
}

double canonical_kernel_density(const DensityFamily& rho_v, const DensityFamily& rho_w,
                                double total, double x) {
  const double z = convolution_density(rho_v, rho_w, total);
  if (!(z > 0.0)) {
    std::ostringstream os;
    os << "canonical kernel: no mass at total energy " << total << " (Z = 0)";
    throw InfeasibleError(os.str());
  }
  if (x < 0.0 || x > total) return 0.0;
  return rho_v.pdf(x) * rho_w.pdf(total - x) / z;
}

double convolution_equality_check(const DensityFamily& rho_v, const DensityFamily& rho_w,
                                  const DensityFamily& rho_v2, const DensityFamily& rho_w2,
                                  const std::vector<double>& grid) {
  double worst = 0.0;
  for (double t : grid)
    worst = std::max(worst, std::abs(convolution_density(rho_v, rho_w, t) -
                                     convolution_density(rho_v2, rho_w2, t)));
  return worst;
}

double admissible_pair_check(const DensityFamily& rho_1, const DensityFamily& rho_2,
                             double delta_i, const std::vector<double>& grid) {
  if (!(delta_i >= 0.0)) throw ValidationError("admissible_pair_check: internal-energy gap must be >= 0");
  const double y1 = rho_1.survival(delta_i);
  if (!(y1 > 0.0)) {
    std::ostringstream os;
    os << "admissible_pair_check: no mass above the gap " << delta_i << " (Y1 = 0)";
    throw InfeasibleError(os.str());
  }
  double worst = 0.0;
  for (double x : grid) {
    if (x < 0.0) continue;
    worst = std::max(worst, std::abs(rho_1.pdf(x + delta_i) / y1 - rho_2.pdf(x)));
  }
  return worst;
}

double measure_transform(const DensityFamily& rho, double beta, double x) {
  if (!(beta > 0.0)) throw ValidationError("measure_transform: beta must be > 0");
  if (x <= 0.0) return 0.0;
  const double s = rho.survival(x);
  if (!(s > 0.0)) {
    std::ostringstream os;
    os << "measure_transform: x=" << x << " lies beyond the support (CDF = 1)";
    throw InfeasibleError(os.str());
  }
  return -std::log(s) / beta;
}

}  // namespace enerkin
