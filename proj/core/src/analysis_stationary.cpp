#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "enerkin/analysis.hpp"
#include "enerkin/error.hpp"

namespace enerkin {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

// log of the shifted Gamma density (nu, beta, offset) at u > offset.
double log_shifted_gamma(double u, double nu, double beta, double offset) {
  return nu * std::log(beta) - std::lgamma(nu) + (nu - 1.0) * std::log(u - offset) -
         beta * (u - offset);
}

std::vector<double> normalize_log(const std::vector<double>& logs) {
  const double top = *std::max_element(logs.begin(), logs.end());
  if (!std::isfinite(top)) throw ValidationError("stationary law: every weight vanishes");
  std::vector<double> out(logs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    out[i] = std::exp(logs[i] - top);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

// Relative mismatch of two quantities given by their logs.
double relative_gap(double log_l, double log_r) {
  if (log_l == kNegInf && log_r == kNegInf) return 0.0;
  if (log_l == kNegInf || log_r == kNegInf) return 1.0;
  return std::abs(std::expm1(log_r - log_l));
}

void check_common(const std::vector<double>& p, const std::vector<double>& nu,
                  const std::vector<double>& internal, double beta, const char* who) {
  const std::size_t v = p.size();
  if (v == 0 || nu.size() != v || internal.size() != v) {
    std::ostringstream os;
    os << who << ": p, nu and internal energies must have the same nonzero length";
    throw ValidationError(os.str());
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    std::ostringstream os;
    os << who << ": beta must be > 0";
    throw ValidationError(os.str());
  }
  for (std::size_t i = 0; i < v; ++i) {
    if (!(p[i] >= 0.0) || !std::isfinite(p[i])) {
      std::ostringstream os;
      os << who << ": p_" << i + 1 << " must be finite and >= 0";
      throw ValidationError(os.str());
    }
    if (!(nu[i] > 0.0) || !std::isfinite(nu[i])) {
      std::ostringstream os;
      os << who << ": nu_" << i + 1 << " must be > 0";
      throw ValidationError(os.str());
    }
    if (!(internal[i] >= 0.0) || !std::isfinite(internal[i])) {
      std::ostringstream os;
      os << who << ": I_" << i + 1 << " must be finite and >= 0";
      throw ValidationError(os.str());
    }
  }
}

bool balanced(double lhs, double rhs) {
  return std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(lhs), std::abs(rhs));
}

}  // namespace

std::pair<double, double> two_type_unary_stationary(double a12, double a21,
                                                    const DensityFamily& rho_1, double delta_i) {
  if (!(a12 >= 0.0) || !(a21 >= 0.0) || !std::isfinite(a12) || !std::isfinite(a21))
    throw ValidationError("two_type_unary_stationary: rates must be finite and >= 0");
  if (a12 == 0.0 && a21 == 0.0)
    throw ValidationError("two_type_unary_stationary: both rates are zero (reducible chain)");
  const double y1 = delta_i > 0.0 ? rho_1.survival(delta_i) : 1.0;
  const double denom = a21 + y1 * a12;
  if (!(denom > 0.0))
    throw ValidationError("two_type_unary_stationary: no feasible transition (Y1 * a12 + a21 = 0)");
  const double pi1 = a21 / denom;
  return {pi1, y1 * a12 / denom};
}

StationaryResult unary_energy_dependent_stationary(const std::vector<double>& p,
                                                   const std::vector<std::vector<double>>& b,
                                                   const std::vector<double>& nu,
                                                   const std::vector<double>& internal,
                                                   double beta, std::size_t samples) {
  const char* who = "unary_energy_dependent_stationary";
  check_common(p, nu, internal, beta, who);
  const std::size_t n = p.size();
  if (b.size() != n) throw ValidationError("unary_energy_dependent_stationary: b must be V x V");
  for (std::size_t v = 0; v < n; ++v) {
    if (b[v].size() != n) throw ValidationError("unary_energy_dependent_stationary: b must be V x V");
    for (std::size_t w = 0; w < n; ++w)
      if (!(b[v][w] >= 0.0) || !std::isfinite(b[v][w]))
        throw ValidationError("unary_energy_dependent_stationary: rates must be finite and >= 0");
  }
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t w = v + 1; w < n; ++w)
      if (!balanced(p[v] * b[v][w], p[w] * b[w][v])) {
        std::ostringstream os;
        os << who << ": (p, b) is not reversible at pair (" << v + 1 << "," << w + 1
           << "): p_v b_vw = " << p[v] * b[v][w] << ", p_w b_wv = " << p[w] * b[w][v];
        throw ValidationError(os.str());
      }

  std::vector<double> logs(n);
  for (std::size_t v = 0; v < n; ++v)
    logs[v] = safe_log(p[v]) - beta * internal[v] + std::lgamma(nu[v]) - nu[v] * std::log(beta);
  StationaryResult r;
  r.pi = normalize_log(logs);

  Halton seq(1);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t w = v + 1; w < n; ++w) {
      if (b[v][w] == 0.0 && b[w][v] == 0.0) continue;
      const double floor_u = std::max(internal[v], internal[w]);
      for (std::size_t s = 0; s < samples; ++s) {
        const double u = floor_u + 30.0 / beta * seq.next()[0];
        if (!(u > floor_u)) continue;
        // pi_v f_v(U) a_vw(U) against pi_w f_w(U) a_wv(U).
        const double lhs = safe_log(r.pi[v]) + log_shifted_gamma(u, nu[v], beta, internal[v]) +
                           (nu[w] - 1.0) * std::log(u - internal[w]) + safe_log(b[v][w]);
        const double rhs = safe_log(r.pi[w]) + log_shifted_gamma(u, nu[w], beta, internal[w]) +
                           (nu[v] - 1.0) * std::log(u - internal[v]) + safe_log(b[w][v]);
        r.residual = std::max(r.residual, relative_gap(lhs, rhs));
        ++r.samples;
      }
    }
  }
  return r;
}

StationaryResult vector_particle_stationary(const std::vector<double>& p,
                                            const std::vector<double>& nu,
                                            const std::vector<double>& internal, double beta,
                                            const std::vector<VectorChannel>& channels,
                                            std::size_t samples) {
  const char* who = "vector_particle_stationary";
  check_common(p, nu, internal, beta, who);
  const auto n = static_cast<TypeId>(p.size());
  auto idx = [](TypeId v) { return static_cast<std::size_t>(v - 1); };
  auto name = [](const VectorChannel& c) {
    std::ostringstream os;
    os << "(" << c.from.first << "," << c.from.second << ")->(" << c.to.first << ","
       << c.to.second << ")";
    return os.str();
  };
  for (const auto& c : channels) {
    for (TypeId t : {c.from.first, c.from.second, c.to.first, c.to.second})
      if (t < 1 || t > n)
        throw ValidationError(std::string(who) + ": channel " + name(c) + " uses an unknown type");
    if (!(c.rate_forward >= 0.0) || !(c.rate_backward >= 0.0) ||
        !std::isfinite(c.rate_forward) || !std::isfinite(c.rate_backward))
      throw ValidationError(std::string(who) + ": channel " + name(c) + " has a bad rate");
    const double nu_in = nu[idx(c.from.first)] + nu[idx(c.from.second)];
    const double nu_out = nu[idx(c.to.first)] + nu[idx(c.to.second)];
    if (std::abs(nu_in - nu_out) > 1e-12 * std::max(nu_in, nu_out)) {
      std::ostringstream os;
      os << who << ": channel " << name(c) << " violates nu_v + nu_w = nu_v' + nu_w' (" << nu_in
         << " vs " << nu_out << ")";
      throw ValidationError(os.str());
    }
    const double lhs = p[idx(c.from.first)] * p[idx(c.from.second)] * c.rate_forward;
    const double rhs = p[idx(c.to.first)] * p[idx(c.to.second)] * c.rate_backward;
    if (!balanced(lhs, rhs)) {
      std::ostringstream os;
      os << who << ": channel " << name(c) << " is not reversible for the product law p ("
         << lhs << " vs " << rhs << ")";
      throw ValidationError(os.str());
    }
  }

  std::vector<double> logs(p.size());
  for (std::size_t v = 0; v < p.size(); ++v)
    logs[v] = safe_log(p[v]) - beta * internal[v] - nu[v] * std::log(beta);
  StationaryResult r;
  r.pi = normalize_log(logs);

  Halton seq(1);
  for (const auto& c : channels) {
    if (c.rate_forward == 0.0 && c.rate_backward == 0.0) continue;
    const std::size_t v = idx(c.from.first), w = idx(c.from.second);
    const std::size_t v2 = idx(c.to.first), w2 = idx(c.to.second);
    const double i_in = internal[v] + internal[w];
    const double i_out = internal[v2] + internal[w2];
    const double nu_in = nu[v] + nu[w];
    const double nu_out = nu[v2] + nu[w2];
    const double floor_u = std::max(i_in, i_out);
    for (std::size_t s = 0; s < samples; ++s) {
      const double u = floor_u + 30.0 / beta * seq.next()[0];
      if (!(u > floor_u)) continue;
      // pi_i f_i(U) a_ij(U) against pi_j f_j(U) a_ji(U) with pi_(v,w) = pi_v pi_w.
      const double lhs = safe_log(r.pi[v]) + safe_log(r.pi[w]) +
                         log_shifted_gamma(u, nu_in, beta, i_in) +
                         (nu_out - 1.0) * std::log(u - i_out) + safe_log(c.rate_forward);
      const double rhs = safe_log(r.pi[v2]) + safe_log(r.pi[w2]) +
                         log_shifted_gamma(u, nu_out, beta, i_out) +
                         (nu_in - 1.0) * std::log(u - i_in) + safe_log(c.rate_backward);
      r.residual = std::max(r.residual, relative_gap(lhs, rhs));
      ++r.samples;
    }
  }
  return r;
}

}  // namespace enerkin
