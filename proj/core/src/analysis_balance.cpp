#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "enerkin/analysis.hpp"
#include "enerkin/error.hpp"

namespace enerkin {

namespace {

// Adaptive Gauss-Kronrod with a combined absolute / relative stopping rule.
// Boost's adaptive driver is relative-only, which never terminates on
// integrands that vanish up to rounding.
template <class F>
double integrate(const F& f, double a, double b, double tol, int depth = 12) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double l1 = 0.0;
  double err = 0.0;
  const double value = GK::integrate(f, a, b, 0, 0.0, &err, &l1);
  if (depth == 0 || err <= std::max(tol, tol * l1)) return value;
  const double mid = 0.5 * (a + b);
  return integrate(f, a, mid, 0.5 * tol, depth - 1) + integrate(f, mid, b, 0.5 * tol, depth - 1);
}

double internal(const TypeTable& types, TypeId v) { return types.internal_energy(v); }

// Generalized LE bracket integrated over the partner pair (g', g1').
double le_bracket(const TransitionRate& w, const StateFunction& f, const TypeTable& types,
                  TypeId v, double x, TypeId v1, double x1, double tol) {
  const double energy = internal(types, v) + x + internal(types, v1) + x1;
  const double out_now = f(v, x) * f(v1, x1);
  double total = 0.0;
  for (TypeId vp = 1; vp <= types.count(); ++vp) {
    for (TypeId v1p = 1; v1p <= types.count(); ++v1p) {
      const double avail = energy - internal(types, vp) - internal(types, v1p);
      if (!(avail > 0.0)) continue;
      auto g = [&](double xp) {
        const double x1p = avail - xp;
        const double gain = w(v, x, v1, vp, xp, v1p, x1p) * f(vp, xp) * f(v1p, x1p);
        const double loss = out_now == 0.0 ? 0.0 : w(vp, xp, v1p, v, x, v1, x1) * out_now;
        return gain - loss;
      };
      total += integrate(g, 0.0, avail, tol);
    }
  }
  return total;
}

std::vector<std::array<TypeId, 4>> type_quads(int count) {
  std::vector<std::array<TypeId, 4>> out;
  for (TypeId a = 1; a <= count; ++a)
    for (TypeId b = 1; b <= count; ++b)
      for (TypeId c = 1; c <= count; ++c)
        for (TypeId d = 1; d <= count; ++d) out.push_back({a, b, c, d});
  return out;
}

std::size_t pick(double u, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(u * static_cast<double>(n)));
}

}  // namespace

StateFunction state_function(const std::vector<DensityFamily>& densities,
                             const std::vector<double>& weights) {
  if (!weights.empty() && weights.size() != densities.size())
    throw ValidationError("state_function: weight count does not match density count");
  auto d = std::make_shared<const std::vector<DensityFamily>>(densities);
  auto w = std::make_shared<const std::vector<double>>(weights);
  return [d, w](TypeId v, double x) {
    if (v < 1 || static_cast<std::size_t>(v) > d->size()) return 0.0;
    const auto k = static_cast<std::size_t>(v - 1);
    return (w->empty() ? 1.0 : (*w)[k]) * (*d)[k].pdf(x);
  };
}

TransitionRate make_transition_rate(const ReactionNetwork& network) {
  auto net = std::make_shared<const ReactionNetwork>(network);
  return [net](TypeId v, double x, TypeId v1, TypeId vp, double xp, TypeId v1p, double x1p) {
    const double rate = net->binary_rate(vp, xp, v1p, x1p);
    if (rate == 0.0) return 0.0;
    return rate * net->kernel_density(v, x, v1, vp, xp, v1p, x1p);
  };
}

std::vector<Quadruple> sample_quadruples(const TypeTable& types, std::size_t count,
                                         double x_cap) {
  const auto combos = type_quads(types.count());
  std::vector<Quadruple> out;
  auto push = [&](const std::array<TypeId, 4>& t, double x, double x1, double frac) {
    const double avail = internal(types, t[0]) + x + internal(types, t[1]) + x1 -
                         internal(types, t[2]) - internal(types, t[3]);
    if (!(avail > 0.0)) return false;
    const double xp = frac * avail;
    out.push_back({t[0], x, t[1], x1, t[2], xp, t[3], avail - xp});
    return true;
  };
  for (const auto& t : combos) {
    for (const auto& [x, x1] : {std::pair{0.0, 1.0}, std::pair{1.0, 0.0}, std::pair{0.0, x_cap}}) {
      push(t, x, x1, 0.0);
      push(t, x, x1, 1.0);
    }
  }
  Halton seq(4);
  std::size_t made = 0;
  for (std::size_t attempt = 0; made < count && attempt < 100 * count + 100; ++attempt) {
    const auto u = seq.next();
    if (push(combos[pick(u[2], combos.size())], u[0] * x_cap, u[1] * x_cap, u[3])) ++made;
  }
  return out;
}

std::vector<PairPoint> sample_pairs(const TypeTable& types, std::size_t count, double x_cap) {
  std::vector<PairPoint> out;
  const auto v_count = static_cast<std::size_t>(types.count());
  for (TypeId v = 1; v <= types.count(); ++v)
    for (TypeId v1 = 1; v1 <= types.count(); ++v1) {
      out.push_back({v, 0.0, v1, 1.0});
      out.push_back({v, 1.0, v1, 0.0});
    }
  Halton seq(3);
  for (std::size_t i = 0; i < count; ++i) {
    const auto u = seq.next();
    const auto c = pick(u[2], v_count * v_count);
    out.push_back({static_cast<TypeId>(c / v_count) + 1, u[0] * x_cap,
                   static_cast<TypeId>(c % v_count) + 1, u[1] * x_cap});
  }
  return out;
}

ResidualResult detailed_balance_residual(const TransitionRate& w, const StateFunction& f0,
                                         const TypeTable& types,
                                         const std::vector<Quadruple>& quadruples) {
  ResidualResult r;
  for (const auto& q : quadruples) {
    if (!types.contains(q.v) || !types.contains(q.v1) || !types.contains(q.vp) ||
        !types.contains(q.v1p) || q.x < 0.0 || q.x1 < 0.0 || q.xp < 0.0 || q.x1p < 0.0) {
      ++r.skipped;
      continue;
    }
    const double before = internal(types, q.v) + q.x + internal(types, q.v1) + q.x1;
    const double after = internal(types, q.vp) + q.xp + internal(types, q.v1p) + q.x1p;
    if (std::abs(before - after) > 1e-12 * std::max(1.0, std::abs(before))) {
      ++r.skipped;
      continue;
    }
    const double forward = w(q.v, q.x, q.v1, q.vp, q.xp, q.v1p, q.x1p) * f0(q.vp, q.xp) * f0(q.v1p, q.x1p);
    const double backward = w(q.vp, q.xp, q.v1p, q.v, q.x, q.v1, q.x1) * f0(q.v, q.x) * f0(q.v1, q.x1);
    if (!std::isfinite(forward) || !std::isfinite(backward)) {
      ++r.skipped;
      continue;
    }
    r.max_residual = std::max(r.max_residual, std::abs(forward - backward));
    ++r.evaluated;
  }
  return r;
}

ResidualResult local_equilibrium_residual(const TransitionRate& w, const StateFunction& f,
                                          const TypeTable& types,
                                          const std::vector<PairPoint>& pairs, double quad_tol) {
  ResidualResult r;
  for (const auto& p : pairs) {
    if (!types.contains(p.v) || !types.contains(p.v1) || p.x < 0.0 || p.x1 < 0.0) {
      ++r.skipped;
      continue;
    }
    const double value = le_bracket(w, f, types, p.v, p.x, p.v1, p.x1, quad_tol);
    if (!std::isfinite(value)) {
      ++r.skipped;
      continue;
    }
    r.max_residual = std::max(r.max_residual, std::abs(value));
    ++r.evaluated;
  }
  return r;
}

ResidualResult fixed_point_residual(const TransitionRate& w, const StateFunction& f,
                                    const TypeTable& types,
                                    const std::vector<std::pair<TypeId, double>>& points,
                                    double quad_tol) {
  ResidualResult r;
  for (const auto& [v, x] : points) {
    if (!types.contains(v) || x < 0.0) {
      ++r.skipped;
      continue;
    }
    double total = 0.0;
    for (TypeId v1 = 1; v1 <= types.count(); ++v1) {
      // x1 = s / (1 - s) maps [0, 1) onto [0, inf).
      auto g = [&](double s) {
        const double x1 = s / (1.0 - s);
        const double jac = 1.0 / ((1.0 - s) * (1.0 - s));
        return le_bracket(w, f, types, v, x, v1, x1, quad_tol) * jac;
      };
      total += integrate(g, 0.0, 1.0, quad_tol, 8);
    }
    if (!std::isfinite(total)) {
      ++r.skipped;
      continue;
    }
    r.max_residual = std::max(r.max_residual, std::abs(total));
    ++r.evaluated;
  }
  return r;
}

ResidualResult additive_conservation_residual(const StateFunction& f, const StateFunction& f0,
                                              const std::vector<Quadruple>& quadruples,
                                              const TransitionRate& w) {
  ResidualResult r;
  auto log_of = [](const StateFunction& fn, const char* name, TypeId v, double x) {
    const double value = fn(v, x);
    if (!(value > 0.0)) {
      std::ostringstream os;
      os << "additive_conservation_residual: " << name << " is not positive at type " << v
         << ", x=" << x;
      throw ValidationError(os.str());
    }
    return std::log(value);
  };
  for (const auto& q : quadruples) {
    if (w && !(w(q.v, q.x, q.v1, q.vp, q.xp, q.v1p, q.x1p) > 0.0)) {
      ++r.skipped;
      continue;
    }
    auto delta = [&](const StateFunction& fn, const char* name) {
      return log_of(fn, name, q.vp, q.xp) + log_of(fn, name, q.v1p, q.x1p) -
             log_of(fn, name, q.v, q.x) - log_of(fn, name, q.v1, q.x1);
    };
    r.max_residual = std::max(r.max_residual, std::abs(delta(f, "f") - delta(f0, "f0")));
    ++r.evaluated;
  }
  return r;
}

}  // namespace enerkin
