#include <cmath>
#include <limits>

#include "enerkin/analysis.hpp"
#include "enerkin/error.hpp"

namespace enerkin {

DiscreteChain DiscreteChain::from_matrix(std::vector<std::vector<double>> rates) {
  const std::size_t n = rates.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (rates[i].size() != n) throw ValidationError("chain: rate matrix must be square");
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(rates[i][j]) || rates[i][j] < 0.0)
        throw ValidationError("chain: rates must be finite and >= 0");
      if (i == j && rates[i][j] != 0.0) throw ValidationError("chain: diagonal must be zero");
    }
  }
  return DiscreteChain{std::move(rates)};
}

namespace {

struct CycleSearch {
  const DiscreteChain& chain;
  int max_len;
  std::size_t max_cycles;
  double tol;
  CycleCheckResult result;
  std::vector<int> path;
  std::vector<bool> on_path;
  double worst = 1.0;

  bool linked(int a, int b) const {
    const auto i = static_cast<std::size_t>(a), j = static_cast<std::size_t>(b);
    return chain.rates[i][j] > 0.0 || chain.rates[j][i] > 0.0;
  }

  void close_cycle() {
    double forward = 1.0;
    double backward = 1.0;
    for (std::size_t k = 0; k < path.size(); ++k) {
      const auto a = static_cast<std::size_t>(path[k]);
      const auto b = static_cast<std::size_t>(path[(k + 1) % path.size()]);
      forward *= chain.rates[a][b];
      backward *= chain.rates[b][a];
    }
    ++result.cycles;
    if (forward == 0.0 && backward == 0.0) return;
    double ratio;
    bool ok;
    if (forward == 0.0 || backward == 0.0) {
      ratio = std::numeric_limits<double>::infinity();
      ok = false;
    } else {
      ratio = std::max(forward / backward, backward / forward);
      ok = std::abs(forward - backward) <= tol * std::max(forward, backward);
    }
    if (!ok) result.passed = false;
    if (ratio > worst) {
      worst = ratio;
      result.worst_cycle.clear();
      for (int s : path) result.worst_cycle.push_back(s + 1);
    }
  }

  void extend(int start) {
    if (result.cycles >= max_cycles) {
      result.truncated = true;
      return;
    }
    const int last = path.back();
    const int n = static_cast<int>(chain.size());
    if (path.size() >= 3 && linked(last, start) && path[1] < last) close_cycle();
    if (static_cast<int>(path.size()) >= max_len) return;
    for (int next = start + 1; next < n; ++next) {
      if (on_path[static_cast<std::size_t>(next)] || !linked(last, next)) continue;
      path.push_back(next);
      on_path[static_cast<std::size_t>(next)] = true;
      extend(start);
      on_path[static_cast<std::size_t>(next)] = false;
      path.pop_back();
      if (result.truncated) return;
    }
  }
};

}  // namespace

CycleCheckResult kolmogorov_cycle_check(const DiscreteChain& chain, int max_cycle_len,
                                        std::size_t max_cycles, double tol) {
  if (max_cycle_len < 3) throw ValidationError("kolmogorov_cycle_check: max_cycle_len must be >= 3");
  const DiscreteChain checked = DiscreteChain::from_matrix(chain.rates);
  CycleSearch search{checked, max_cycle_len, max_cycles, tol, {}, {}, {}, 1.0};
  search.on_path.assign(checked.size(), false);
  for (int start = 0; start < static_cast<int>(checked.size()) && !search.result.truncated; ++start) {
    search.path = {start};
    search.on_path[static_cast<std::size_t>(start)] = true;
    search.extend(start);
    search.on_path[static_cast<std::size_t>(start)] = false;
  }
  search.result.ratio = search.worst;
  return search.result;
}

}  // namespace enerkin
