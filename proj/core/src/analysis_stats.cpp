#include <algorithm>
#include <cmath>

#include "enerkin/analysis.hpp"
#include "enerkin/error.hpp"

namespace enerkin {

nlohmann::json CheckResult::to_json() const {
  auto number = [](double x) -> nlohmann::json {
    if (std::isfinite(x)) return x;
    return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  };
  return {{"name", name},
          {"tolerance", number(tolerance)},
          {"observed", number(observed)},
          {"passed", passed},
          {"samples", samples}};
}

nlohmann::json check_report(const std::vector<CheckResult>& checks) {
  nlohmann::json list = nlohmann::json::array();
  bool all = true;
  for (const auto& c : checks) {
    list.push_back(c.to_json());
    all = all && c.passed;
  }
  return {{"passed", all}, {"checks", list}};
}

Halton::Halton(int dims, std::uint64_t skip) : index_(skip) {
  if (dims < 1) throw ValidationError("halton: dims must be >= 1");
  for (std::uint64_t candidate = 2; static_cast<int>(bases_.size()) < dims; ++candidate) {
    bool prime = true;
    for (auto p : bases_)
      if (candidate % p == 0) {
        prime = false;
        break;
      }
    if (prime) bases_.push_back(candidate);
  }
}

std::vector<double> Halton::next() {
  std::vector<double> out(bases_.size());
  for (std::size_t d = 0; d < bases_.size(); ++d) {
    const double base = static_cast<double>(bases_[d]);
    double f = 1.0;
    double r = 0.0;
    for (std::uint64_t i = index_; i > 0; i /= bases_[d]) {
      f /= base;
      r += f * static_cast<double>(i % bases_[d]);
    }
    out[d] = r;
  }
  ++index_;
  return out;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw ValidationError("ks_distance: empty sample set");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return std::clamp(d, 0.0, 1.0);
}

double ks_critical_5pct(std::size_t n) {
  if (n == 0) throw ValidationError("ks_critical_5pct: n must be >= 1");
  return 1.36 / std::sqrt(static_cast<double>(n));
}

}  // namespace enerkin
