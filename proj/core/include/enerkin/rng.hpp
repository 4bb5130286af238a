#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace enerkin {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of stream `index` under `master`:
///   stream_seed = splitmix64(splitmix64(master) ^ splitmix64(index + 1)).
/// `run` uses stream 0; ensemble replica k uses stream k.
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 1));
}

/// 64-bit Mersenne Twister with distribution helpers written out explicitly,
/// so draws do not depend on the standard library's distribution algorithms.
class Rng {
  __extension__ using u128 = unsigned __int128;

 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open0() { return 1.0 - uniform(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Exponential with the given rate (> 0).
  double exponential(double rate) { return -std::log(uniform_open0()) / rate; }

  /// Uniform integer in [0, n); n > 0. Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t n) {
    while (true) {
      const auto x = engine_();
      const auto m = static_cast<u128>(x) * n;
      const auto low = static_cast<std::uint64_t>(m);
      if (low >= n || low >= (0 - n) % n) return static_cast<std::uint64_t>(m >> 64);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace enerkin
