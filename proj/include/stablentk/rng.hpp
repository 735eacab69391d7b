#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>

namespace stablentk {

/// Mixes a master seed with a path of indices (experiment phase, width
/// index, replicate, ...) into a 64-bit stream key. Every Monte Carlo
/// replicate owns the stream keyed by its own path, so results never depend
/// on how replicates are partitioned across workers.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// Seeded generator for one replicate stream: xoshiro256++ with its state
/// expanded from the 64-bit key by splitmix64. Satisfies
/// UniformRandomBitGenerator. All conversions to floating point are done
/// here, so draws do not depend on the standard library's distributions.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);
  Rng(std::uint64_t master, std::initializer_list<std::uint64_t> path)
      : Rng(derive_seed(master, path)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Fills `out` with uniform() draws, in order.
  void fill_uniform(std::span<double> out) {
    for (double& u : out) u = uniform();
  }

  double exponential();

  /// Standard normal variate (Marsaglia polar method).
  double normal();

  /// Integer uniform on [0, n), n > 0.
  std::uint64_t below(std::uint64_t n);

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace stablentk
