// Vectorized Chambers-Mallows-Stuck transform for symmetric standard draws.
// Built with vector math enabled (see src/CMakeLists.txt); the AVX2 clone is
// selected at load time when the CPU supports it.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "stablentk/stable.hpp"

namespace stablentk {

namespace {

constexpr std::size_t kChunk = 512;
// Every draw goes through a full block of this many lanes. A loop remainder
// would fall back to scalar libm, whose last bits differ from the vector
// routines, and results would then depend on where chunks end.
constexpr std::size_t kLanes = 8;
constexpr double kGuard = 1e-15;

// Branch-free clamp; std::clamp's reference semantics block vectorization.
inline double guard(double u) { return std::fmin(std::fmax(u, kGuard), 1.0 - kGuard); }

__attribute__((target_clones("avx512f", "avx2", "default")))
void cms_symmetric_kernel(const double* __restrict uniforms, double* __restrict out, std::size_t n, double alpha) {
  // n is a multiple of kLanes and both buffers are 64-byte aligned. Saying so
  // lets every lane take the same vector path with no scalar epilogue.
  n &= ~(kLanes - 1);
  uniforms = static_cast<const double*>(__builtin_assume_aligned(uniforms, 64));
  out = static_cast<double*>(__builtin_assume_aligned(out, 64));
  constexpr double pi = std::numbers::pi;
  if (alpha == 2.0) {
#pragma omp simd simdlen(8)
    for (std::size_t i = 0; i < n; ++i) {
      const double u1 = guard(uniforms[2 * i]);
      const double u2 = guard(uniforms[2 * i + 1]);
      out[i] = 2.0 * std::sin(pi * (u1 - 0.5)) * std::sqrt(-std::log(u2));
    }
  } else if (alpha == 1.0) {
#pragma omp simd simdlen(8)
    for (std::size_t i = 0; i < n; ++i) {
      const double u1 = guard(uniforms[2 * i]);
      // tan v = sin v / cos v with cos v = sin(pi min(u, 1 - u)), written so
      // fast-math cannot fold it back into tan: libmvec has no 8-lane tan,
      // and a mix of vector and scalar tan across lanes breaks chunk
      // independence.
      const double v = pi * (u1 - 0.5);
      out[i] = std::sin(v) / std::sin(pi * std::fmin(u1, 1.0 - u1));
    }
  } else {
    const double one_minus = 1.0 - alpha;
    const double tail_exp = one_minus / alpha;
    const double inv_alpha = 1.0 / alpha;
#pragma omp simd simdlen(8)
    for (std::size_t i = 0; i < n; ++i) {
      const double u1 = guard(uniforms[2 * i]);
      const double u2 = guard(uniforms[2 * i + 1]);
      const double v = pi * (u1 - 0.5);
      const double w = -std::log(u2);
      const double log_term = tail_exp * std::log(std::cos(one_minus * v) / w) - inv_alpha * std::log(std::cos(v));
      out[i] = std::sin(alpha * v) * std::exp(log_term);
    }
  }
}

}  // namespace

void sample_symmetric_standard(double alpha, Rng& rng, std::span<double> out) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("sample_symmetric_standard: alpha outside (0, 2]");
  alignas(64) std::array<double, 2 * kChunk> uniforms;
  alignas(64) std::array<double, kChunk> draws;
  for (std::size_t start = 0; start < out.size(); start += kChunk) {
    const std::size_t n = std::min(kChunk, out.size() - start);
    const std::size_t padded = (n + kLanes - 1) / kLanes * kLanes;
    rng.fill_uniform(std::span<double>(uniforms.data(), 2 * n));
    std::fill(uniforms.begin() + 2 * n, uniforms.begin() + 2 * padded, 0.5);
    cms_symmetric_kernel(uniforms.data(), draws.data(), padded, alpha);
    std::copy_n(draws.begin(), n, out.begin() + start);
  }
}

double sample_symmetric_standard(double alpha, Rng& rng) {
  double x;
  sample_symmetric_standard(alpha, rng, std::span<double>(&x, 1));
  return x;
}

}  // namespace stablentk
