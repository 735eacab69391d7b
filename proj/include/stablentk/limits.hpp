#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "stablentk/linalg.hpp"
#include "stablentk/network.hpp"
#include "stablentk/rng.hpp"
#include "stablentk/stable.hpp"

namespace stablentk {

/// ReLU on/off pattern u in {0,1}^k. Bit j of code() is u_j.
struct RegionIndex {
  std::vector<std::uint8_t> u;

  std::uint64_t code() const;
  static RegionIndex from_code(std::uint64_t code, std::size_t k);
  bool all_zero() const;
};

/// u_j = 1 iff <v, x_j> > 0; the boundary goes to 0.
RegionIndex region_of(std::span<const double> v, const InputSet& x);

struct OrthantEstimate {
  double p = 0.0;
  double standard_error = 0.0;
};

/// Monte Carlo estimate of P(w in B_u) for w with i.i.d. St(alpha, 1)
/// components, from n >= 10^4 draws.
OrthantEstimate orthant_prob(const InputSet& x, const RegionIndex& u, double alpha, std::size_t n, Rng& rng);

/// Estimates for every region at once from a single sample, indexed by
/// RegionIndex::code(); they sum to 1 exactly. When the inputs are distinct
/// standard basis vectors the exact value 2^{-k} is returned with zero
/// standard error and `rng` is not touched.
std::vector<OrthantEstimate> orthant_probs(const InputSet& x, double alpha, std::size_t n, Rng& rng);

/// True when the columns of `x` are distinct standard basis vectors e_i.
bool axis_aligned(const InputSet& x);

/// Spectral measure Gamma_X of the alpha-stable limit of the rescaled network
/// output: (C_alpha/4) sum_i (||p_i||^alpha D_i^+ + ||n_i||^alpha D_i^-),
/// where p_i, n_i are the positive and negative parts of row i of X and
/// D^± puts unit mass at ±p_i/||p_i|| (resp. n_i). Vanishing parts are skipped.
DiscreteSpectralMeasure spectral_gamma_X(const InputSet& x, double alpha);

/// Constant in front of the limit-kernel spectral measures.
///   paper_literal:   C_{alpha/2} for both parts
///   tail_consistent: C_alpha / C_{alpha/2} for the outer-weight part and
///                    C_alpha / (2 C_{alpha/2}) for the inner-weight part,
///                    which is what matching the summand tails gives.
enum class PrefactorMode { paper_literal, tail_consistent };

std::string to_string(PrefactorMode mode);
PrefactorMode prefactor_mode_from_string(const std::string& name);

double gamma_star_1_prefactor(double alpha, PrefactorMode mode);
double gamma_star_2_prefactor(double alpha, PrefactorMode mode);

/// Spectral measure of the limit of the outer-weight kernel part, over
/// flattened k x k matrices: one atom per region u != 0 with direction the
/// normalized masked Gram matrix and weight prefactor * P(B_u) * ||G_u||_F^{alpha/2}.
/// `probs` is indexed by RegionIndex::code().
DiscreteSpectralMeasure gamma_star_1(const InputSet& x, double alpha, const std::vector<OrthantEstimate>& probs,
                                     PrefactorMode mode);

/// Spectral measure of the limit of the inner-weight kernel part: one rank-1
/// atom per coordinate i and sign s with s e_i landing in a region whose
/// masked row of X is nonzero. Deterministic.
DiscreteSpectralMeasure gamma_star_2(const InputSet& x, double alpha, PrefactorMode mode);

/// Law of the (alpha/2)-stable limit kernel: sum of two independent one-sided
/// stable matrices with spectral measures gamma1 and gamma2.
struct LimitKernelLaw {
  std::size_t k = 0;
  double alpha_half = 0.0;
  DiscreteSpectralMeasure gamma1{0};
  DiscreteSpectralMeasure gamma2{0};
  PrefactorMode mode = PrefactorMode::tail_consistent;
};

LimitKernelLaw make_limit_kernel_law(const InputSet& x, double alpha, const std::vector<OrthantEstimate>& probs,
                                     PrefactorMode mode);

/// One draw of the limit process f(X).
std::vector<double> sample_limit_process(const DiscreteSpectralMeasure& gamma_x, double alpha, Rng& rng);

/// One draw of the limit kernel, as k x k matrix, together with its parts.
struct LimitKernelDraw {
  Matrix h1;
  Matrix h2;
  Matrix total() const { return h1 + h2; }
};
LimitKernelDraw sample_limit_kernel(const LimitKernelLaw& law, Rng& rng);

/// Reshapes a flattened row-major k*k vector.
Matrix reshape_square(std::span<const double> flat, std::size_t k);

}  // namespace stablentk
