#pragma once

#include <cstddef>

#include "stablentk/network.hpp"
#include "stablentk/rng.hpp"

namespace stablentk {

/// x_j = e_j, j = 1..k (requires k <= d). Flagged unit norm.
InputSet axis_aligned_inputs(std::size_t d, std::size_t k);

/// k i.i.d. uniform points on the unit sphere of R^d. Flagged unit norm.
InputSet random_unit_sphere_inputs(std::size_t d, std::size_t k, Rng& rng);

/// k random orthonormal vectors in R^d (Gram-Schmidt on Gaussian vectors,
/// k <= d). Flagged unit norm.
InputSet random_orthonormal_inputs(std::size_t d, std::size_t k, Rng& rng);

/// Wraps explicit columns; flagged unit norm when every column has norm 1
/// within 1e-12.
InputSet explicit_inputs(const std::vector<std::vector<double>>& columns);

}  // namespace stablentk
