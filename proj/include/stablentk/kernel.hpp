#pragma once

#include "stablentk/linalg.hpp"
#include "stablentk/network.hpp"

namespace stablentk {

/// The two parts of the rescaled kernel: h1 collects the outer-weight
/// contributions w_i^2 <x_j, x_j'> I_j I_j', h2 the inner-weight
/// contributions relu(<w_i^(0), x_j>) relu(<w_i^(0), x_j'>), both scaled by
/// m^{-2/alpha}.
struct KernelPair {
  Matrix h1;
  Matrix h2;

  Matrix total() const { return h1 + h2; }
};

/// Learning-rate / kernel rescaling factor (log m)^{2/alpha}; 1 for the
/// alpha = 2 baseline.
double kernel_rescale(std::size_t m, double alpha);

/// H_m(W, X): Gram matrix of the full parameter gradients of the rescaled
/// output across the k inputs.
Matrix ntk(const NetworkWeights& w, const InputSet& x, double alpha);

/// (log m)^{2/alpha} H_m(W, X).
Matrix rescaled_ntk(const NetworkWeights& w, const InputSet& x, double alpha);

/// Direct assembly of the two kernel parts from activation patterns.
KernelPair decompose(const NetworkWeights& w, const InputSet& x, double alpha);

}  // namespace stablentk
