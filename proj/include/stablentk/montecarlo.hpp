#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stablentk/kernel.hpp"
#include "stablentk/linalg.hpp"
#include "stablentk/network.hpp"

namespace stablentk::mc {

/// Identifies a batch of replicates: replicate r of width m draws its weights
/// from Rng(seed, {tag, m, r}).
struct Batch {
  std::uint64_t seed = 0;
  std::uint64_t tag = 0;
  std::size_t width = 2;
  std::size_t replicates = 0;
};

/// The generator of one replicate.
Rng replicate_rng(const Batch& batch, std::size_t r);

/// Rescaled outputs of `replicates` independent networks at initialization,
/// one row per replicate (replicates x k). Weights are streamed in chunks and
/// never stored; row r equals forward_rescaled(init_weights(m, d, alpha,
/// replicate_rng(batch, r)), x, alpha) bit for bit.
Matrix network_outputs(const InputSet& x, double alpha, const Batch& batch, int workers = 0);

/// Kernel parts at initialization for each replicate; element r equals
/// decompose(init_weights(...replicate_rng(batch, r)), x, alpha) bit for bit.
std::vector<KernelPair> init_kernels(const InputSet& x, double alpha, const Batch& batch, int workers = 0);

namespace serial {

/// Reference implementations: one thread, full weight materialization,
/// evaluated through the network and kernel modules directly.
Matrix network_outputs(const InputSet& x, double alpha, const Batch& batch);
std::vector<KernelPair> init_kernels(const InputSet& x, double alpha, const Batch& batch);

}  // namespace serial

}  // namespace stablentk::mc
