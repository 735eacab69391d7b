#include "stablentk/montecarlo.hpp"

namespace stablentk::mc::serial {

Matrix network_outputs(const InputSet& x, double alpha, const Batch& batch) {
  Matrix out(batch.replicates, x.count());
  for (std::size_t r = 0; r < batch.replicates; ++r) {
    Rng rng = replicate_rng(batch, r);
    const NetworkWeights w = init_weights(batch.width, x.dim(), alpha, rng);
    const std::vector<double> f = forward_rescaled(w, x, alpha);
    for (std::size_t j = 0; j < f.size(); ++j) out(r, j) = f[j];
  }
  return out;
}

std::vector<KernelPair> init_kernels(const InputSet& x, double alpha, const Batch& batch) {
  std::vector<KernelPair> out;
  out.reserve(batch.replicates);
  for (std::size_t r = 0; r < batch.replicates; ++r) {
    Rng rng = replicate_rng(batch, r);
    out.push_back(decompose(init_weights(batch.width, x.dim(), alpha, rng), x, alpha));
  }
  return out;
}

}  // namespace stablentk::mc::serial
