#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stablentk/montecarlo.hpp"
#include "stablentk/parallel.hpp"
#include "stablentk/stable.hpp"

namespace stablentk::mc {

namespace {

constexpr std::size_t kNeuronChunk = 256;

void check_batch(const InputSet& x, double alpha, const Batch& batch) {
  if (batch.width < 2) throw std::invalid_argument("Monte Carlo batch: width must be >= 2");
  if (batch.replicates == 0) throw std::invalid_argument("Monte Carlo batch: no replicates requested");
  StableParams{alpha, 0.0, 1.0}.validate();
  if (x.count() == 0) throw std::invalid_argument("Monte Carlo batch: empty input set");
}

// Streams the weights of one replicate chunk by chunk in the init_weights
// order and calls visit(inner_row, outer) for each neuron.
template <class Visit>
void stream_neurons(const InputSet& x, double alpha, const Batch& batch, std::size_t r, Visit&& visit) {
  Rng rng = replicate_rng(batch, r);
  const std::size_t stride = x.dim() + 1;
  std::vector<double> draws(kNeuronChunk * stride);
  for (std::size_t start = 0; start < batch.width; start += kNeuronChunk) {
    const std::size_t n = std::min(kNeuronChunk, batch.width - start);
    std::span<double> block(draws.data(), n * stride);
    sample_symmetric_standard(alpha, rng, block);
    for (std::size_t i = 0; i < n; ++i) visit(block.data() + i * stride, block[i * stride + x.dim()]);
  }
}

}  // namespace

Rng replicate_rng(const Batch& batch, std::size_t r) {
  return Rng(batch.seed, {batch.tag, static_cast<std::uint64_t>(batch.width), static_cast<std::uint64_t>(r)});
}

Matrix network_outputs(const InputSet& x, double alpha, const Batch& batch, int workers) {
  check_batch(x, alpha, batch);
  const std::size_t k = x.count(), d = x.dim();
  const double scale = output_scale(batch.width, alpha);
  // Column-major copy of X so each input is contiguous.
  std::vector<double> xt(k * d);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t c = 0; c < d; ++c) xt[j * d + c] = x(c, j);

  auto rows = parallel_map(batch.replicates, workers, [&](std::size_t r) {
    std::vector<double> s(k, 0.0);
    stream_neurons(x, alpha, batch, r, [&](const double* inner, double outer) {
      for (std::size_t j = 0; j < k; ++j) {
        const double* xj = xt.data() + j * d;
        double a = 0.0;
        for (std::size_t c = 0; c < d; ++c) a += inner[c] * xj[c];
        if (a > 0.0) s[j] += outer * a;
      }
    });
    for (double& v : s) v *= scale;
    return s;
  });

  Matrix out(batch.replicates, k);
  for (std::size_t r = 0; r < rows.size(); ++r) std::copy(rows[r].begin(), rows[r].end(), out.row(r).begin());
  return out;
}

std::vector<KernelPair> init_kernels(const InputSet& x, double alpha, const Batch& batch, int workers) {
  check_batch(x, alpha, batch);
  const std::size_t k = x.count(), d = x.dim();
  const Matrix gram = x.gram();
  const double scale = std::pow(static_cast<double>(batch.width), -2.0 / alpha);
  std::vector<double> xt(k * d);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t c = 0; c < d; ++c) xt[j * d + c] = x(c, j);

  return parallel_map(batch.replicates, workers, [&](std::size_t r) {
    KernelPair p{Matrix(k, k), Matrix(k, k)};
    std::vector<double> act(k);
    stream_neurons(x, alpha, batch, r, [&](const double* inner, double outer) {
      for (std::size_t j = 0; j < k; ++j) {
        const double* xj = xt.data() + j * d;
        double a = 0.0;
        for (std::size_t c = 0; c < d; ++c) a += inner[c] * xj[c];
        act[j] = a > 0.0 ? a : 0.0;
      }
      const double w2 = outer * outer;
      for (std::size_t j = 0; j < k; ++j) {
        if (act[j] == 0.0) continue;
        for (std::size_t l = 0; l < k; ++l) {
          if (act[l] == 0.0) continue;
          p.h1(j, l) += w2 * gram(j, l);
          p.h2(j, l) += act[j] * act[l];
        }
      }
    });
    p.h1 *= scale;
    p.h2 *= scale;
    return p;
  });
}

}  // namespace stablentk::mc
