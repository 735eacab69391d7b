#include "stablentk/limits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stablentk {

std::uint64_t RegionIndex::code() const {
  if (u.size() > 63) throw std::invalid_argument("RegionIndex: at most 63 inputs supported");
  std::uint64_t c = 0;
  for (std::size_t j = 0; j < u.size(); ++j)
    if (u[j]) c |= std::uint64_t{1} << j;
  return c;
}

RegionIndex RegionIndex::from_code(std::uint64_t code, std::size_t k) {
  RegionIndex r;
  r.u.resize(k);
  for (std::size_t j = 0; j < k; ++j) r.u[j] = (code >> j) & 1U;
  return r;
}

bool RegionIndex::all_zero() const {
  for (auto b : u)
    if (b) return false;
  return true;
}

RegionIndex region_of(std::span<const double> v, const InputSet& x) {
  if (v.size() != x.dim()) throw std::invalid_argument("region_of: vector length does not match input dimension");
  RegionIndex r;
  r.u.resize(x.count());
  for (std::size_t j = 0; j < x.count(); ++j) {
    double a = 0.0;
    for (std::size_t c = 0; c < x.dim(); ++c) a += v[c] * x(c, j);
    r.u[j] = a > 0.0 ? 1 : 0;
  }
  return r;
}

namespace {

constexpr std::size_t kMinOrthantSamples = 10000;

void check_k(const InputSet& x) {
  if (x.count() > 20) throw std::invalid_argument("orthant_probs: at most 20 inputs supported");
}

}  // namespace

bool axis_aligned(const InputSet& x) {
  if (x.count() > x.dim()) return false;
  std::vector<bool> used(x.dim(), false);
  for (std::size_t j = 0; j < x.count(); ++j) {
    std::size_t hit = x.dim();
    for (std::size_t c = 0; c < x.dim(); ++c) {
      const double v = x(c, j);
      if (v == 1.0 && hit == x.dim()) {
        hit = c;
      } else if (v != 0.0) {
        return false;
      }
    }
    if (hit == x.dim() || used[hit]) return false;
    used[hit] = true;
  }
  return true;
}

std::vector<OrthantEstimate> orthant_probs(const InputSet& x, double alpha, std::size_t n, Rng& rng) {
  check_k(x);
  const std::size_t k = x.count();
  const std::size_t regions = std::size_t{1} << k;
  std::vector<OrthantEstimate> out(regions);
  if (axis_aligned(x)) {
    for (auto& e : out) e.p = 1.0 / static_cast<double>(regions);
    return out;
  }
  if (n < kMinOrthantSamples) throw std::invalid_argument("orthant_probs: need at least 10^4 samples");
  std::vector<std::size_t> counts(regions, 0);
  std::vector<double> v(x.dim());
  for (std::size_t s = 0; s < n; ++s) {
    sample_symmetric_standard(alpha, rng, v);
    ++counts[region_of(v, x).code()];
  }
  const double nd = static_cast<double>(n);
  for (std::size_t r = 0; r < regions; ++r) {
    const double p = static_cast<double>(counts[r]) / nd;
    out[r] = {p, std::sqrt(p * (1.0 - p) / nd)};
  }
  return out;
}

OrthantEstimate orthant_prob(const InputSet& x, const RegionIndex& u, double alpha, std::size_t n, Rng& rng) {
  if (u.u.size() != x.count()) throw std::invalid_argument("orthant_prob: region length does not match input count");
  return orthant_probs(x, alpha, n, rng)[u.code()];
}

DiscreteSpectralMeasure spectral_gamma_X(const InputSet& x, double alpha) {
  const double ca = c_alpha(alpha);
  const std::size_t k = x.count();
  DiscreteSpectralMeasure gamma(k);
  bool any = false;
  std::vector<double> pos(k), neg(k);
  for (std::size_t i = 0; i < x.dim(); ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double v = x(i, j);
      pos[j] = v > 0.0 ? v : 0.0;
      neg[j] = v < 0.0 ? v : 0.0;
      any = any || v != 0.0;
    }
    const double np = norm2(pos), nn = norm2(neg);
    if (np > 0.0) gamma.add_symmetric_pair(pos, ca / 4.0 * std::pow(np, alpha));
    if (nn > 0.0) gamma.add_symmetric_pair(neg, ca / 4.0 * std::pow(nn, alpha));
  }
  if (!any) throw std::invalid_argument("spectral_gamma_X: input matrix is zero");
  return gamma;
}

std::string to_string(PrefactorMode mode) {
  return mode == PrefactorMode::paper_literal ? "paper_literal" : "tail_consistent";
}

PrefactorMode prefactor_mode_from_string(const std::string& name) {
  if (name == "paper_literal") return PrefactorMode::paper_literal;
  if (name == "tail_consistent") return PrefactorMode::tail_consistent;
  throw std::invalid_argument("unknown prefactor mode '" + name + "' (expected paper_literal or tail_consistent)");
}

double gamma_star_1_prefactor(double alpha, PrefactorMode mode) {
  const double ch = c_alpha(alpha / 2.0);
  return mode == PrefactorMode::paper_literal ? ch : c_alpha(alpha) / ch;
}

double gamma_star_2_prefactor(double alpha, PrefactorMode mode) {
  const double ch = c_alpha(alpha / 2.0);
  return mode == PrefactorMode::paper_literal ? ch : c_alpha(alpha) / (2.0 * ch);
}

DiscreteSpectralMeasure gamma_star_1(const InputSet& x, double alpha, const std::vector<OrthantEstimate>& probs,
                                     PrefactorMode mode) {
  check_k(x);
  const std::size_t k = x.count();
  const std::size_t regions = std::size_t{1} << k;
  if (probs.size() != regions) throw std::invalid_argument("gamma_star_1: need one probability per region");
  const double pref = gamma_star_1_prefactor(alpha, mode);
  const Matrix g = x.gram();
  DiscreteSpectralMeasure out(k * k);
  std::vector<double> flat(k * k);
  for (std::size_t code = 1; code < regions; ++code) {
    const RegionIndex u = RegionIndex::from_code(code, k);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t l = 0; l < k; ++l) flat[j * k + l] = g(j, l) * u.u[j] * u.u[l];
    const double norm = norm2(flat);
    if (norm == 0.0) continue;
    out.add(flat, pref * probs[code].p * std::pow(norm, alpha / 2.0));
  }
  return out;
}

DiscreteSpectralMeasure gamma_star_2(const InputSet& x, double alpha, PrefactorMode mode) {
  const std::size_t k = x.count();
  const double pref = gamma_star_2_prefactor(alpha, mode);
  DiscreteSpectralMeasure out(k * k);
  std::vector<double> masked(k), flat(k * k);
  for (std::size_t i = 0; i < x.dim(); ++i) {
    for (double s : {1.0, -1.0}) {
      double n2 = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        // u_j = 1 iff <s e_i, x_j> = s x_ji > 0.
        masked[j] = s * x(i, j) > 0.0 ? x(i, j) : 0.0;
        n2 += masked[j] * masked[j];
      }
      if (n2 == 0.0) continue;
      for (std::size_t j = 0; j < k; ++j)
        for (std::size_t l = 0; l < k; ++l) flat[j * k + l] = masked[j] * masked[l];
      out.add(flat, pref * std::pow(n2, alpha / 2.0));
    }
  }
  return out;
}

LimitKernelLaw make_limit_kernel_law(const InputSet& x, double alpha, const std::vector<OrthantEstimate>& probs,
                                     PrefactorMode mode) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("limit kernel: alpha must lie in (0, 2)");
  return {x.count(), alpha / 2.0, gamma_star_1(x, alpha, probs, mode), gamma_star_2(x, alpha, mode), mode};
}

std::vector<double> sample_limit_process(const DiscreteSpectralMeasure& gamma_x, double alpha, Rng& rng) {
  return sample_discrete_spectral(gamma_x, alpha, rng);
}

Matrix reshape_square(std::span<const double> flat, std::size_t k) {
  if (flat.size() != k * k) throw std::invalid_argument("reshape_square: length is not k*k");
  Matrix m(k, k);
  std::copy(flat.begin(), flat.end(), m.data().begin());
  return m;
}

LimitKernelDraw sample_limit_kernel(const LimitKernelLaw& law, Rng& rng) {
  if (law.gamma1.dim() != law.k * law.k || law.gamma2.dim() != law.k * law.k)
    throw std::invalid_argument("sample_limit_kernel: measure dimension does not match k*k");
  LimitKernelDraw d{reshape_square(sample_discrete_spectral(law.gamma1, law.alpha_half, rng), law.k),
                    reshape_square(sample_discrete_spectral(law.gamma2, law.alpha_half, rng), law.k)};
  return d;
}

}  // namespace stablentk
