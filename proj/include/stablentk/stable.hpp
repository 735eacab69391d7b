#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "stablentk/rng.hpp"

namespace stablentk {

/// Parameters of a one-dimensional stable law in the characteristic-exponent
/// convention
///
///   log E exp(izS) = -sigma^alpha |z|^alpha (1 - i beta sign(z) tan(pi alpha / 2))   (alpha != 1)
///   log E exp(izS) = -sigma |z| (1 + i beta (2/pi) sign(z) log|z|)                   (alpha == 1)
///
/// With beta = 0 this is St(alpha, sigma); alpha = 2 is Gaussian with variance
/// 2 sigma^2.
struct StableParams {
  double alpha = 2.0;
  double beta = 0.0;
  double sigma = 1.0;

  /// Throws std::invalid_argument unless 0 < alpha <= 2, |beta| <= 1 and
  /// sigma > 0.
  void validate() const;
};

/// Tail constant C_alpha relating the spectral measure to the radial tail:
/// r^alpha P(|S| > r, S/|S| in B) -> C_alpha Gamma(B). Defined for alpha in
/// (0, 2); equals 2/pi at alpha = 1.
double c_alpha(double alpha);

/// One draw from the stable law (Chambers-Mallows-Stuck transform).
double sample_stable(const StableParams& params, Rng& rng);

/// Fills `out` with i.i.d. St(alpha, 1) draws (two uniforms consumed per
/// draw, in order). This is the vectorized hot path behind every network
/// weight; the result for a given stream does not depend on how `out` is
/// chunked.
void sample_symmetric_standard(double alpha, Rng& rng, std::span<double> out);

/// Single St(alpha, 1) draw through the same vectorized transform.
double sample_symmetric_standard(double alpha, Rng& rng);

/// A finite measure on the unit sphere of R^dim, stored as weighted atoms.
/// Atoms with zero weight or zero-norm direction are dropped on insertion;
/// directions are normalized to unit length.
class DiscreteSpectralMeasure {
 public:
  struct Atom {
    std::vector<double> direction;
    double weight = 0.0;
  };

  explicit DiscreteSpectralMeasure(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  bool empty() const { return atoms_.empty(); }
  double total_mass() const;

  /// Adds `weight` at direction/|direction|. Throws on negative or non-finite
  /// weight and on length mismatch; silently ignores zero weight or a zero
  /// vector.
  void add(std::span<const double> direction, double weight);

  /// Adds `weight` at +direction and at -direction.
  void add_symmetric_pair(std::span<const double> direction, double weight);

  /// Multiplies every weight by c > 0.
  DiscreteSpectralMeasure scaled(double c) const;

  /// True when the atom multiset is invariant under negation with equal
  /// weights (to `tol`).
  bool is_symmetric(double tol = 1e-12) const;

 private:
  std::size_t dim_;
  std::vector<Atom> atoms_;
};

/// exp(-sum_i gamma_i |<z, s_i>|^alpha).
std::complex<double> cf_symmetric(std::span<const double> z, const DiscreteSpectralMeasure& gamma,
                                  double alpha);

/// Characteristic exponent with the one-sided skew term; alpha == 1 uses the
/// logarithmic form. psi(0) = 0 and Re psi <= 0.
std::complex<double> characteristic_exponent(std::span<const double> z,
                                             const DiscreteSpectralMeasure& gamma, double alpha);

/// exp(characteristic_exponent(z, gamma, alpha)).
std::complex<double> cf_skewed(std::span<const double> z, const DiscreteSpectralMeasure& gamma,
                               double alpha);

/// Scale of coordinate `r` (0-based) of St_k(alpha, gamma):
/// (sum_i gamma_i |s_{i,r}|^alpha)^{1/alpha}.
double projection_scale(const DiscreteSpectralMeasure& gamma, double alpha, std::size_t r);

/// One draw of the stable vector with spectral measure `gamma` (strictly
/// stable, no drift), built atom-wise from independent totally skewed
/// standard draws: sum_i gamma_i^{1/alpha} s_i zeta_i. The alpha == 1 case
/// adds the logarithmic centering (2/pi) gamma_i log(gamma_i) s_i per atom.
std::vector<double> sample_discrete_spectral(const DiscreteSpectralMeasure& gamma, double alpha,
                                             Rng& rng);

}  // namespace stablentk
