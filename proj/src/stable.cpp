#include "stablentk/stable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace stablentk {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUniformGuard = 1e-15;

// Angle V ~ U(-pi/2, pi/2) and exponential W, with the uniform variates held
// away from the endpoints so cos(V) and W stay strictly positive.
struct CmsVariates {
  double v;
  double w;
};

CmsVariates draw_cms(Rng& rng) {
  const double u1 = std::clamp(rng.uniform(), kUniformGuard, 1.0 - kUniformGuard);
  const double u2 = std::clamp(rng.uniform(), kUniformGuard, 1.0 - kUniformGuard);
  return {kPi * (u1 - 0.5), -std::log(u2)};
}

double symmetric_cms(double alpha, const CmsVariates& cv) {
  if (alpha == 2.0) return 2.0 * std::sin(cv.v) * std::sqrt(cv.w);
  if (alpha == 1.0) return std::tan(cv.v);
  const double one_minus = 1.0 - alpha;
  const double log_term = (one_minus / alpha) * std::log(std::cos(one_minus * cv.v) / cv.w) -
                          std::log(std::cos(cv.v)) / alpha;
  return std::sin(alpha * cv.v) * std::exp(log_term);
}

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

void StableParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw std::invalid_argument("StableParams: alpha must lie in (0, 2], got " + std::to_string(alpha));
  if (!(std::abs(beta) <= 1.0))
    throw std::invalid_argument("StableParams: beta must lie in [-1, 1], got " + std::to_string(beta));
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("StableParams: sigma must be positive, got " + std::to_string(sigma));
}

double c_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("c_alpha: alpha must lie in (0, 2), got " + std::to_string(alpha));
  if (alpha == 1.0) return 2.0 / kPi;
  return (1.0 - alpha) / (std::tgamma(2.0 - alpha) * std::cos(kPi * alpha / 2.0));
}

double sample_stable(const StableParams& p, Rng& rng) {
  p.validate();
  const CmsVariates cv = draw_cms(rng);
  if (p.beta == 0.0) return p.sigma * symmetric_cms(p.alpha, cv);

  if (p.alpha == 1.0) {
    const double half_pi = kPi / 2.0;
    const double shifted = half_pi + p.beta * cv.v;
    const double x = (2.0 / kPi) * (shifted * std::tan(cv.v) -
                                    p.beta * std::log(half_pi * cv.w * std::cos(cv.v) / shifted));
    return p.sigma * x + (2.0 / kPi) * p.beta * p.sigma * std::log(p.sigma);
  }

  const double skew = p.beta * std::tan(kPi * p.alpha / 2.0);
  const double b = std::atan(skew) / p.alpha;
  const double s = std::pow(1.0 + skew * skew, 1.0 / (2.0 * p.alpha));
  const double a_vb = p.alpha * (cv.v + b);
  const double x = s * std::sin(a_vb) / std::pow(std::cos(cv.v), 1.0 / p.alpha) *
                   std::pow(std::cos(cv.v - a_vb) / cv.w, (1.0 - p.alpha) / p.alpha);
  return p.sigma * x;
}

double DiscreteSpectralMeasure::total_mass() const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.weight;
  return s;
}

void DiscreteSpectralMeasure::add(std::span<const double> direction, double weight) {
  if (direction.size() != dim_)
    throw std::invalid_argument("DiscreteSpectralMeasure::add: direction has length " +
                                std::to_string(direction.size()) + ", expected " + std::to_string(dim_));
  if (!(weight >= 0.0) || !std::isfinite(weight))
    throw std::invalid_argument("DiscreteSpectralMeasure::add: weight must be finite and >= 0");
  double n2 = 0.0;
  for (double v : direction) n2 += v * v;
  if (weight == 0.0 || n2 == 0.0) return;
  const double n = std::sqrt(n2);
  Atom atom{std::vector<double>(direction.begin(), direction.end()), weight};
  for (double& v : atom.direction) v /= n;
  atoms_.push_back(std::move(atom));
}

void DiscreteSpectralMeasure::add_symmetric_pair(std::span<const double> direction, double weight) {
  add(direction, weight);
  std::vector<double> neg(direction.begin(), direction.end());
  for (double& v : neg) v = -v;
  add(neg, weight);
}

DiscreteSpectralMeasure DiscreteSpectralMeasure::scaled(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("DiscreteSpectralMeasure::scaled: factor must be positive");
  DiscreteSpectralMeasure out(dim_);
  out.atoms_ = atoms_;
  for (Atom& a : out.atoms_) a.weight *= c;
  return out;
}

bool DiscreteSpectralMeasure::is_symmetric(double tol) const {
  std::vector<bool> used(atoms_.size(), false);
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (used[i]) continue;
    bool matched = false;
    for (std::size_t j = 0; j < atoms_.size() && !matched; ++j) {
      if (j == i || used[j]) continue;
      if (std::abs(atoms_[i].weight - atoms_[j].weight) > tol) continue;
      bool opposite = true;
      for (std::size_t c = 0; c < dim_ && opposite; ++c)
        opposite = std::abs(atoms_[i].direction[c] + atoms_[j].direction[c]) <= tol;
      if (opposite) {
        used[i] = used[j] = true;
        matched = true;
      }
    }
    if (!matched) return false;
  }
  return true;
}

namespace {

void check_dim(std::span<const double> z, const DiscreteSpectralMeasure& gamma) {
  if (z.size() != gamma.dim())
    throw std::invalid_argument("characteristic function: argument has length " + std::to_string(z.size()) +
                                ", measure has dimension " + std::to_string(gamma.dim()));
}

double project(std::span<const double> z, const std::vector<double>& s) {
  double p = 0.0;
  for (std::size_t c = 0; c < z.size(); ++c) p += z[c] * s[c];
  return p;
}

}  // namespace

std::complex<double> cf_symmetric(std::span<const double> z, const DiscreteSpectralMeasure& gamma,
                                  double alpha) {
  check_dim(z, gamma);
  double e = 0.0;
  for (const auto& a : gamma.atoms()) e += a.weight * std::pow(std::abs(project(z, a.direction)), alpha);
  return {std::exp(-e), 0.0};
}

std::complex<double> characteristic_exponent(std::span<const double> z,
                                             const DiscreteSpectralMeasure& gamma, double alpha) {
  check_dim(z, gamma);
  double re = 0.0, im = 0.0;
  if (alpha == 1.0) {
    for (const auto& a : gamma.atoms()) {
      const double p = project(z, a.direction);
      if (p == 0.0) continue;
      re -= a.weight * std::abs(p);
      im -= a.weight * std::abs(p) * (2.0 / kPi) * sgn(p) * std::log(std::abs(p));
    }
  } else {
    const double t = std::tan(kPi * alpha / 2.0);
    for (const auto& a : gamma.atoms()) {
      const double p = project(z, a.direction);
      const double mag = a.weight * std::pow(std::abs(p), alpha);
      re -= mag;
      im += mag * sgn(p) * t;
    }
  }
  return {re, im};
}

std::complex<double> cf_skewed(std::span<const double> z, const DiscreteSpectralMeasure& gamma,
                               double alpha) {
  return std::exp(characteristic_exponent(z, gamma, alpha));
}

double projection_scale(const DiscreteSpectralMeasure& gamma, double alpha, std::size_t r) {
  if (r >= gamma.dim()) throw std::invalid_argument("projection_scale: coordinate out of range");
  double s = 0.0;
  for (const auto& a : gamma.atoms()) s += a.weight * std::pow(std::abs(a.direction[r]), alpha);
  return std::pow(s, 1.0 / alpha);
}

std::vector<double> sample_discrete_spectral(const DiscreteSpectralMeasure& gamma, double alpha,
                                             Rng& rng) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("sample_discrete_spectral: alpha must lie in (0, 2)");
  std::vector<double> out(gamma.dim(), 0.0);
  const StableParams one_sided{alpha, 1.0, 1.0};
  for (const auto& a : gamma.atoms()) {
    const double zeta = sample_stable(one_sided, rng);
    double coef;
    if (alpha == 1.0)
      coef = a.weight * zeta + (2.0 / kPi) * a.weight * std::log(a.weight);
    else
      coef = std::pow(a.weight, 1.0 / alpha) * zeta;
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += coef * a.direction[c];
  }
  return out;
}

}  // namespace stablentk
