#include "stablentk/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace stablentk {

namespace {

// Everything one Euler step and the diagnostics need at the current weights.
struct State {
  std::vector<double> act;  // m x k, relu(<w_i^(0), x_j>), row-major by neuron
  std::vector<double> f;    // rescaled outputs
  std::vector<double> resid;  // f - y
};

void check_shapes(const NetworkWeights& w, const InputSet& x, std::span<const double> y) {
  if (w.input_dim() != x.dim()) throw std::invalid_argument("training: input dimension does not match weights");
  if (y.size() != x.count()) throw std::invalid_argument("training: target length does not match input count");
  if (w.width() < 2) throw std::invalid_argument("training: width must be >= 2");
}

// Inputs stored input-major so each x_j is contiguous.
std::vector<double> transposed(const InputSet& x) {
  std::vector<double> xt(x.count() * x.dim());
  for (std::size_t j = 0; j < x.count(); ++j)
    for (std::size_t c = 0; c < x.dim(); ++c) xt[j * x.dim() + c] = x(c, j);
  return xt;
}

State evaluate(const NetworkWeights& w, const InputSet& x, std::span<const double> y, double alpha) {
  const std::size_t m = w.width(), k = x.count(), d = x.dim();
  const double scale = output_scale(m, alpha);
  State s;
  s.act.assign(m * k, 0.0);
  s.f.assign(k, 0.0);
  const std::vector<double> xt = transposed(x);
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = w.inner.row(i).data();
    for (std::size_t j = 0; j < k; ++j) {
      const double* xj = xt.data() + j * d;
      double a = 0.0;
      for (std::size_t c = 0; c < d; ++c) a += row[c] * xj[c];
      // Branch-free: activation patterns are close to random.
      a = a > 0.0 ? a : 0.0;
      s.act[i * k + j] = a;
      s.f[j] += w.outer[i] * a;
    }
  }
  s.resid.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    s.f[j] *= scale;
    s.resid[j] = s.f[j] - y[j];
  }
  return s;
}

double sum_squares(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return s;
}

NetworkWeights apply_step(const NetworkWeights& w, const InputSet& x, const State& s, double dt, double eta,
                          double alpha) {
  const std::size_t m = w.width(), k = x.count(), d = x.dim();
  const double c = dt * eta * output_scale(m, alpha);
  NetworkWeights next = w;
  const std::vector<double> xt = transposed(x);
  std::vector<double> dir(d);
  for (std::size_t i = 0; i < m; ++i) {
    const double* a = s.act.data() + i * k;
    double g_outer = 0.0;
    std::fill(dir.begin(), dir.end(), 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      g_outer += s.resid[j] * a[j];
      const double r = a[j] > 0.0 ? s.resid[j] : 0.0;
      for (std::size_t cc = 0; cc < d; ++cc) dir[cc] += r * xt[j * d + cc];
    }
    next.outer[i] -= c * g_outer;
    for (std::size_t cc = 0; cc < d; ++cc) next.inner(i, cc) -= c * w.outer[i] * dir[cc];
  }
  return next;
}

std::string divergence_message(double before, double after, double dt) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "training diverged: loss grew from %.6g to %.6g in one step of dt = %.6g; "
                "reduce dt below 2 / (eta lambda_max(H~) / (log m)^{2/alpha})",
                before, after, dt);
  return buf;
}


// Gradient flow state in a lane-friendly layout: neuron index innermost,
// padded with zero neurons to a multiple of kLanes (a zero neuron has zero
// activation and zero gradient, so it never moves). One pass per step
// applies the Euler update and accumulates everything the diagnostics need
// at the new weights.
class Flow {
 public:
  static constexpr std::size_t kLanes = 8;

  Flow(const NetworkWeights& w0, const InputSet& x)
      : m_(w0.width()), d_(x.dim()), k_(x.count()), padded((m_ + kLanes - 1) / kLanes * kLanes),
        inner_(d_ * padded, 0.0), outer_(padded, 0.0), x_(d_ * k_) {
    for (std::size_t i = 0; i < m_; ++i) {
      outer_[i] = w0.outer[i];
      for (std::size_t c = 0; c < d_; ++c) inner_[c * padded + i] = w0.inner(i, c);
    }
    for (std::size_t c = 0; c < d_; ++c)
      for (std::size_t j = 0; j < k_; ++j) x_[c * k_ + j] = x(c, j);
    inner0_ = inner_;
    outer0_ = outer_;
    act.assign(k_ * padded, 0.0);
    f.assign(k_, 0.0);
    s1.assign(k_ * k_, 0.0);
    s2.assign(k_ * k_, 0.0);
  }

  /// Activations and sums at the current weights.
  void evaluate() { pass(nullptr, 0.0); }

  /// One Euler step with residuals `resid` (taken at the current
  /// activations) and step factor dt * eta * output_scale, then evaluate().
  void advance(const std::vector<double>& resid, double coef) { pass(resid.data(), coef); }

  NetworkWeights weights() const {
    NetworkWeights w;
    w.inner = Matrix(m_, d_);
    w.outer.assign(outer_.begin(), outer_.begin() + static_cast<std::ptrdiff_t>(m_));
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t c = 0; c < d_; ++c) w.inner(i, c) = inner_[c * padded + i];
    return w;
  }

 private:
  std::size_t m_, d_, k_;

 public:
  std::size_t padded;
  std::vector<double> act;  ///< k x padded, relu(<w_i^(0), x_j>)
  std::vector<double> f;    ///< raw outputs sum_i w_i act_ji
  std::vector<double> s1;   ///< k x k, sum_i w_i^2 I_ji I_li
  std::vector<double> s2;   ///< k x k, sum_i act_ji act_li
  double drift2 = 0.0;      ///< ||W - W(0)||_F^2

 private:
  std::vector<double> inner_, outer_, inner0_, outer0_;
  std::vector<double> x_;  // d x k

  // Clones only widen the vectors; training.cpp is built without FMA
  // contraction, so every clone produces the same bits.
  __attribute__((target_clones("avx512f", "avx2", "default")))
  void pass(const double* resid, double coef) {
    const std::size_t k = k_, d = d_, P = padded;
    const std::size_t pairs = k * (k + 1) / 2;
    std::fill(f.begin(), f.end(), 0.0);
    // Lane accumulators: s1 and s2 upper triangles, drift.
    std::vector<double> acc((2 * pairs + 1) * kLanes, 0.0);
    double* acc_s1 = acc.data();
    double* acc_s2 = acc_s1 + pairs * kLanes;
    double* acc_d = acc_s2 + pairs * kLanes;
    alignas(64) double v[kLanes], dv[kLanes], tmp[kLanes];
    std::vector<double> dir(d * kLanes);

    for (std::size_t b = 0; b < P; b += kLanes) {
      double* out = outer_.data() + b;
      if (resid) {
        // Gradient at the current activations, then the update.
        std::fill(dir.begin(), dir.end(), 0.0);
#pragma omp simd
        for (std::size_t l = 0; l < kLanes; ++l) dv[l] = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
          const double r = resid[j];
          const double* a = act.data() + j * P + b;
#pragma omp simd
          for (std::size_t l = 0; l < kLanes; ++l) {
            dv[l] += r * a[l];
            tmp[l] = a[l] > 0.0 ? r : 0.0;
          }
          for (std::size_t c = 0; c < d; ++c) {
            const double xc = x_[c * k + j];
            double* dc = dir.data() + c * kLanes;
#pragma omp simd
            for (std::size_t l = 0; l < kLanes; ++l) dc[l] += tmp[l] * xc;
          }
        }
#pragma omp simd
        for (std::size_t l = 0; l < kLanes; ++l) v[l] = out[l];
        for (std::size_t c = 0; c < d; ++c) {
          double* u = inner_.data() + c * P + b;
          const double* dc = dir.data() + c * kLanes;
#pragma omp simd
          for (std::size_t l = 0; l < kLanes; ++l) u[l] -= coef * v[l] * dc[l];
        }
#pragma omp simd
        for (std::size_t l = 0; l < kLanes; ++l) out[l] = v[l] - coef * dv[l];
      }
      // New activations, outputs and drift.
      for (std::size_t j = 0; j < k; ++j) {
        double* a = act.data() + j * P + b;
#pragma omp simd
        for (std::size_t l = 0; l < kLanes; ++l) tmp[l] = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
          const double xc = x_[c * k + j];
          const double* u = inner_.data() + c * P + b;
#pragma omp simd
          for (std::size_t l = 0; l < kLanes; ++l) tmp[l] += u[l] * xc;
        }
#pragma omp simd
        for (std::size_t l = 0; l < kLanes; ++l) a[l] = tmp[l] > 0.0 ? tmp[l] : 0.0;
      }
      // Outputs are summed neuron by neuron, in the order forward_raw uses,
      // so targets taken from forward_rescaled give an exactly zero residual.
      for (std::size_t l = 0; l < kLanes; ++l)
        for (std::size_t j = 0; j < k; ++j) f[j] += out[l] * act[j * P + b + l];
      for (std::size_t c = 0; c < d; ++c) {
        const double* u = inner_.data() + c * P + b;
        const double* u0 = inner0_.data() + c * P + b;
#pragma omp simd
        for (std::size_t l = 0; l < kLanes; ++l) acc_d[l] += (u[l] - u0[l]) * (u[l] - u0[l]);
      }
      {
        const double* o0 = outer0_.data() + b;
#pragma omp simd
        for (std::size_t l = 0; l < kLanes; ++l) {
          acc_d[l] += (out[l] - o0[l]) * (out[l] - o0[l]);
          v[l] = out[l] * out[l];
        }
      }
      // Kernel sums over the upper triangle.
      std::size_t p = 0;
      for (std::size_t j = 0; j < k; ++j) {
        const double* aj = act.data() + j * P + b;
#pragma omp simd
        for (std::size_t l = 0; l < kLanes; ++l) tmp[l] = aj[l] > 0.0 ? v[l] : 0.0;
        for (std::size_t q = j; q < k; ++q, ++p) {
          const double* aq = act.data() + q * P + b;
          double* t1 = acc_s1 + p * kLanes;
          double* t2 = acc_s2 + p * kLanes;
#pragma omp simd
          for (std::size_t l = 0; l < kLanes; ++l) {
            t1[l] += aq[l] > 0.0 ? tmp[l] : 0.0;
            t2[l] += aj[l] * aq[l];
          }
        }
      }
    }

    auto reduce = [](const double* lanes) {
      double s = 0.0;
      for (std::size_t l = 0; l < kLanes; ++l) s += lanes[l];
      return s;
    };
    std::size_t p = 0;
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t q = j; q < k; ++q, ++p) {
        s1[j * k + q] = s1[q * k + j] = reduce(acc_s1 + p * kLanes);
        s2[j * k + q] = s2[q * k + j] = reduce(acc_s2 + p * kLanes);
      }
    drift2 = reduce(acc_d);
  }
};

}  // namespace

double residual_norm2(const NetworkWeights& w, const InputSet& x, std::span<const double> y, double alpha) {
  check_shapes(w, x, y);
  return sum_squares(evaluate(w, x, y, alpha).resid);
}

double loss(const NetworkWeights& w, const InputSet& x, std::span<const double> y, double alpha) {
  return 0.5 * residual_norm2(w, x, y, alpha);
}

double learning_rate(const TrainConfig& cfg, std::size_t m, double alpha) {
  if (cfg.eta_mode == EtaMode::custom) {
    if (!(cfg.eta > 0.0)) throw std::invalid_argument("training: custom eta must be positive");
    return cfg.eta;
  }
  return kernel_rescale(m, alpha);
}

double default_dt(const NetworkWeights& w0, const InputSet& x, double alpha, double eta) {
  const double lmax = max_eigenvalue(rescaled_ntk(w0, x, alpha));
  return 0.1 / (eta * lmax / kernel_rescale(w0.width(), alpha) + 1.0);
}

NetworkWeights step(const NetworkWeights& w, const InputSet& x, std::span<const double> y, double dt, double eta,
                    double alpha) {
  check_shapes(w, x, y);
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  const State s = evaluate(w, x, y, alpha);
  NetworkWeights next = apply_step(w, x, s, dt, eta, alpha);
  const double before = sum_squares(s.resid);
  const double after = residual_norm2(next, x, y, alpha);
  if (!std::isfinite(after) || after > 10.0 * before) throw TrainingDivergence(divergence_message(before, after, dt));
  return next;
}

Trajectory train(const NetworkWeights& w0, const InputSet& x, std::span<const double> y, double alpha,
                 const TrainConfig& cfg) {
  check_shapes(w0, x, y);
  if (!(cfg.t_max > 0.0)) throw std::invalid_argument("train: t_max must be positive");
  if (cfg.record_every == 0) throw std::invalid_argument("train: record_every must be >= 1");
  const std::size_t m = w0.width(), k = x.count();
  const double eta = learning_rate(cfg, m, alpha);
  const double rescale = kernel_rescale(m, alpha);
  const double dt = cfg.dt > 0.0 ? cfg.dt : default_dt(w0, x, alpha, eta);
  if (cfg.t_max < dt) throw std::invalid_argument("train: t_max must be >= dt");
  const std::size_t n_steps = static_cast<std::size_t>(std::ceil(cfg.t_max / dt - 1e-9));
  const double out_scale = output_scale(m, alpha);
  const double kernel_scale = std::pow(static_cast<double>(m), -2.0 / alpha);
  const Matrix gram = x.gram();

  Trajectory tr;
  tr.width = m;
  tr.alpha = alpha;
  tr.dt = dt;
  tr.eta = eta;
  tr.outer_grad_drift.resize(k);

  Flow flow(w0, x);
  std::vector<double> resid(k);
  auto sync = [&] {
    for (std::size_t j = 0; j < k; ++j) resid[j] = out_scale * flow.f[j] - y[j];
  };
  auto parts = [&] {
    KernelPair p{Matrix(k, k), Matrix(k, k)};
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t l = 0; l < k; ++l) {
        p.h1(j, l) = kernel_scale * gram(j, l) * flow.s1[j * k + l];
        p.h2(j, l) = kernel_scale * flow.s2[j * k + l];
      }
    return p;
  };
  flow.evaluate();
  sync();
  const std::vector<double> act0 = flow.act;
  const KernelPair parts0 = parts();
  KernelPair current = parts0;

  auto record = [&](std::size_t step_index, double lambda) {
    tr.times.push_back(static_cast<double>(step_index) * dt);
    tr.loss.push_back(sum_squares(resid));
    tr.lambda_min.push_back(lambda);
    tr.weight_drift.push_back(std::sqrt(flow.drift2));
    tr.h1_drift.push_back(frobenius_distance(current.h1, parts0.h1));
    tr.h2_drift.push_back(frobenius_distance(current.h2, parts0.h2));
    for (std::size_t j = 0; j < k; ++j) {
      const double* a = flow.act.data() + j * flow.padded;
      const double* a0 = act0.data() + j * flow.padded;
      double g = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double diff = out_scale * (a[i] - a0[i]);
        g += diff * diff;
      }
      tr.outer_grad_drift[j].push_back(rescale * g);
    }
  };

  double lambda = min_eigenvalue(current.total());
  tr.min_lambda_min = lambda;
  record(0, lambda);
  const double coef = dt * eta * out_scale;
  for (std::size_t n = 1; n <= n_steps; ++n) {
    const double before = sum_squares(resid);
    flow.advance(resid, coef);
    sync();
    const double after = sum_squares(resid);
    if (!std::isfinite(after) || after > 10.0 * before) throw TrainingDivergence(divergence_message(before, after, dt));
    if (before > 0.0) {
      const double ratio = after / (before * std::exp(-2.0 * lambda * dt * eta / rescale));
      tr.worst_decay_ratio = std::max(tr.worst_decay_ratio, ratio);
      if (ratio > cfg.decay_slack) ++tr.decay_violations;
    }
    tr.max_weight_drift = std::max(tr.max_weight_drift, std::sqrt(flow.drift2));
    current = parts();
    lambda = min_eigenvalue(current.total());
    tr.min_lambda_min = std::min(tr.min_lambda_min, lambda);
    if (n % cfg.record_every == 0 || n == n_steps) record(n, lambda);
  }
  tr.steps = n_steps;
  tr.final_weights = flow.weights();
  return tr;
}

Certificate theorem5_certificate(const Trajectory& traj, double lambda0, double slack) {
  Certificate c;
  c.holds = true;
  if (traj.loss.empty()) return c;
  const double l0 = traj.loss.front();
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double bound = std::exp(-lambda0 * traj.times[i]) * l0;
    const double ratio = bound > 0.0 ? traj.loss[i] / bound : (traj.loss[i] > 0.0 ? INFINITY : 0.0);
    c.worst_ratio = std::max(c.worst_ratio, ratio);
    if (traj.loss[i] > bound * slack && c.holds) {
      c.holds = false;
      c.first_violation = traj.times[i];
    }
  }
  return c;
}

void write_trajectory(std::ostream& os, const Trajectory& traj, const std::string& comment) {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  if (!comment.empty()) os << "# " << comment << '\n';
  os << "# width=" << traj.width << " alpha=" << num(traj.alpha) << " dt=" << num(traj.dt)
     << " eta=" << num(traj.eta) << '\n';
  os << "time,loss,lambda_min,weight_drift,h1_drift,h2_drift";
  for (std::size_t j = 0; j < traj.outer_grad_drift.size(); ++j) os << ",outer_grad_drift_" << j;
  os << '\n';
  for (std::size_t r = 0; r < traj.times.size(); ++r) {
    os << num(traj.times[r]) << ',' << num(traj.loss[r]) << ',' << num(traj.lambda_min[r]) << ','
       << num(traj.weight_drift[r]) << ',' << num(traj.h1_drift[r]) << ',' << num(traj.h2_drift[r]);
    for (const auto& g : traj.outer_grad_drift) os << ',' << num(g[r]);
    os << '\n';
  }
}

}  // namespace stablentk
