#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stablentk/kernel.hpp"
#include "stablentk/network.hpp"

namespace stablentk {

/// Squared-error loss 1/2 sum_j (f~(x_j) - y_j)^2. Trajectories record the
/// squared residual norm, which is twice this value.
double loss(const NetworkWeights& w, const InputSet& x, std::span<const double> y, double alpha);

/// ||Y - f~(W, X)||_2^2.
double residual_norm2(const NetworkWeights& w, const InputSet& x, std::span<const double> y, double alpha);

enum class EtaMode { paper, custom };

struct TrainConfig {
  double dt = 0.0;        ///< 0 selects the default step (see default_dt)
  double t_max = 20.0;
  std::size_t record_every = 1;
  EtaMode eta_mode = EtaMode::paper;
  double eta = 1.0;       ///< used when eta_mode == custom
  double decay_slack = 1.05;
};

/// Thrown when one step multiplies the loss by more than 10.
class TrainingDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Learning rate: (log m)^{2/alpha} in paper mode, cfg.eta otherwise.
double learning_rate(const TrainConfig& cfg, std::size_t m, double alpha);

/// 0.1 / (eta * lambda_max(H~(0)) / (log m)^{2/alpha} + 1).
double default_dt(const NetworkWeights& w0, const InputSet& x, double alpha, double eta);

/// One explicit Euler step W - dt * eta * sum_j (f~(x_j) - y_j) grad f~(x_j),
/// applied to both weight blocks. Throws TrainingDivergence if the loss grows
/// by more than 10x.
NetworkWeights step(const NetworkWeights& w, const InputSet& x, std::span<const double> y, double dt, double eta,
                    double alpha);

struct Trajectory {
  std::size_t width = 0;
  double alpha = 0.0;
  double dt = 0.0;
  double eta = 0.0;
  std::vector<double> times;
  std::vector<double> loss;             ///< ||Y - f~||_2^2
  std::vector<double> lambda_min;       ///< of H~(W(t), X)
  std::vector<double> weight_drift;     ///< ||W(t) - W(0)||_F
  std::vector<double> h1_drift;         ///< ||H~(1)(t) - H~(1)(0)||_F, recorded only
  std::vector<double> h2_drift;         ///< ||H~(2)(t) - H~(2)(0)||_F
  std::vector<std::vector<double>> outer_grad_drift;  ///< per input: (log m)^{2/alpha} ||d f~/dw(t) - d f~/dw(0)||^2
  /// Over every step (not only recorded ones).
  double max_weight_drift = 0.0;
  double min_lambda_min = 0.0;
  std::size_t steps = 0;
  std::size_t decay_violations = 0;  ///< steps where loss(t+dt) > loss(t) exp(-2 lambda_min dt eta / (log m)^{2/alpha}) * slack
  double worst_decay_ratio = 0.0;    ///< max over steps of loss(t+dt) / (loss(t) exp(...))
  NetworkWeights final_weights;
};

/// Integrates the gradient flow from w0 up to cfg.t_max and records every
/// diagnostic at t = 0, every cfg.record_every steps, and at the last step.
Trajectory train(const NetworkWeights& w0, const InputSet& x, std::span<const double> y, double alpha,
                 const TrainConfig& cfg);

struct Certificate {
  bool holds = false;
  double worst_ratio = 0.0;        ///< max_t loss(t) / (exp(-lambda0 t) loss(0))
  double first_violation = -1.0;   ///< time of the first violation, -1 if none
};

/// Checks loss(t) <= exp(-lambda0 t) loss(0) * slack at every recorded time.
Certificate theorem5_certificate(const Trajectory& traj, double lambda0, double slack = 1.0);

/// Writes the trajectory as delimited text with a '#'-prefixed header.
void write_trajectory(std::ostream& os, const Trajectory& traj, const std::string& comment = "");

}  // namespace stablentk
