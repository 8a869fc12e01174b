#pragma once

#include "vqopt/metric.hpp"

namespace vqopt {

/// Shared optimizer hyperparameters. kappa is the Adam stabilizer.
struct Hyperparameters {
  double eta = 0.01;
  double eps0 = 0.2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double kappa = 1e-8;
  double gamma = 0.0;
  bool step_scaling = true;
};

/// Adam moments. Bias corrections use exponent k+1.
struct AdamState {
  RealVector m;
  RealVector v;
  std::size_t k = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double kappa = 1e-8;

  static AdamState fresh(std::size_t n_params, const Hyperparameters& hp);
};

/// Inverse-metric memory of qBroyden and qBang.
struct MetricState {
  RealMatrix f_inv;
  std::size_t k = 0;
  double eps0 = 0.2;
  double eta = 0.01;
  bool step_scaling = true;

  /// Filter rate of the next update, eps0 / (k + 1).
  double filter_rate() const noexcept { return eps0 / static_cast<double>(k + 1); }
};

struct StepResult {
  RealVector new_params;
  /// Euclidean norm of the preconditioned direction.
  double update_norm = 0.0;
  bool converged = false;
  /// Energy and gradient norm at the input parameters.
  double energy = 0.0;
  double grad_norm = 0.0;
};

/// One Adam moment update. Returns the normalized direction p and the next state.
std::pair<RealVector, AdamState> adam_direction(const RealVector& grad, const AdamState& state);

/// Low-pass filter F' = (1 - e) F + e g g^T applied to the inverse by
/// Sherman-Morrison, with e = eps0 / (k + 1). Throws FilterBreakdown when the
/// denominator vanishes or the result is not finite.
MetricState filter_update(const MetricState& metric, const RealVector& grad);

/// Computes F_0^{-1} for qBroyden/qBang. Identity mode is free; the other
/// modes charge the counter and regularize before inverting.
MetricState initialize_metric(const CircuitIR& circuit, const RealVector& params, MetricKind mode,
                              EvalCounter& counter, double eps0, double eta, bool step_scaling);

// Step kernels. Each evaluates L and grad L at `params` and returns the next
// parameters. When the update norm is <= gamma the step reports convergence
// and leaves every in/out argument (states and counter) untouched. All
// kernels give the strong exception guarantee.

StepResult gd_step(const CircuitIR& circuit, const PauliSum& hamiltonian, const RealVector& params,
                   double eta, double gamma, EvalCounter& counter);

StepResult adam_step(const CircuitIR& circuit, const PauliSum& hamiltonian, const RealVector& params,
                     AdamState& adam, double eta, double gamma, EvalCounter& counter);

StepResult qbroyden_step(const CircuitIR& circuit, const PauliSum& hamiltonian, const RealVector& params,
                         MetricState& metric, double gamma, EvalCounter& counter);

StepResult qbang_step(const CircuitIR& circuit, const PauliSum& hamiltonian, const RealVector& params,
                      AdamState& adam, MetricState& metric, double gamma, EvalCounter& counter);

/// Natural-gradient step with the metric recomputed at `params`. `mode` is
/// Full or BlockDiagonal.
StepResult qng_step(const CircuitIR& circuit, const PauliSum& hamiltonian, const RealVector& params,
                    double eta, double gamma, EvalCounter& counter, MetricKind mode);

/// Euler-integrated McLachlan imaginary-time step; the same update as
/// full-metric QNG with time step eta.
StepResult varqite_step(const CircuitIR& circuit, const PauliSum& hamiltonian, const RealVector& params,
                        double eta, double gamma, EvalCounter& counter);

StepResult momentum_qng_step(const CircuitIR& circuit, const PauliSum& hamiltonian, const RealVector& params,
                             AdamState& adam, double eta, double gamma, EvalCounter& counter);

}  // namespace vqopt
