#include "vqopt/optimizers.hpp"

#include <cmath>
#include <string>

#include "vqopt/error.hpp"

namespace vqopt {

namespace {

// Denominators below this signal a breakdown of the rank-1 update.
constexpr double kBreakdownThreshold = 1e-12;
// Inverse-metric entries beyond this are treated as overflow.
constexpr double kOverflowThreshold = 1e150;

void check_gradient(const RealVector& grad) {
  if (!grad.allFinite()) throw NumericalError("gradient is not finite");
}

StepResult converged_at(const RealVector& params, double update_norm, const EnergyGradient& eg) {
  return {params, update_norm, true, eg.energy, eg.gradient.norm()};
}

StepResult moved(RealVector next, double update_norm, const EnergyGradient& eg) {
  if (!next.allFinite()) throw NumericalError("update produced non-finite parameters");
  return {std::move(next), update_norm, false, eg.energy, eg.gradient.norm()};
}

}  // namespace

AdamState AdamState::fresh(std::size_t n_params, const Hyperparameters& hp) {
  const auto n = static_cast<Eigen::Index>(n_params);
  return {RealVector::Zero(n), RealVector::Zero(n), 0, hp.beta1, hp.beta2, hp.kappa};
}

std::pair<RealVector, AdamState> adam_direction(const RealVector& grad, const AdamState& state) {
  if (grad.size() != state.m.size()) throw DimensionError("gradient and Adam moments differ in length");
  check_gradient(grad);
  AdamState next = state;
  next.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
  next.v = state.beta2 * state.v + (1.0 - state.beta2) * grad.cwiseProduct(grad);
  const double power = static_cast<double>(state.k + 1);
  const RealVector m_hat = next.m / (1.0 - std::pow(state.beta1, power));
  const RealVector v_hat = next.v / (1.0 - std::pow(state.beta2, power));
  RealVector p = m_hat.array() / (v_hat.array().sqrt() + state.kappa);
  next.k = state.k + 1;
  return {std::move(p), std::move(next)};
}

MetricState filter_update(const MetricState& metric, const RealVector& grad) {
  if (grad.size() != metric.f_inv.rows()) throw DimensionError("gradient and metric differ in size");
  check_gradient(grad);
  MetricState next = metric;
  next.k = metric.k + 1;
  const double eps = metric.filter_rate();
  if (eps == 0.0) return next;
  if (!(eps > 0.0 && eps < 1.0)) {
    throw FilterBreakdown("filter rate " + std::to_string(eps) + " outside (0, 1)");
  }

  // F_inv is symmetric, so g^T F_inv = u^T with u = F_inv g.
  const RealVector u = metric.f_inv * grad;
  const double denom = 1.0 - eps * (1.0 - grad.dot(u));
  if (!std::isfinite(denom) || std::abs(denom) < kBreakdownThreshold) {
    throw FilterBreakdown("Sherman-Morrison denominator " + std::to_string(denom) + " at step " +
                          std::to_string(metric.k));
  }
  RealMatrix f = (metric.f_inv - (eps / denom) * u * u.transpose()) / (1.0 - eps);
  next.f_inv = 0.5 * (f + f.transpose());
  if (!next.f_inv.allFinite() || next.f_inv.cwiseAbs().maxCoeff() > kOverflowThreshold) {
    throw FilterBreakdown("inverse metric overflowed at step " + std::to_string(metric.k));
  }
  return next;
}

MetricState initialize_metric(const CircuitIR& circuit, const RealVector& params, MetricKind mode,
                              EvalCounter& counter, double eps0, double eta, bool step_scaling) {
  MetricState state;
  state.eps0 = eps0;
  state.eta = eta;
  state.step_scaling = step_scaling;
  const auto p = static_cast<Eigen::Index>(circuit.n_params());
  switch (mode) {
    case MetricKind::Identity:
      state.f_inv = RealMatrix::Identity(p, p);
      break;
    case MetricKind::Full: {
      EvalCounter local = counter;
      state.f_inv = invert_metric(qfim_full(circuit, params, local));
      counter = local;
      break;
    }
    case MetricKind::BlockDiagonal: {
      EvalCounter local = counter;
      state.f_inv = invert_metric(qfim_block_diagonal(circuit, params, local));
      counter = local;
      break;
    }
  }
  return state;
}

StepResult gd_step(const CircuitIR& circuit, const PauliSum& hamiltonian, const RealVector& params,
                   double eta, double gamma, EvalCounter& counter) {
  EvalCounter local = counter;
  const auto eg = cost_and_gradient(circuit, hamiltonian, params, local);
  check_gradient(eg.gradient);
  const double norm = eg.gradient.norm();
  if (norm <= gamma) return converged_at(params, norm, eg);
  auto result = moved(params - eta * eg.gradient, norm, eg);
  counter = local;
  return result;
}

StepResult adam_step(const CircuitIR& circuit, const PauliSum& hamiltonian, const RealVector& params,
                     AdamState& adam, double eta, double gamma, EvalCounter& counter) {
  EvalCounter local = counter;
  const auto eg = cost_and_gradient(circuit, hamiltonian, params, local);
  auto [p, next_adam] = adam_direction(eg.gradient, adam);
  const double norm = p.norm();
  if (norm <= gamma) return converged_at(params, norm, eg);
  auto result = moved(params - eta * p, norm, eg);
  adam = std::move(next_adam);
  counter = local;
  return result;
}

StepResult qbroyden_step(const CircuitIR& circuit, const PauliSum& hamiltonian, const RealVector& params,
                         MetricState& metric, double gamma, EvalCounter& counter) {
  EvalCounter local = counter;
  const auto eg = cost_and_gradient(circuit, hamiltonian, params, local);
  check_gradient(eg.gradient);
  const RealVector direction = metric.f_inv * eg.gradient;
  const double norm = direction.norm();
  if (norm <= gamma) return converged_at(params, norm, eg);
  auto result = moved(params - metric.eta * direction, norm, eg);
  MetricState next = filter_update(metric, eg.gradient);
  metric = std::move(next);
  counter = local;
  return result;
}

StepResult qbang_step(const CircuitIR& circuit, const PauliSum& hamiltonian, const RealVector& params,
                      AdamState& adam, MetricState& metric, double gamma, EvalCounter& counter) {
  EvalCounter local = counter;
  const auto eg = cost_and_gradient(circuit, hamiltonian, params, local);
  auto [p, next_adam] = adam_direction(eg.gradient, adam);
  const RealVector direction = metric.f_inv * p;
  const double norm = direction.norm();
  if (norm <= gamma) return converged_at(params, norm, eg);

  double step = metric.eta;
  if (metric.step_scaling) step /= std::pow(static_cast<double>(metric.k + 1), metric.eps0);
  auto result = moved(params - step * direction, norm, eg);
  // The filter follows the raw gradient, not the Adam direction.
  MetricState next_metric = filter_update(metric, eg.gradient);
  adam = std::move(next_adam);
  metric = std::move(next_metric);
  counter = local;
  return result;
}

StepResult qng_step(const CircuitIR& circuit, const PauliSum& hamiltonian, const RealVector& params,
                    double eta, double gamma, EvalCounter& counter, MetricKind mode) {
  if (mode == MetricKind::Identity) throw Error("QNG requires a full or block-diagonal metric");
  EvalCounter local = counter;
  const auto eg = cost_and_gradient(circuit, hamiltonian, params, local);
  check_gradient(eg.gradient);
  const MetricMatrix f = mode == MetricKind::Full ? qfim_full(circuit, params, local)
                                                  : qfim_block_diagonal(circuit, params, local);
  const RealVector direction = solve_metric(f, eg.gradient);
  const double norm = direction.norm();
  if (norm <= gamma) return converged_at(params, norm, eg);
  auto result = moved(params - eta * direction, norm, eg);
  counter = local;
  return result;
}

StepResult varqite_step(const CircuitIR& circuit, const PauliSum& hamiltonian, const RealVector& params,
                        double eta, double gamma, EvalCounter& counter) {
  return qng_step(circuit, hamiltonian, params, eta, gamma, counter, MetricKind::Full);
}

StepResult momentum_qng_step(const CircuitIR& circuit, const PauliSum& hamiltonian, const RealVector& params,
                             AdamState& adam, double eta, double gamma, EvalCounter& counter) {
  EvalCounter local = counter;
  const auto eg = cost_and_gradient(circuit, hamiltonian, params, local);
  const MetricMatrix f = qfim_full(circuit, params, local);
  auto [p, next_adam] = adam_direction(eg.gradient, adam);
  const RealVector direction = solve_metric(f, p);
  const double norm = direction.norm();
  if (norm <= gamma) return converged_at(params, norm, eg);
  auto result = moved(params - eta * direction, norm, eg);
  adam = std::move(next_adam);
  counter = local;
  return result;
}

}  // namespace vqopt
