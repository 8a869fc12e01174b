#include "vqopt/metric.hpp"

#include <cmath>

#include "vqopt/error.hpp"

namespace vqopt {

using Index = Eigen::Index;

const char* to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::Full: return "full";
    case MetricKind::BlockDiagonal: return "block_diagonal";
    case MetricKind::Identity: return "identity";
  }
  return "?";
}

double cost(const CircuitIR& circuit, const PauliSum& hamiltonian, const RealVector& params,
            EvalCounter& counter) {
  const double e = expectation(run_circuit(circuit, as_span(params)), hamiltonian);
  counter.cost += 1;
  return e;
}

RealVector gradient(const CircuitIR& circuit, const PauliSum& hamiltonian, const RealVector& params,
                    EvalCounter& counter) {
  auto eg = adjoint_energy_gradient(circuit, hamiltonian, as_span(params));
  counter.gradient += 2 * circuit.n_params();
  return std::move(eg.gradient);
}

EnergyGradient cost_and_gradient(const CircuitIR& circuit, const PauliSum& hamiltonian,
                                 const RealVector& params, EvalCounter& counter) {
  auto eg = adjoint_energy_gradient(circuit, hamiltonian, as_span(params));
  counter.cost += 1;
  counter.gradient += 2 * circuit.n_params();
  return eg;
}

RealMatrix metric_from_derivatives(const StateWithDerivatives& sd) {
  const auto p = static_cast<Index>(sd.derivatives.size());
  const auto& psi = sd.state.amplitudes();
  std::vector<Complex> overlap(static_cast<std::size_t>(p));  // <psi|d_i psi>
  for (Index i = 0; i < p; ++i) overlap[static_cast<std::size_t>(i)] = psi.dot(sd.derivatives[static_cast<std::size_t>(i)]);

  RealMatrix f(p, p);
  for (Index i = 0; i < p; ++i) {
    const auto& di = sd.derivatives[static_cast<std::size_t>(i)];
    for (Index j = i; j < p; ++j) {
      const auto& dj = sd.derivatives[static_cast<std::size_t>(j)];
      const Complex first = di.dot(dj);
      const Complex second = std::conj(overlap[static_cast<std::size_t>(i)]) * overlap[static_cast<std::size_t>(j)];
      f(i, j) = first.real() - second.real();
      f(j, i) = f(i, j);
    }
  }
  return f;
}

MetricMatrix qfim_full(const CircuitIR& circuit, const RealVector& params, EvalCounter& counter) {
  MetricMatrix m{metric_from_derivatives(derivative_states(circuit, as_span(params))), MetricKind::Full};
  counter.qfim_full += circuit.n_params() * circuit.n_params();
  return m;
}

MetricMatrix qfim_block_diagonal(const CircuitIR& circuit, const RealVector& params,
                                 EvalCounter& counter) {
  RealMatrix f = metric_from_derivatives(derivative_states(circuit, as_span(params)));
  const auto p = static_cast<Index>(circuit.n_params());
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) {
      if (circuit.layer_of(static_cast<std::size_t>(i)) != circuit.layer_of(static_cast<std::size_t>(j))) {
        f(i, j) = 0.0;
      }
    }
  }
  counter.qfim_block += circuit.n_params() + circuit.n_layers();
  return {std::move(f), MetricKind::BlockDiagonal};
}

MetricMatrix regularize(const MetricMatrix& metric) {
  if (metric.entries.size() == 0) return metric;
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(metric.entries, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("metric eigensolve failed");
  if (solver.eigenvalues().minCoeff() >= kSingularThreshold) return metric;
  MetricMatrix out = metric;
  out.entries.diagonal().array() += kTikhonovShift;
  return out;
}

RealVector solve_metric(const MetricMatrix& metric, const RealVector& rhs) {
  if (metric.entries.rows() != rhs.size()) {
    throw DimensionError("metric and right-hand side sizes differ");
  }
  const MetricMatrix reg = regularize(metric);
  Eigen::LDLT<RealMatrix> ldlt(reg.entries);
  RealVector d = ldlt.solve(rhs);
  if (ldlt.info() != Eigen::Success || !d.allFinite()) {
    throw NumericalError("metric solve failed after regularization");
  }
  return d;
}

RealMatrix invert_metric(const MetricMatrix& metric) {
  const auto p = metric.entries.rows();
  const MetricMatrix reg = regularize(metric);
  Eigen::LDLT<RealMatrix> ldlt(reg.entries);
  RealMatrix inv = ldlt.solve(RealMatrix::Identity(p, p));
  if (ldlt.info() != Eigen::Success || !inv.allFinite()) {
    throw NumericalError("metric inversion failed after regularization");
  }
  return 0.5 * (inv + inv.transpose());
}

}  // namespace vqopt
