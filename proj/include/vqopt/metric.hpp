#pragma once

#include <cstdint>

#include "vqopt/pauli.hpp"
#include "vqopt/simulator.hpp"

namespace vqopt {

/// Hardware-equivalent circuit evaluations, split by what they were spent on.
///
/// Charges model a device, not the simulator: a gradient costs two shifted
/// evaluations per parameter, the full metric n_params^2 and the
/// block-diagonal metric n_params + n_layers, whatever the simulator did.
struct EvalCounter {
  std::uint64_t cost = 0;
  std::uint64_t gradient = 0;
  std::uint64_t qfim_full = 0;
  std::uint64_t qfim_block = 0;

  std::uint64_t total() const noexcept { return cost + gradient + qfim_full + qfim_block; }

  friend bool operator==(const EvalCounter&, const EvalCounter&) = default;
};

enum class MetricKind { Full, BlockDiagonal, Identity };

const char* to_string(MetricKind kind);

struct MetricMatrix {
  RealMatrix entries;
  MetricKind kind = MetricKind::Full;
};

/// Energy <psi(theta)|H|psi(theta)>; charges one evaluation.
double cost(const CircuitIR& circuit, const PauliSum& hamiltonian, const RealVector& params,
            EvalCounter& counter);

/// Analytic gradient 2 Re <d_i psi|H|psi>; charges 2 * n_params.
RealVector gradient(const CircuitIR& circuit, const PauliSum& hamiltonian, const RealVector& params,
                    EvalCounter& counter);

/// Energy and gradient from one simulation; charges 1 + 2 * n_params.
EnergyGradient cost_and_gradient(const CircuitIR& circuit, const PauliSum& hamiltonian,
                                 const RealVector& params, EvalCounter& counter);

/// F_ij = Re<d_i psi|d_j psi> - Re(<d_i psi|psi><psi|d_j psi>), no factor 4.
/// Charges n_params^2.
MetricMatrix qfim_full(const CircuitIR& circuit, const RealVector& params, EvalCounter& counter);

/// Full metric with every entry outside the layer blocks set to zero.
/// Charges n_params + n_layers.
MetricMatrix qfim_block_diagonal(const CircuitIR& circuit, const RealVector& params,
                                 EvalCounter& counter);

/// Builds the metric from derivative states, with no accounting.
RealMatrix metric_from_derivatives(const StateWithDerivatives& sd);

/// Tikhonov shift applied to singular metrics.
inline constexpr double kTikhonovShift = 1e-7;
/// A metric whose smallest eigenvalue is below this counts as singular.
inline constexpr double kSingularThreshold = 1e-10;

/// Adds kTikhonovShift * I when the smallest eigenvalue is below kSingularThreshold.
MetricMatrix regularize(const MetricMatrix& metric);

/// Solves F d = rhs with a symmetric LDL^T factorization; regularizes first
/// if F is singular. Throws NumericalError if the solve still fails.
RealVector solve_metric(const MetricMatrix& metric, const RealVector& rhs);

/// Inverse of the regularized metric.
RealMatrix invert_metric(const MetricMatrix& metric);

}  // namespace vqopt
