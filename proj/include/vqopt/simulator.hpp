#pragma once

#include <optional>
#include <span>
#include <vector>

#include "vqopt/pauli.hpp"
#include "vqopt/statevector.hpp"

namespace vqopt {

enum class GateKind { RX, RY, RZ, H, CZ, CNOT, FIXED_RY };

const char* to_string(GateKind kind);

/// One gate of a circuit.
///
/// Parametrized rotations (RX, RY, RZ) read their angle as
/// `scale * params[*slot]` and implement exp(-i angle P / 2) with P the
/// single-qubit generator. FIXED_RY carries `fixed_angle` instead. For CNOT,
/// targets[0] is the control.
struct GateOp {
  GateKind kind = GateKind::H;
  std::size_t targets[2] = {0, 0};
  std::optional<std::size_t> param_slot;
  double scale = 1.0;
  double fixed_angle = 0.0;

  bool is_parametrized() const noexcept { return param_slot.has_value(); }
  bool is_two_qubit() const noexcept { return kind == GateKind::CZ || kind == GateKind::CNOT; }
  /// Generator letter of a rotation; Pauli::I for non-rotations.
  Pauli generator() const noexcept;
};

/// Immutable parametrized circuit acting on |0...0>.
///
/// Every parameter slot 0..n_params-1 is referenced by at least one gate.
/// A slot shared by several gates (QAOA layers) differentiates by the chain
/// rule over all of them. Layer tags feed the block-diagonal metric.
class CircuitIR {
 public:
  std::size_t n_qubits() const noexcept { return n_qubits_; }
  std::size_t n_params() const noexcept { return layer_of_.size(); }
  std::size_t n_layers() const noexcept { return n_layers_; }
  const std::vector<GateOp>& gates() const noexcept { return gates_; }
  std::size_t layer_of(std::size_t slot) const { return layer_of_.at(slot); }
  const std::vector<std::size_t>& layers() const noexcept { return layer_of_; }

 private:
  friend class CircuitBuilder;
  std::size_t n_qubits_ = 0;
  std::size_t n_layers_ = 0;
  std::vector<GateOp> gates_;
  std::vector<std::size_t> layer_of_;
};

class CircuitBuilder {
 public:
  explicit CircuitBuilder(std::size_t n_qubits);

  /// Allocates the next parameter slot and tags it with `layer`.
  std::size_t new_param(std::size_t layer);

  CircuitBuilder& rotation(GateKind kind, std::size_t qubit, std::size_t slot, double scale = 1.0);
  CircuitBuilder& fixed_ry(std::size_t qubit, double angle);
  CircuitBuilder& h(std::size_t qubit);
  CircuitBuilder& cz(std::size_t a, std::size_t b);
  CircuitBuilder& cnot(std::size_t control, std::size_t target);

  /// Validates slot usage and layer contiguity. Throws DimensionError.
  CircuitIR build() const;

 private:
  void check_qubit(std::size_t q) const;

  CircuitIR ir_;
};

/// Applies one gate in place; `angle` is ignored by non-rotations.
void apply_gate(Amplitudes& psi, std::size_t n_qubits, const GateOp& gate, double angle);

/// Applies the inverse of the gate (negated angle for rotations).
void apply_gate_inverse(Amplitudes& psi, std::size_t n_qubits, const GateOp& gate, double angle);

/// Rotation angle the gate uses for `params`.
double gate_angle(const GateOp& gate, std::span<const double> params);

/// Runs the circuit on |0...0>. Throws DimensionError on a length mismatch
/// and NumericalError on non-finite parameters.
Statevector run_circuit(const CircuitIR& circuit, std::span<const double> params);

/// d|psi(theta)>/d theta_i (unnormalized), exact.
Amplitudes derivative_state(const CircuitIR& circuit, std::span<const double> params, std::size_t i);

/// State and all derivative states from one forward sweep.
struct StateWithDerivatives {
  Statevector state;
  std::vector<Amplitudes> derivatives;
};
StateWithDerivatives derivative_states(const CircuitIR& circuit, std::span<const double> params);

/// 2 Re <d_i psi|H|psi> for every parameter, by a reverse sweep that keeps only
/// two state vectors alive. Also returns <psi|H|psi>.
struct EnergyGradient {
  double energy = 0.0;
  RealVector gradient;
};
EnergyGradient adjoint_energy_gradient(const CircuitIR& circuit, const PauliSum& hamiltonian,
                                       std::span<const double> params);

inline std::span<const double> as_span(const RealVector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace vqopt
