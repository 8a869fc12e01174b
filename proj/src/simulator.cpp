#include "vqopt/simulator.hpp"

#include <cmath>
#include <string>

#include "vqopt/error.hpp"

namespace vqopt {

// ---------------------------------------------------------------------------
// Statevector

Statevector::Statevector(std::size_t n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits == 0 || n_qubits > kMaxQubits) {
    throw DimensionError("statevector qubit count must be in [1, " + std::to_string(kMaxQubits) +
                         "], got " + std::to_string(n_qubits));
  }
  amps_ = Amplitudes::Zero(Eigen::Index{1} << n_qubits);
  amps_[0] = 1.0;
}

Statevector::Statevector(std::size_t n_qubits, Amplitudes amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
  if (n_qubits == 0 || n_qubits > kMaxQubits ||
      amps_.size() != (Eigen::Index{1} << n_qubits)) {
    throw DimensionError("amplitude count does not equal 2^" + std::to_string(n_qubits));
  }
}

Statevector Statevector::from_bitstring(std::string_view bits) {
  Statevector s(bits.size());
  std::uint64_t index = 0;
  for (std::size_t q = 0; q < bits.size(); ++q) {
    if (bits[q] == '1') {
      index |= qubit_mask(q, bits.size());
    } else if (bits[q] != '0') {
      throw Error("bitstring may only contain '0' and '1'");
    }
  }
  s.amps_[0] = 0.0;
  s.amps_[static_cast<Eigen::Index>(index)] = 1.0;
  return s;
}

// ---------------------------------------------------------------------------
// Circuit construction

const char* to_string(GateKind kind) {
  switch (kind) {
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::H: return "H";
    case GateKind::CZ: return "CZ";
    case GateKind::CNOT: return "CNOT";
    case GateKind::FIXED_RY: return "FIXED_RY";
  }
  return "?";
}

Pauli GateOp::generator() const noexcept {
  switch (kind) {
    case GateKind::RX: return Pauli::X;
    case GateKind::RY:
    case GateKind::FIXED_RY: return Pauli::Y;
    case GateKind::RZ: return Pauli::Z;
    default: return Pauli::I;
  }
}

CircuitBuilder::CircuitBuilder(std::size_t n_qubits) {
  if (n_qubits == 0 || n_qubits > kMaxQubits) {
    throw DimensionError("circuit qubit count must be in [1, " + std::to_string(kMaxQubits) + "]");
  }
  ir_.n_qubits_ = n_qubits;
}

void CircuitBuilder::check_qubit(std::size_t q) const {
  if (q >= ir_.n_qubits_) {
    throw DimensionError("qubit index " + std::to_string(q) + " out of range for " +
                         std::to_string(ir_.n_qubits_) + " qubits");
  }
}

std::size_t CircuitBuilder::new_param(std::size_t layer) {
  ir_.layer_of_.push_back(layer);
  return ir_.layer_of_.size() - 1;
}

CircuitBuilder& CircuitBuilder::rotation(GateKind kind, std::size_t qubit, std::size_t slot, double scale) {
  if (kind != GateKind::RX && kind != GateKind::RY && kind != GateKind::RZ) {
    throw Error(std::string("gate kind ") + to_string(kind) + " is not a parametrized rotation");
  }
  check_qubit(qubit);
  if (slot >= ir_.layer_of_.size()) {
    throw DimensionError("parameter slot " + std::to_string(slot) + " was never allocated");
  }
  GateOp g;
  g.kind = kind;
  g.targets[0] = qubit;
  g.param_slot = slot;
  g.scale = scale;
  ir_.gates_.push_back(g);
  return *this;
}

CircuitBuilder& CircuitBuilder::fixed_ry(std::size_t qubit, double angle) {
  check_qubit(qubit);
  GateOp g;
  g.kind = GateKind::FIXED_RY;
  g.targets[0] = qubit;
  g.fixed_angle = angle;
  ir_.gates_.push_back(g);
  return *this;
}

CircuitBuilder& CircuitBuilder::h(std::size_t qubit) {
  check_qubit(qubit);
  GateOp g;
  g.kind = GateKind::H;
  g.targets[0] = qubit;
  ir_.gates_.push_back(g);
  return *this;
}

CircuitBuilder& CircuitBuilder::cz(std::size_t a, std::size_t b) {
  check_qubit(a);
  check_qubit(b);
  if (a == b) throw DimensionError("CZ targets must be distinct");
  GateOp g;
  g.kind = GateKind::CZ;
  g.targets[0] = a;
  g.targets[1] = b;
  ir_.gates_.push_back(g);
  return *this;
}

CircuitBuilder& CircuitBuilder::cnot(std::size_t control, std::size_t target) {
  check_qubit(control);
  check_qubit(target);
  if (control == target) throw DimensionError("CNOT control and target must be distinct");
  GateOp g;
  g.kind = GateKind::CNOT;
  g.targets[0] = control;
  g.targets[1] = target;
  ir_.gates_.push_back(g);
  return *this;
}

CircuitIR CircuitBuilder::build() const {
  CircuitIR ir = ir_;
  const auto n_params = ir.layer_of_.size();
  std::vector<bool> used(n_params, false);
  for (const auto& g : ir.gates_) {
    if (g.param_slot) used[*g.param_slot] = true;
  }
  for (std::size_t i = 0; i < n_params; ++i) {
    if (!used[i]) throw DimensionError("parameter slot " + std::to_string(i) + " is not used by any gate");
  }
  std::size_t max_layer = 0;
  for (auto l : ir.layer_of_) max_layer = std::max(max_layer, l);
  ir.n_layers_ = n_params == 0 ? 1 : max_layer + 1;
  std::vector<bool> seen(ir.n_layers_, n_params == 0);
  for (auto l : ir.layer_of_) seen[l] = true;
  for (std::size_t l = 0; l < ir.n_layers_; ++l) {
    if (!seen[l]) throw DimensionError("layer " + std::to_string(l) + " has no parameters");
  }
  return ir;
}

// ---------------------------------------------------------------------------
// Gate kernels

namespace {

using Index = Eigen::Index;

void apply_1q(Amplitudes& psi, std::uint64_t mask, Complex u00, Complex u01, Complex u10, Complex u11) {
  const auto dim = static_cast<std::uint64_t>(psi.size());
  for (std::uint64_t b = 0; b < dim; ++b) {
    if (b & mask) continue;
    const Complex a0 = psi[static_cast<Index>(b)];
    const Complex a1 = psi[static_cast<Index>(b | mask)];
    psi[static_cast<Index>(b)] = u00 * a0 + u01 * a1;
    psi[static_cast<Index>(b | mask)] = u10 * a0 + u11 * a1;
  }
}

void apply_rotation(Amplitudes& psi, std::uint64_t mask, Pauli generator, double angle) {
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  switch (generator) {
    case Pauli::X:
      apply_1q(psi, mask, {c, 0}, {0, -s}, {0, -s}, {c, 0});
      break;
    case Pauli::Y: {
      const auto dim = static_cast<std::uint64_t>(psi.size());
      for (std::uint64_t b = 0; b < dim; ++b) {
        if (b & mask) continue;
        const Complex a0 = psi[static_cast<Index>(b)];
        const Complex a1 = psi[static_cast<Index>(b | mask)];
        psi[static_cast<Index>(b)] = c * a0 - s * a1;
        psi[static_cast<Index>(b | mask)] = s * a0 + c * a1;
      }
      break;
    }
    case Pauli::Z: {
      const Complex lo{c, -s};
      const Complex hi{c, s};
      const auto dim = static_cast<std::uint64_t>(psi.size());
      for (std::uint64_t b = 0; b < dim; ++b) psi[static_cast<Index>(b)] *= (b & mask) ? hi : lo;
      break;
    }
    case Pauli::I:
      break;
  }
}

void apply_fixed(Amplitudes& psi, std::size_t n, const GateOp& g) {
  const auto dim = static_cast<std::uint64_t>(psi.size());
  switch (g.kind) {
    case GateKind::H: {
      const double r = M_SQRT1_2;
      apply_1q(psi, qubit_mask(g.targets[0], n), {r, 0}, {r, 0}, {r, 0}, {-r, 0});
      break;
    }
    case GateKind::CZ: {
      const auto both = qubit_mask(g.targets[0], n) | qubit_mask(g.targets[1], n);
      for (std::uint64_t b = 0; b < dim; ++b) {
        if ((b & both) == both) psi[static_cast<Index>(b)] = -psi[static_cast<Index>(b)];
      }
      break;
    }
    case GateKind::CNOT: {
      const auto control = qubit_mask(g.targets[0], n);
      const auto target = qubit_mask(g.targets[1], n);
      for (std::uint64_t b = 0; b < dim; ++b) {
        if ((b & control) && !(b & target)) {
          std::swap(psi[static_cast<Index>(b)], psi[static_cast<Index>(b | target)]);
        }
      }
      break;
    }
    default:
      break;
  }
}

// out += factor * P_q |psi>
void add_pauli_action(Amplitudes& out, const Amplitudes& psi, std::uint64_t mask, Pauli p, Complex factor) {
  const auto dim = static_cast<std::uint64_t>(psi.size());
  const Complex i_factor = factor * Complex{0, 1};
  for (std::uint64_t b = 0; b < dim; ++b) {
    const auto idx = static_cast<Index>(b);
    switch (p) {
      case Pauli::X:
        out[idx] += factor * psi[static_cast<Index>(b ^ mask)];
        break;
      case Pauli::Y:
        // Y|0> = i|1>, Y|1> = -i|0>
        out[idx] += (b & mask) ? i_factor * psi[static_cast<Index>(b ^ mask)]
                               : -i_factor * psi[static_cast<Index>(b ^ mask)];
        break;
      case Pauli::Z:
        out[idx] += (b & mask) ? -factor * psi[idx] : factor * psi[idx];
        break;
      case Pauli::I:
        out[idx] += factor * psi[idx];
        break;
    }
  }
}

// <phi| P_q |lambda>
Complex pauli_matrix_element(const Amplitudes& phi, const Amplitudes& lambda, std::uint64_t mask, Pauli p) {
  Amplitudes tmp = Amplitudes::Zero(lambda.size());
  add_pauli_action(tmp, lambda, mask, p, {1, 0});
  return phi.dot(tmp);  // Eigen's dot conjugates the first argument
}

void check_params(const CircuitIR& circuit, std::span<const double> params) {
  if (params.size() != circuit.n_params()) {
    throw DimensionError("circuit expects " + std::to_string(circuit.n_params()) +
                         " parameters, got " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!std::isfinite(params[i])) {
      throw NumericalError("parameter " + std::to_string(i) + " is not finite");
    }
  }
}

}  // namespace

double gate_angle(const GateOp& gate, std::span<const double> params) {
  if (gate.param_slot) return gate.scale * params[*gate.param_slot];
  return gate.fixed_angle;
}

void apply_gate(Amplitudes& psi, std::size_t n_qubits, const GateOp& gate, double angle) {
  const Pauli gen = gate.generator();
  if (gen != Pauli::I) {
    apply_rotation(psi, qubit_mask(gate.targets[0], n_qubits), gen, angle);
  } else {
    apply_fixed(psi, n_qubits, gate);
  }
}

void apply_gate_inverse(Amplitudes& psi, std::size_t n_qubits, const GateOp& gate, double angle) {
  apply_gate(psi, n_qubits, gate, -angle);  // H, CZ, CNOT are self-inverse and ignore the angle
}

Statevector run_circuit(const CircuitIR& circuit, std::span<const double> params) {
  check_params(circuit, params);
  Statevector state(circuit.n_qubits());
  for (const auto& g : circuit.gates()) {
    apply_gate(state.amplitudes(), circuit.n_qubits(), g, gate_angle(g, params));
  }
  return state;
}

StateWithDerivatives derivative_states(const CircuitIR& circuit, std::span<const double> params) {
  check_params(circuit, params);
  const std::size_t n = circuit.n_qubits();
  Statevector state(n);
  std::vector<Amplitudes> derivs(circuit.n_params());
  std::vector<bool> started(circuit.n_params(), false);

  for (const auto& g : circuit.gates()) {
    const double angle = gate_angle(g, params);
    apply_gate(state.amplitudes(), n, g, angle);
    for (std::size_t i = 0; i < derivs.size(); ++i) {
      if (started[i]) apply_gate(derivs[i], n, g, angle);
    }
    if (g.param_slot) {
      // d/dtheta exp(-i s theta P/2) = (-i s P/2) exp(-i s theta P/2)
      const auto slot = *g.param_slot;
      if (!started[slot]) {
        derivs[slot] = Amplitudes::Zero(state.amplitudes().size());
        started[slot] = true;
      }
      add_pauli_action(derivs[slot], state.amplitudes(), qubit_mask(g.targets[0], n), g.generator(),
                       Complex{0, -0.5 * g.scale});
    }
  }
  return {std::move(state), std::move(derivs)};
}

Amplitudes derivative_state(const CircuitIR& circuit, std::span<const double> params, std::size_t i) {
  check_params(circuit, params);
  if (i >= circuit.n_params()) {
    throw DimensionError("parameter index " + std::to_string(i) + " out of range for " +
                         std::to_string(circuit.n_params()) + " parameters");
  }
  const std::size_t n = circuit.n_qubits();
  Statevector state(n);
  Amplitudes deriv = Amplitudes::Zero(state.amplitudes().size());
  bool started = false;
  for (const auto& g : circuit.gates()) {
    const double angle = gate_angle(g, params);
    apply_gate(state.amplitudes(), n, g, angle);
    if (started) apply_gate(deriv, n, g, angle);
    if (g.param_slot && *g.param_slot == i) {
      add_pauli_action(deriv, state.amplitudes(), qubit_mask(g.targets[0], n), g.generator(),
                       Complex{0, -0.5 * g.scale});
      started = true;
    }
  }
  return deriv;
}

EnergyGradient adjoint_energy_gradient(const CircuitIR& circuit, const PauliSum& hamiltonian,
                                       std::span<const double> params) {
  const std::size_t n = circuit.n_qubits();
  Statevector state = run_circuit(circuit, params);
  Amplitudes phi = state.amplitudes();
  Amplitudes lambda = apply_pauli_sum(phi, n, hamiltonian);

  EnergyGradient out;
  const Complex e = phi.dot(lambda);
  if (!std::isfinite(e.real()) || std::abs(e.imag()) >= 1e-10) {
    throw NumericalError("energy has imaginary residue " + std::to_string(e.imag()));
  }
  out.energy = e.real();
  out.gradient = RealVector::Zero(static_cast<Index>(circuit.n_params()));

  // Walking backwards, phi is the state right after gate g and
  // lambda = U_{>g}^dagger H |psi>; then <d psi|H|psi> = phi^dagger (i s P/2) lambda.
  const auto& gates = circuit.gates();
  for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
    const auto& g = *it;
    const double angle = gate_angle(g, params);
    if (g.param_slot) {
      const Complex m = pauli_matrix_element(phi, lambda, qubit_mask(g.targets[0], n), g.generator());
      out.gradient[static_cast<Index>(*g.param_slot)] += 2.0 * (Complex{0, 0.5 * g.scale} * m).real();
    }
    apply_gate_inverse(phi, n, g, angle);
    apply_gate_inverse(lambda, n, g, angle);
  }
  return out;
}

}  // namespace vqopt
