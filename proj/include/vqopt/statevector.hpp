#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string_view>

namespace vqopt {

using Complex = std::complex<double>;
using Amplitudes = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Largest register the dense simulator accepts.
inline constexpr std::size_t kMaxQubits = 24;

/// Index mask of qubit `q` in an `n`-qubit register. Qubit 0 is the most
/// significant bit of the basis index (and the leftmost letter of a Pauli string).
inline std::uint64_t qubit_mask(std::size_t q, std::size_t n) {
  return std::uint64_t{1} << (n - 1 - q);
}

/// Dense pure state on n qubits, 2^n amplitudes.
class Statevector {
 public:
  /// |0...0> on `n_qubits` qubits.
  explicit Statevector(std::size_t n_qubits);
  Statevector(std::size_t n_qubits, Amplitudes amplitudes);

  /// Computational basis state, e.g. "0110" (qubit 0 first).
  static Statevector from_bitstring(std::string_view bits);

  std::size_t n_qubits() const noexcept { return n_qubits_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(amps_.size()); }

  const Amplitudes& amplitudes() const noexcept { return amps_; }
  Amplitudes& amplitudes() noexcept { return amps_; }

  Complex operator[](std::size_t i) const { return amps_[static_cast<Eigen::Index>(i)]; }

  double norm_squared() const { return amps_.squaredNorm(); }

 private:
  std::size_t n_qubits_;
  Amplitudes amps_;
};

}  // namespace vqopt
