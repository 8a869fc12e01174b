#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vqopt/statevector.hpp"

namespace vqopt {

enum class Pauli : std::uint8_t { I, X, Y, Z };

char to_char(Pauli p);

/// coefficient * (P_0 (x) P_1 (x) ... (x) P_{n-1}); ops[0] acts on qubit 0.
struct PauliTerm {
  double coefficient = 1.0;
  std::vector<Pauli> ops;

  static PauliTerm from_string(double coefficient, std::string_view letters);

  std::size_t n_qubits() const noexcept { return ops.size(); }
  std::string label() const;
  bool is_diagonal() const noexcept;
};

/// Real linear combination of Pauli strings on a fixed register.
///
/// Terms with identical strings are merged on construction by exact
/// summation; the stored order is lexicographic in the string label
/// (I < X < Y < Z), so two sums with the same content compare equal
/// regardless of input order.
class PauliSum {
 public:
  PauliSum(std::size_t n_qubits, std::vector<PauliTerm> terms);

  std::size_t n_qubits() const noexcept { return n_qubits_; }
  const std::vector<PauliTerm>& terms() const noexcept { return terms_; }

  /// True when every term is built from I and Z only.
  bool is_diagonal() const noexcept;

  /// a*this + b*other.
  PauliSum combine(double a, const PauliSum& other, double b) const;

 private:
  std::size_t n_qubits_;
  std::vector<PauliTerm> terms_;
};

/// Parses the line format `<coefficient> <pauli string>`; `#` starts a comment.
/// Throws ParseError naming the offending line.
PauliSum parse_pauli_sum(std::string_view text, std::size_t n_qubits);

/// Writes the same line format parse_pauli_sum reads, at full precision.
std::string format_pauli_sum(const PauliSum& sum);

/// coefficient * P|psi>, computed without materializing P.
Statevector apply_pauli_term(const Statevector& state, const PauliTerm& term);

/// O|psi> as a raw amplitude vector.
Amplitudes apply_pauli_sum(const Amplitudes& psi, std::size_t n_qubits, const PauliSum& obs);

/// Re <psi|O|psi>. Throws NumericalError if |Im| >= 1e-10.
double expectation(const Statevector& state, const PauliSum& obs);

struct SpectralBounds {
  double e_min = 0.0;
  double e_max = 0.0;
};

/// Largest register accepted by exact_bounds.
inline constexpr std::size_t kMaxDenseQubits = 14;

/// Exact extremal eigenvalues: basis enumeration for diagonal operators,
/// dense Hermitian eigensolve otherwise.
SpectralBounds exact_bounds(const PauliSum& obs);

}  // namespace vqopt
