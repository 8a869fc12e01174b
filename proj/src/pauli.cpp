#include "vqopt/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "vqopt/error.hpp"

namespace vqopt {
namespace {

// P|b> = i^n_y (-1)^popcount(b & z) |b ^ x>
struct PauliMasks {
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  Complex y_phase{1.0, 0.0};
};

PauliMasks masks_of(const PauliTerm& term) {
  PauliMasks m;
  const std::size_t n = term.ops.size();
  int n_y = 0;
  for (std::size_t q = 0; q < n; ++q) {
    const auto bit = qubit_mask(q, n);
    switch (term.ops[q]) {
      case Pauli::I:
        break;
      case Pauli::X:
        m.x |= bit;
        break;
      case Pauli::Y:
        m.x |= bit;
        m.z |= bit;
        ++n_y;
        break;
      case Pauli::Z:
        m.z |= bit;
        break;
    }
  }
  static constexpr Complex kPowersOfI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  m.y_phase = kPowersOfI[n_y % 4];
  return m;
}

inline double parity_sign(std::uint64_t b, std::uint64_t z) {
  return (std::popcount(b & z) & 1) ? -1.0 : 1.0;
}

Pauli pauli_from_char(char c, bool& ok) {
  ok = true;
  switch (c) {
    case 'I':
      return Pauli::I;
    case 'X':
      return Pauli::X;
    case 'Y':
      return Pauli::Y;
    case 'Z':
      return Pauli::Z;
    default:
      ok = false;
      return Pauli::I;
  }
}

void check_dims(std::size_t state_qubits, std::size_t op_qubits) {
  if (state_qubits != op_qubits) {
    throw DimensionError("operator acts on " + std::to_string(op_qubits) +
                         " qubits but state has " + std::to_string(state_qubits));
  }
}

}  // namespace

char to_char(Pauli p) {
  static constexpr char kLetters[] = {'I', 'X', 'Y', 'Z'};
  return kLetters[static_cast<int>(p)];
}

PauliTerm PauliTerm::from_string(double coefficient, std::string_view letters) {
  PauliTerm term;
  term.coefficient = coefficient;
  term.ops.reserve(letters.size());
  for (char c : letters) {
    bool ok = false;
    term.ops.push_back(pauli_from_char(c, ok));
    if (!ok) throw Error(std::string("invalid Pauli letter '") + c + "'");
  }
  return term;
}

std::string PauliTerm::label() const {
  std::string s;
  s.reserve(ops.size());
  for (auto p : ops) s.push_back(to_char(p));
  return s;
}

bool PauliTerm::is_diagonal() const noexcept {
  return std::all_of(ops.begin(), ops.end(),
                     [](Pauli p) { return p == Pauli::I || p == Pauli::Z; });
}

PauliSum::PauliSum(std::size_t n_qubits, std::vector<PauliTerm> terms) : n_qubits_(n_qubits) {
  if (n_qubits == 0 || n_qubits > kMaxQubits) {
    throw DimensionError("PauliSum qubit count must be in [1, " + std::to_string(kMaxQubits) +
                         "], got " + std::to_string(n_qubits));
  }
  std::map<std::string, double> merged;
  for (const auto& t : terms) {
    if (t.ops.size() != n_qubits) {
      throw DimensionError("term " + t.label() + " has length " + std::to_string(t.ops.size()) +
                           ", expected " + std::to_string(n_qubits));
    }
    if (!std::isfinite(t.coefficient)) {
      throw NumericalError("non-finite coefficient on term " + t.label());
    }
    merged[t.label()] += t.coefficient;
  }
  terms_.reserve(merged.size());
  for (const auto& [label, c] : merged) terms_.push_back(PauliTerm::from_string(c, label));
}

bool PauliSum::is_diagonal() const noexcept {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const PauliTerm& t) { return t.is_diagonal(); });
}

PauliSum PauliSum::combine(double a, const PauliSum& other, double b) const {
  check_dims(n_qubits_, other.n_qubits_);
  std::vector<PauliTerm> all;
  all.reserve(terms_.size() + other.terms_.size());
  for (auto t : terms_) {
    t.coefficient *= a;
    all.push_back(std::move(t));
  }
  for (auto t : other.terms_) {
    t.coefficient *= b;
    all.push_back(std::move(t));
  }
  return PauliSum(n_qubits_, std::move(all));
}

PauliSum parse_pauli_sum(std::string_view text, std::size_t n_qubits) {
  std::vector<PauliTerm> terms;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      const auto start = pos;
      while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      if (pos > start) tokens.push_back(line.substr(start, pos - start));
    }
    if (tokens.empty()) continue;
    if (tokens.size() != 2) {
      throw ParseError("expected '<coefficient> <pauli string>', got " +
                           std::to_string(tokens.size()) + " fields",
                       line_no);
    }

    double coefficient = 0.0;
    const auto coeff = tokens[0];
    const char* first = coeff.data();
    if (!coeff.empty() && coeff.front() == '+') ++first;  // from_chars rejects a leading '+'
    const auto [ptr, ec] = std::from_chars(first, coeff.data() + coeff.size(), coefficient);
    if (ec != std::errc{} || ptr != coeff.data() + coeff.size() || !std::isfinite(coefficient)) {
      throw ParseError("malformed coefficient '" + std::string(coeff) + "'", line_no);
    }

    const auto letters = tokens[1];
    if (letters.size() != n_qubits) {
      throw ParseError("pauli string '" + std::string(letters) + "' has length " +
                           std::to_string(letters.size()) + ", expected " +
                           std::to_string(n_qubits),
                       line_no);
    }
    PauliTerm term;
    term.coefficient = coefficient;
    for (char c : letters) {
      bool ok = false;
      term.ops.push_back(pauli_from_char(c, ok));
      if (!ok) throw ParseError(std::string("invalid Pauli letter '") + c + "'", line_no);
    }
    terms.push_back(std::move(term));
  }
  return PauliSum(n_qubits, std::move(terms));
}

std::string format_pauli_sum(const PauliSum& sum) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(17);
  for (const auto& t : sum.terms()) out << t.coefficient << ' ' << t.label() << '\n';
  return out.str();
}

Statevector apply_pauli_term(const Statevector& state, const PauliTerm& term) {
  check_dims(state.n_qubits(), term.n_qubits());
  const auto m = masks_of(term);
  const auto& in = state.amplitudes();
  Amplitudes out(in.size());
  const Complex scale = term.coefficient * m.y_phase;
  for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(in.size()); ++b) {
    out[static_cast<Eigen::Index>(b ^ m.x)] = scale * parity_sign(b, m.z) * in[static_cast<Eigen::Index>(b)];
  }
  return Statevector(state.n_qubits(), std::move(out));
}

Amplitudes apply_pauli_sum(const Amplitudes& psi, std::size_t n_qubits, const PauliSum& obs) {
  check_dims(n_qubits, obs.n_qubits());
  if (psi.size() != (Eigen::Index{1} << n_qubits)) {
    throw DimensionError("amplitude vector does not match the qubit count");
  }
  Amplitudes out = Amplitudes::Zero(psi.size());
  const auto dim = static_cast<std::uint64_t>(psi.size());
  for (const auto& term : obs.terms()) {
    const auto m = masks_of(term);
    const Complex scale = term.coefficient * m.y_phase;
    for (std::uint64_t b = 0; b < dim; ++b) {
      out[static_cast<Eigen::Index>(b ^ m.x)] += scale * parity_sign(b, m.z) * psi[static_cast<Eigen::Index>(b)];
    }
  }
  return out;
}

double expectation(const Statevector& state, const PauliSum& obs) {
  check_dims(state.n_qubits(), obs.n_qubits());
  const auto& psi = state.amplitudes();
  const auto dim = static_cast<std::uint64_t>(psi.size());
  Complex total{0.0, 0.0};
  for (const auto& term : obs.terms()) {
    const auto m = masks_of(term);
    Complex acc{0.0, 0.0};
    for (std::uint64_t b = 0; b < dim; ++b) {
      acc += std::conj(psi[static_cast<Eigen::Index>(b ^ m.x)]) * parity_sign(b, m.z) *
             psi[static_cast<Eigen::Index>(b)];
    }
    total += term.coefficient * m.y_phase * acc;
  }
  if (!std::isfinite(total.real()) || std::abs(total.imag()) >= 1e-10) {
    throw NumericalError("expectation value has imaginary residue " + std::to_string(total.imag()));
  }
  return total.real();
}

SpectralBounds exact_bounds(const PauliSum& obs) {
  const std::size_t n = obs.n_qubits();
  if (n > kMaxDenseQubits) {
    throw DimensionError("exact bounds limited to " + std::to_string(kMaxDenseQubits) +
                         " qubits, got " + std::to_string(n));
  }
  const std::uint64_t dim = std::uint64_t{1} << n;

  if (obs.is_diagonal()) {
    std::vector<double> energies(dim, 0.0);
    for (const auto& term : obs.terms()) {
      const auto m = masks_of(term);
      for (std::uint64_t b = 0; b < dim; ++b) energies[b] += term.coefficient * parity_sign(b, m.z);
    }
    const auto [lo, hi] = std::minmax_element(energies.begin(), energies.end());
    return {*lo, *hi};
  }

  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& term : obs.terms()) {
    const auto m = masks_of(term);
    const Complex scale = term.coefficient * m.y_phase;
    for (std::uint64_t b = 0; b < dim; ++b) {
      h(static_cast<Eigen::Index>(b ^ m.x), static_cast<Eigen::Index>(b)) += scale * parity_sign(b, m.z);
    }
  }
  // Real-symmetric operators (e.g. Jordan-Wigner molecular Hamiltonians) take the cheaper path.
  Eigen::VectorXd eig;
  if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.real(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("dense eigensolve failed");
    eig = solver.eigenvalues();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("dense eigensolve failed");
    eig = solver.eigenvalues();
  }
  return {eig.minCoeff(), eig.maxCoeff()};
}

}  // namespace vqopt
