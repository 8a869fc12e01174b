#pragma once

// Independent reference implementations for the tests: dense Kronecker
// products and finite differences, sharing no kernels with the library.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "vqopt/rng.hpp"
#include "vqopt/simulator.hpp"

namespace oracle {

using vqopt::Complex;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat pauli_matrix(char p) {
  Mat m(2, 2);
  const Complex i(0, 1);
  switch (p) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1; break;
  }
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  }
  return out;
}

/// Dense matrix of a Pauli string; leftmost letter is the most significant factor.
inline Mat pauli_string(const std::string& letters) {
  Mat m = Mat::Identity(1, 1);
  for (char c : letters) m = kron(m, pauli_matrix(c));
  return m;
}

inline Mat dense(const vqopt::PauliSum& sum) {
  const auto dim = Eigen::Index{1} << sum.n_qubits();
  Mat m = Mat::Zero(dim, dim);
  for (const auto& t : sum.terms()) m += t.coefficient * pauli_string(t.label());
  return m;
}

/// Single-qubit operator `u` on qubit q, embedded by Kronecker products.
inline Mat embed(const Mat& u, std::size_t q, std::size_t n) {
  Mat m = Mat::Identity(1, 1);
  for (std::size_t k = 0; k < n; ++k) m = kron(m, k == q ? u : Mat::Identity(2, 2));
  return m;
}

/// exp(-i a P / 2) = cos(a/2) I - i sin(a/2) P.
inline Mat rotation(char p, double a) {
  return std::cos(a / 2) * Mat::Identity(2, 2) - Complex(0, std::sin(a / 2)) * pauli_matrix(p);
}

/// Two-qubit controlled-U from projectors: |0><0|_c (x) I + |1><1|_c (x) U_t.
inline Mat controlled(const Mat& u, std::size_t c, std::size_t t, std::size_t n) {
  Mat p0(2, 2), p1(2, 2);
  p0 << 1, 0, 0, 0;
  p1 << 0, 0, 0, 1;
  return embed(p0, c, n) + embed(p1, c, n) * embed(u, t, n);
}

inline Mat gate_matrix(const vqopt::GateOp& g, double angle, std::size_t n) {
  using vqopt::GateKind;
  const auto q = g.targets[0];
  switch (g.kind) {
    case GateKind::RX: return embed(rotation('X', angle), q, n);
    case GateKind::RY: return embed(rotation('Y', angle), q, n);
    case GateKind::RZ: return embed(rotation('Z', angle), q, n);
    case GateKind::FIXED_RY: return embed(rotation('Y', g.fixed_angle), q, n);
    case GateKind::H: {
      Mat h(2, 2);
      h << 1, 1, 1, -1;
      return embed(h / std::sqrt(2.0), q, n);
    }
    case GateKind::CZ: return controlled(pauli_matrix('Z'), q, g.targets[1], n);
    case GateKind::CNOT: return controlled(pauli_matrix('X'), q, g.targets[1], n);
  }
  return Mat::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n);
}

/// Dense-matrix circuit simulation from |0...0>.
inline Vec run(const vqopt::CircuitIR& c, const Eigen::VectorXd& theta) {
  const auto dim = Eigen::Index{1} << c.n_qubits();
  Vec psi = Vec::Zero(dim);
  psi[0] = 1;
  for (const auto& g : c.gates()) {
    const double angle = g.param_slot ? g.scale * theta[static_cast<Eigen::Index>(*g.param_slot)] : 0.0;
    psi = gate_matrix(g, angle, c.n_qubits()) * psi;
  }
  return psi;
}

inline double energy(const vqopt::CircuitIR& c, const Mat& h, const Eigen::VectorXd& theta) {
  const Vec psi = run(c, theta);
  return psi.dot(h * psi).real();
}

/// Central-difference derivative state.
inline Vec fd_state(const vqopt::CircuitIR& c, const Eigen::VectorXd& theta, Eigen::Index i, double h = 1e-5) {
  Eigen::VectorXd tp = theta, tm = theta;
  tp[i] += h;
  tm[i] -= h;
  return (run(c, tp) - run(c, tm)) / (2 * h);
}

inline Eigen::VectorXd fd_gradient(const vqopt::CircuitIR& c, const Mat& h, const Eigen::VectorXd& theta,
                                   double step = 1e-5) {
  Eigen::VectorXd g(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Eigen::VectorXd tp = theta, tm = theta;
    tp[i] += step;
    tm[i] -= step;
    g[i] = (energy(c, h, tp) - energy(c, h, tm)) / (2 * step);
  }
  return g;
}

/// QFIM assembled from finite-difference derivative states.
inline Eigen::MatrixXd fd_qfim(const vqopt::CircuitIR& c, const Eigen::VectorXd& theta) {
  const auto p = theta.size();
  const Vec psi = run(c, theta);
  std::vector<Vec> d;
  for (Eigen::Index i = 0; i < p; ++i) d.push_back(fd_state(c, theta, i));
  Eigen::MatrixXd f(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const auto ii = static_cast<std::size_t>(i), jj = static_cast<std::size_t>(j);
      f(i, j) = d[ii].dot(d[jj]).real() - (d[ii].dot(psi) * psi.dot(d[jj])).real();
    }
  }
  return f;
}

/// Random circuit on n qubits: `layers` layers of random-axis rotations,
/// random entanglers and occasional fixed gates. Some slots are shared.
inline vqopt::CircuitIR random_circuit(vqopt::Rng& rng, std::size_t n, std::size_t layers, bool share = false) {
  using vqopt::GateKind;
  static constexpr GateKind kRot[] = {GateKind::RX, GateKind::RY, GateKind::RZ};
  vqopt::CircuitBuilder b(n);
  if (rng.below(2) == 0) {
    for (std::size_t q = 0; q < n; ++q) b.h(q);
  }
  for (std::size_t l = 0; l < layers; ++l) {
    std::size_t shared = share ? b.new_param(l) : 0;
    for (std::size_t q = 0; q < n; ++q) {
      if (share && rng.below(3) == 0) {
        b.rotation(kRot[rng.below(3)], q, shared, 1.0 + static_cast<double>(rng.below(3)));
      } else {
        b.rotation(kRot[rng.below(3)], q, b.new_param(l));
      }
    }
    if (share) b.rotation(GateKind::RZ, rng.below(n), shared, 2.0);
    if (n > 1) {
      for (std::size_t q = 0; q + 1 < n; ++q) {
        switch (rng.below(3)) {
          case 0: b.cz(q, q + 1); break;
          case 1: b.cnot(q, q + 1); break;
          default: b.cnot(q + 1, q); break;
        }
      }
    }
    if (rng.below(3) == 0) b.fixed_ry(rng.below(n), rng.uniform() * 3.0);
  }
  return b.build();
}

inline Eigen::VectorXd random_angles(vqopt::Rng& rng, std::size_t p) {
  Eigen::VectorXd t(static_cast<Eigen::Index>(p));
  for (auto& x : t) x = 2 * std::numbers::pi * rng.uniform();
  return t;
}

/// Random Hermitian PauliSum with `terms` random strings.
inline vqopt::PauliSum random_observable(vqopt::Rng& rng, std::size_t n, std::size_t terms) {
  static constexpr char kLetters[] = {'I', 'X', 'Y', 'Z'};
  std::vector<vqopt::PauliTerm> out;
  for (std::size_t t = 0; t < terms; ++t) {
    std::string s;
    for (std::size_t q = 0; q < n; ++q) s += kLetters[rng.below(4)];
    out.push_back(vqopt::PauliTerm::from_string(2 * rng.uniform() - 1, s));
  }
  return vqopt::PauliSum(n, std::move(out));
}

}  // namespace oracle
