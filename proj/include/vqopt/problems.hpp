#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vqopt/pauli.hpp"
#include "vqopt/simulator.hpp"

namespace vqopt {

/// Undirected simple graph. Edges are stored with first < second, sorted.
struct Graph {
  std::size_t n_vertices = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  /// Validates and normalizes; throws DimensionError on self-loops,
  /// duplicates or out-of-range vertices.
  static Graph make(std::size_t n_vertices, std::vector<std::pair<std::size_t, std::size_t>> edges);
};

/// First line `n_vertices`, then one `i j` pair per line. `#` comments allowed.
Graph parse_graph(std::string_view text);
std::string format_graph(const Graph& graph);

/// Erdos-Renyi G(n, p) drawn from the graph stream of `seed`; redrawn until
/// at least one edge exists.
Graph random_graph(std::size_t n_vertices, double edge_probability, std::uint64_t seed);

enum class InitMode { RandomUniform, HartreeFockPerturbed, Fixed };

const char* to_string(InitMode mode);
InitMode parse_init_mode(std::string_view name);

struct ProblemInstance {
  CircuitIR circuit;
  PauliSum hamiltonian;
  std::map<std::string, PauliSum> observables;
  std::optional<SpectralBounds> bounds;
  InitMode init_mode = InitMode::RandomUniform;
  /// Occupation bitmask, one character per qubit, from chemistry headers.
  std::optional<std::string> occupation;
  std::optional<std::size_t> n_electrons;
};

/// Fixed RY(pi/4) wall, then per layer one rotation per qubit with a random
/// axis and a nearest-neighbour CZ chain. H = Z0 Z1.
ProblemInstance build_barren_plateau(std::size_t n_qubits, std::size_t n_layers, std::uint64_t axis_seed);

/// -sum_{(i,j)} (1 - Z_i Z_j) / 2. Throws DimensionError on an edgeless graph.
PauliSum maxcut_hamiltonian(const Graph& graph);

/// Hadamard wall, then per layer CNOT-RZ(2 gamma)-CNOT per edge and RX(2 beta)
/// on every qubit. gamma and beta are one slot each per layer.
ProblemInstance build_qaoa(const Graph& graph, std::size_t n_layers);

/// Per layer RY on each qubit then a CNOT ring 0->1->...->n-1->0.
CircuitIR build_hardware_efficient(std::size_t n_qubits, std::size_t n_layers);

/// sum_i (I - Z_i) / 2.
PauliSum number_operator(std::size_t n_qubits);

/// Spin projection with even qubits alpha and odd qubits beta.
PauliSum sz_operator(std::size_t n_qubits);

/// Reads a Hamiltonian file (qubit count taken from the `# n_qubits=` header
/// or the first term) plus named observable files, and attaches a
/// hardware-efficient circuit with `n_layers` layers.
ProblemInstance load_problem(const std::filesystem::path& hamiltonian_path,
                             const std::map<std::string, std::filesystem::path>& observable_paths,
                             std::size_t n_layers);

/// Parses a Pauli file, honouring the header comments.
struct PauliFile {
  PauliSum sum;
  std::optional<std::string> occupation;
  std::optional<std::size_t> n_electrons;
};
PauliFile read_pauli_file(const std::filesystem::path& path);

/// Standard deviation of the Hartree-Fock perturbation, radians.
inline constexpr double kHartreeFockSigma = 0.01;

/// Initial parameters for `seed`. `fixed` is used by InitMode::Fixed and must
/// have length n_params. `sigma` overrides the Hartree-Fock noise.
RealVector initial_params(const ProblemInstance& instance, InitMode mode, std::uint64_t seed,
                          const std::optional<RealVector>& fixed = std::nullopt,
                          double sigma = kHartreeFockSigma);

}  // namespace vqopt
