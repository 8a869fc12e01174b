#include "vqopt/problems.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "vqopt/error.hpp"
#include "vqopt/rng.hpp"

namespace vqopt {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    const auto start = pos;
    while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos > start) out.push_back(line.substr(start, pos - start));
  }
  return out;
}

std::size_t parse_index(std::string_view token, std::size_t line_no) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError("expected a non-negative integer, got '" + std::string(token) + "'", line_no);
  }
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PauliTerm z_term(std::size_t n, std::initializer_list<std::size_t> qubits, double coefficient) {
  PauliTerm t{coefficient, std::vector<Pauli>(n, Pauli::I)};
  for (auto q : qubits) t.ops[q] = Pauli::Z;
  return t;
}

}  // namespace

Graph Graph::make(std::size_t n_vertices, std::vector<std::pair<std::size_t, std::size_t>> edges) {
  if (n_vertices == 0) throw DimensionError("graph needs at least one vertex");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (auto& [a, b] : edges) {
    if (a >= n_vertices || b >= n_vertices) {
      throw DimensionError("edge (" + std::to_string(a) + ", " + std::to_string(b) + ") out of range");
    }
    if (a == b) throw DimensionError("self-loop on vertex " + std::to_string(a));
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second) {
      throw DimensionError("duplicate edge (" + std::to_string(a) + ", " + std::to_string(b) + ")");
    }
  }
  return {n_vertices, {seen.begin(), seen.end()}};
}

Graph parse_graph(std::string_view text) {
  std::optional<std::size_t> n;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (!n) {
      if (fields.size() != 1) throw ParseError("first line must hold the vertex count", line_no);
      n = parse_index(fields[0], line_no);
      continue;
    }
    if (fields.size() != 2) throw ParseError("expected 'i j'", line_no);
    const auto a = parse_index(fields[0], line_no);
    const auto b = parse_index(fields[1], line_no);
    if (a >= *n || b >= *n || a == b) throw ParseError("invalid edge", line_no);
    edges.emplace_back(a, b);
  }
  if (!n) throw ParseError("missing vertex count", line_no);
  try {
    return Graph::make(*n, std::move(edges));
  } catch (const DimensionError& e) {
    throw ParseError(e.what(), line_no);
  }
}

std::string format_graph(const Graph& graph) {
  std::string out = std::to_string(graph.n_vertices) + "\n";
  for (const auto& [a, b] : graph.edges) out += std::to_string(a) + " " + std::to_string(b) + "\n";
  return out;
}

Graph random_graph(std::size_t n_vertices, double edge_probability, std::uint64_t seed) {
  if (n_vertices < 2) throw DimensionError("random graph needs at least two vertices");
  if (!(edge_probability > 0.0 && edge_probability <= 1.0)) {
    throw DimensionError("edge probability must lie in (0, 1]");
  }
  Rng rng(seed, Stream::Graph);
  for (;;) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t a = 0; a < n_vertices; ++a) {
      for (std::size_t b = a + 1; b < n_vertices; ++b) {
        if (rng.uniform() < edge_probability) edges.emplace_back(a, b);
      }
    }
    if (!edges.empty()) return Graph::make(n_vertices, std::move(edges));
  }
}

const char* to_string(InitMode mode) {
  switch (mode) {
    case InitMode::RandomUniform: return "random_uniform";
    case InitMode::HartreeFockPerturbed: return "hartree_fock_perturbed";
    case InitMode::Fixed: return "fixed";
  }
  return "?";
}

InitMode parse_init_mode(std::string_view name) {
  if (name == "random_uniform") return InitMode::RandomUniform;
  if (name == "hartree_fock_perturbed") return InitMode::HartreeFockPerturbed;
  if (name == "fixed") return InitMode::Fixed;
  throw ConfigError("unknown init mode '" + std::string(name) + "'");
}

ProblemInstance build_barren_plateau(std::size_t n_qubits, std::size_t n_layers, std::uint64_t axis_seed) {
  if (n_qubits < 2) throw DimensionError("barren plateau circuit needs at least two qubits");
  if (n_layers == 0) throw DimensionError("barren plateau circuit needs at least one layer");
  static constexpr GateKind kAxes[] = {GateKind::RX, GateKind::RY, GateKind::RZ};
  Rng rng(axis_seed, Stream::Axes);
  CircuitBuilder b(n_qubits);
  for (std::size_t q = 0; q < n_qubits; ++q) b.fixed_ry(q, std::numbers::pi / 4.0);
  for (std::size_t l = 0; l < n_layers; ++l) {
    for (std::size_t q = 0; q < n_qubits; ++q) b.rotation(kAxes[rng.below(3)], q, b.new_param(l));
    for (std::size_t q = 0; q + 1 < n_qubits; ++q) b.cz(q, q + 1);
  }
  PauliSum h(n_qubits, {z_term(n_qubits, {0, 1}, 1.0)});
  return {b.build(), std::move(h), {}, SpectralBounds{-1.0, 1.0}, InitMode::RandomUniform, {}, {}};
}

PauliSum maxcut_hamiltonian(const Graph& graph) {
  if (graph.edges.empty()) throw DimensionError("max-cut needs at least one edge");
  const auto n = graph.n_vertices;
  std::vector<PauliTerm> terms;
  terms.push_back(z_term(n, {}, -0.5 * static_cast<double>(graph.edges.size())));
  for (const auto& [a, b] : graph.edges) terms.push_back(z_term(n, {a, b}, 0.5));
  return PauliSum(n, std::move(terms));
}

ProblemInstance build_qaoa(const Graph& graph, std::size_t n_layers) {
  const auto n = graph.n_vertices;
  if (n > kMaxDenseQubits) throw DimensionError("QAOA instance exceeds " + std::to_string(kMaxDenseQubits) + " qubits");
  if (n_layers == 0) throw DimensionError("QAOA needs at least one layer");
  PauliSum h = maxcut_hamiltonian(graph);
  CircuitBuilder b(n);
  for (std::size_t q = 0; q < n; ++q) b.h(q);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const auto gamma = b.new_param(l);
    const auto beta = b.new_param(l);
    for (const auto& [i, j] : graph.edges) {
      b.cnot(i, j);
      b.rotation(GateKind::RZ, j, gamma, 2.0);
      b.cnot(i, j);
    }
    for (std::size_t q = 0; q < n; ++q) b.rotation(GateKind::RX, q, beta, 2.0);
  }
  auto bounds = exact_bounds(h);
  return {b.build(), std::move(h), {}, bounds, InitMode::RandomUniform, {}, {}};
}

CircuitIR build_hardware_efficient(std::size_t n_qubits, std::size_t n_layers) {
  if (n_qubits < 2) throw DimensionError("hardware-efficient ansatz needs at least two qubits");
  if (n_layers == 0) throw DimensionError("hardware-efficient ansatz needs at least one layer");
  CircuitBuilder b(n_qubits);
  for (std::size_t l = 0; l < n_layers; ++l) {
    for (std::size_t q = 0; q < n_qubits; ++q) b.rotation(GateKind::RY, q, b.new_param(l));
    for (std::size_t q = 0; q < n_qubits; ++q) b.cnot(q, (q + 1) % n_qubits);
  }
  return b.build();
}

PauliSum number_operator(std::size_t n_qubits) {
  std::vector<PauliTerm> terms;
  terms.push_back(z_term(n_qubits, {}, 0.5 * static_cast<double>(n_qubits)));
  for (std::size_t q = 0; q < n_qubits; ++q) terms.push_back(z_term(n_qubits, {q}, -0.5));
  return PauliSum(n_qubits, std::move(terms));
}

PauliSum sz_operator(std::size_t n_qubits) {
  if (n_qubits == 0 || n_qubits % 2 != 0) throw DimensionError("Sz needs an even number of spin orbitals");
  // (I - Z)/4 on alpha, -(I - Z)/4 on beta: the identity parts cancel.
  std::vector<PauliTerm> terms;
  for (std::size_t q = 0; q < n_qubits; ++q) terms.push_back(z_term(n_qubits, {q}, q % 2 == 0 ? -0.25 : 0.25));
  return PauliSum(n_qubits, std::move(terms));
}

PauliFile read_pauli_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  PauliFile out{PauliSum(1, {}), {}, {}};
  std::optional<std::size_t> n_qubits;

  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields[0].front() != '#') {
      if (!n_qubits && fields.size() == 2) n_qubits = fields[1].size();
      continue;
    }
    std::string_view header = line;
    header.remove_prefix(header.find('#') + 1);
    while (!header.empty() && std::isspace(static_cast<unsigned char>(header.front()))) header.remove_prefix(1);
    while (!header.empty() && std::isspace(static_cast<unsigned char>(header.back()))) header.remove_suffix(1);
    const auto eq = header.find('=');
    if (eq == std::string_view::npos) continue;
    const auto key = header.substr(0, eq);
    const auto value = header.substr(eq + 1);
    try {
      if (key == "n_qubits") n_qubits = parse_index(value, 0);
      else if (key == "n_electrons") out.n_electrons = parse_index(value, 0);
      else if (key == "occupation") out.occupation = std::string(value);
    } catch (const ParseError&) {
      throw Error(path.string() + ": malformed header '" + std::string(header) + "'");
    }
  }
  if (!n_qubits || *n_qubits == 0) throw Error(path.string() + ": cannot determine the qubit count");
  try {
    out.sum = parse_pauli_sum(text, *n_qubits);
  } catch (const ParseError& e) {
    throw Error(path.string() + ": " + e.what());
  }
  if (out.occupation) {
    const auto& occ = *out.occupation;
    if (occ.size() != *n_qubits || occ.find_first_not_of("01") != std::string::npos) {
      throw Error(path.string() + ": occupation '" + occ + "' does not match " + std::to_string(*n_qubits) + " qubits");
    }
    const auto ones = static_cast<std::size_t>(std::count(occ.begin(), occ.end(), '1'));
    if (out.n_electrons && *out.n_electrons != ones) {
      throw Error(path.string() + ": occupation has " + std::to_string(ones) + " electrons, header says " +
                  std::to_string(*out.n_electrons));
    }
  }
  return out;
}

ProblemInstance load_problem(const std::filesystem::path& hamiltonian_path,
                             const std::map<std::string, std::filesystem::path>& observable_paths,
                             std::size_t n_layers) {
  PauliFile ham = read_pauli_file(hamiltonian_path);
  const auto n = ham.sum.n_qubits();
  ProblemInstance inst{build_hardware_efficient(n, n_layers), std::move(ham.sum), {}, {},
                       InitMode::HartreeFockPerturbed, ham.occupation, ham.n_electrons};
  for (const auto& [name, path] : observable_paths) {
    PauliFile obs = read_pauli_file(path);
    if (obs.sum.n_qubits() != n) {
      throw DimensionError(path.string() + ": observable '" + name + "' acts on " +
                           std::to_string(obs.sum.n_qubits()) + " qubits, Hamiltonian on " + std::to_string(n));
    }
    inst.observables.emplace(name, std::move(obs.sum));
  }
  if (n <= kMaxDenseQubits) inst.bounds = exact_bounds(inst.hamiltonian);
  if (!inst.occupation) inst.init_mode = InitMode::RandomUniform;
  return inst;
}

RealVector initial_params(const ProblemInstance& instance, InitMode mode, std::uint64_t seed,
                          const std::optional<RealVector>& fixed, double sigma) {
  const auto& circuit = instance.circuit;
  const auto p = static_cast<Eigen::Index>(circuit.n_params());
  switch (mode) {
    case InitMode::Fixed: {
      if (!fixed) throw ConfigError("fixed init mode needs a parameter vector");
      if (fixed->size() != p) {
        throw DimensionError("fixed parameters have length " + std::to_string(fixed->size()) + ", circuit has " +
                             std::to_string(p));
      }
      return *fixed;
    }
    case InitMode::RandomUniform: {
      Rng rng(seed, Stream::Init);
      RealVector theta(p);
      for (Eigen::Index i = 0; i < p; ++i) theta[i] = 2.0 * std::numbers::pi * rng.uniform();
      return theta;
    }
    case InitMode::HartreeFockPerturbed: {
      if (!instance.occupation) throw ConfigError("Hartree-Fock init needs occupation metadata");
      const auto& occ = *instance.occupation;
      RealVector theta = RealVector::Zero(p);
      for (const auto& g : circuit.gates()) {
        if (g.kind != GateKind::RY || !g.param_slot || circuit.layer_of(*g.param_slot) != 0) continue;
        if (occ.at(g.targets[0]) == '1') theta[static_cast<Eigen::Index>(*g.param_slot)] = std::numbers::pi;
      }
      if (sigma > 0.0) {
        Rng rng(seed, Stream::Init);
        for (Eigen::Index i = 0; i < p; ++i) theta[i] += sigma * rng.normal();
      }
      return theta;
    }
  }
  throw ConfigError("unknown init mode");
}

}  // namespace vqopt
