#include <gtest/gtest.h>

#include <bit>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "oracles.hpp"
#include "vqopt/error.hpp"
#include "vqopt/metric.hpp"
#include "vqopt/problems.hpp"

using namespace vqopt;
using std::numbers::pi;

namespace {

const std::filesystem::path kFixtures = VQOPT_FIXTURES;

/// Largest cut by exhaustive bipartition.
std::size_t brute_max_cut(const Graph& g) {
  std::size_t best = 0;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << g.n_vertices); ++s) {
    std::size_t cut = 0;
    for (const auto& [a, b] : g.edges) cut += ((s >> a) & 1) != ((s >> b) & 1);
    best = std::max(best, cut);
  }
  return best;
}

double energy(const ProblemInstance& inst, const RealVector& theta, const PauliSum& obs) {
  return expectation(run_circuit(inst.circuit, as_span(theta)), obs);
}

}  // namespace

TEST(GraphIo, ParseAndFormat) {
  const auto g = parse_graph("# square\n4\n0 1\n2 1\n2 3\n3 0\n");
  EXPECT_EQ(g.n_vertices, 4u);
  ASSERT_EQ(g.edges.size(), 4u);
  EXPECT_EQ(g.edges[1], (std::pair<std::size_t, std::size_t>{0, 3}));
  EXPECT_EQ(parse_graph(format_graph(g)).edges, g.edges);
}

TEST(GraphIo, Errors) {
  EXPECT_THROW(parse_graph(""), ParseError);
  EXPECT_THROW(parse_graph("3\n0 3\n"), ParseError);
  EXPECT_THROW(parse_graph("3\n1 1\n"), ParseError);
  EXPECT_THROW(parse_graph("3\n0 1\n1 0\n"), ParseError);
  EXPECT_THROW(parse_graph("3\n0 x\n"), ParseError);
  try {
    parse_graph("3\n0 1\n0 1 2\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(GraphIo, RandomGraphDeterministic) {
  const auto a = random_graph(8, 0.5, 3), b = random_graph(8, 0.5, 3);
  EXPECT_EQ(a.edges, b.edges);
  EXPECT_FALSE(a.edges.empty());
  EXPECT_NE(random_graph(8, 0.5, 4).edges, a.edges);
}

TEST(MaxCut, SingleEdge) {
  const auto h = maxcut_hamiltonian(Graph::make(2, {{0, 1}}));
  ASSERT_EQ(h.terms().size(), 2u);
  EXPECT_EQ(h.terms()[0].label(), "II");
  EXPECT_EQ(h.terms()[0].coefficient, -0.5);
  EXPECT_EQ(h.terms()[1].coefficient, 0.5);
  EXPECT_EQ(exact_bounds(h).e_min, -1.0);
  EXPECT_EQ(expectation(Statevector::from_bitstring("01"), h), -1.0);
  EXPECT_EQ(expectation(Statevector::from_bitstring("10"), h), -1.0);
}

TEST(MaxCut, TriangleAndEmpty) {
  EXPECT_EQ(exact_bounds(maxcut_hamiltonian(Graph::make(3, {{0, 1}, {1, 2}, {0, 2}}))).e_min, -2.0);
  EXPECT_THROW(maxcut_hamiltonian(Graph::make(3, {})), DimensionError);
}

TEST(MaxCut, GroundEnergyIsMinusMaxCut) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const std::size_t n = 3 + seed % 10;
    const auto g = random_graph(n, 0.3 + 0.02 * static_cast<double>(seed), seed);
    EXPECT_EQ(exact_bounds(maxcut_hamiltonian(g)).e_min, -static_cast<double>(brute_max_cut(g))) << seed;
  }
}

TEST(BarrenPlateau, Shape) {
  const auto a = build_barren_plateau(9, 4, 11);
  EXPECT_EQ(a.circuit.n_params(), 36u);
  EXPECT_EQ(a.circuit.n_layers(), 4u);
  EXPECT_EQ(a.hamiltonian.terms()[0].label(), "ZZIIIIIII");
  EXPECT_EQ(a.bounds->e_min, -1.0);
  EXPECT_EQ(a.bounds->e_max, 1.0);

  const auto small = build_barren_plateau(2, 1, 0);
  EXPECT_EQ(small.circuit.n_params(), 2u);
  EXPECT_EQ(small.hamiltonian.terms()[0].label(), "ZZ");
  EXPECT_THROW(build_barren_plateau(1, 1, 0), DimensionError);
}

TEST(BarrenPlateau, AxesDeterministicInSeed) {
  auto kinds = [](const ProblemInstance& p) {
    std::vector<GateKind> out;
    for (const auto& g : p.circuit.gates()) out.push_back(g.kind);
    return out;
  };
  EXPECT_EQ(kinds(build_barren_plateau(6, 3, 5)), kinds(build_barren_plateau(6, 3, 5)));
  EXPECT_NE(kinds(build_barren_plateau(6, 3, 5)), kinds(build_barren_plateau(6, 3, 6)));
}

TEST(BarrenPlateau, LayoutMatchesDenseOracle) {
  const auto p = build_barren_plateau(3, 2, 2);
  const auto& gates = p.circuit.gates();
  std::size_t fixed = 0, cz = 0;
  for (const auto& g : gates) {
    fixed += g.kind == GateKind::FIXED_RY;
    cz += g.kind == GateKind::CZ;
    if (g.kind == GateKind::FIXED_RY) EXPECT_DOUBLE_EQ(g.fixed_angle, pi / 4);
  }
  EXPECT_EQ(fixed, 3u);
  EXPECT_EQ(cz, 4u);
  Rng rng(3, Stream::Test);
  const auto theta = oracle::random_angles(rng, 6);
  EXPECT_NEAR(run_circuit(p.circuit, as_span(theta)).norm_squared(), 1.0, 1e-12);
  EXPECT_LT((run_circuit(p.circuit, as_span(theta)).amplitudes() - oracle::run(p.circuit, theta)).norm(), 1e-12);
}

TEST(Qaoa, ParamsAndZeroAngleEnergy) {
  const auto g = random_graph(6, 0.5, 1);
  for (std::size_t l : {1u, 3u}) {
    const auto q = build_qaoa(g, l);
    EXPECT_EQ(q.circuit.n_params(), 2 * l);
    EXPECT_EQ(q.circuit.n_qubits(), 6u);
    EXPECT_NEAR(energy(q, RealVector::Zero(static_cast<Eigen::Index>(2 * l)), q.hamiltonian),
                -0.5 * static_cast<double>(g.edges.size()), 1e-10);
  }
  EXPECT_THROW(build_qaoa(Graph::make(15, {{0, 1}}), 1), DimensionError);
}

TEST(Qaoa, MatchesExponentialOracle) {
  // exp(-i gamma Z_i Z_j) per edge and exp(-i beta X) per qubit, built densely.
  const auto g = Graph::make(3, {{0, 1}, {1, 2}});
  const auto q = build_qaoa(g, 2);
  RealVector theta(4);
  theta << 0.3, 0.7, -0.4, 1.1;
  oracle::Vec psi = oracle::Vec::Constant(8, 1.0 / std::sqrt(8.0));
  for (int l = 0; l < 2; ++l) {
    const double gamma = theta[2 * l], beta = theta[2 * l + 1];
    for (const auto& [a, b] : g.edges) {
      std::string s = "III";
      s[a] = s[b] = 'Z';
      const oracle::Mat zz = oracle::pauli_string(s);
      psi = (std::cos(gamma) * oracle::Mat::Identity(8, 8) - Complex(0, std::sin(gamma)) * zz) * psi;
    }
    for (std::size_t k = 0; k < 3; ++k) psi = oracle::embed(oracle::rotation('X', 2 * beta), k, 3) * psi;
  }
  const auto got = run_circuit(q.circuit, as_span(theta)).amplitudes();
  // CNOT-RZ-CNOT equals exp(-i gamma ZZ) exactly, so the overlap is 1 up to phase.
  EXPECT_NEAR(std::abs(got.dot(psi)), 1.0, 1e-12);
}

TEST(Qaoa, SharedSlotGradientMatchesFiniteDifferences) {
  const auto q = build_qaoa(random_graph(5, 0.6, 2), 2);
  Rng rng(4, Stream::Test);
  const auto theta = oracle::random_angles(rng, 4);
  EvalCounter counter;
  const auto grad = gradient(q.circuit, q.hamiltonian, theta, counter);
  const auto fd = oracle::fd_gradient(q.circuit, oracle::dense(q.hamiltonian), theta);
  EXPECT_LT((grad - fd).norm(), 1e-7);
}

TEST(HardwareEfficient, Shape) {
  EXPECT_EQ(build_hardware_efficient(8, 2).n_params(), 16u);
  EXPECT_EQ(build_hardware_efficient(12, 4).n_params(), 48u);
  const auto c = build_hardware_efficient(2, 1);
  EXPECT_NEAR(std::norm(run_circuit(c, as_span(RealVector::Zero(2)))[0]), 1.0, 1e-15);
  EXPECT_EQ(c.layer_of(1), 0u);
  EXPECT_EQ(build_hardware_efficient(3, 2).layer_of(4), 1u);
  std::size_t cnots = 0;
  for (const auto& g : build_hardware_efficient(4, 1).gates()) cnots += g.kind == GateKind::CNOT;
  EXPECT_EQ(cnots, 4u);
}

TEST(Observables, NumberAndSpin) {
  const auto n4 = number_operator(4);
  EXPECT_DOUBLE_EQ(expectation(Statevector::from_bitstring("1100"), n4), 2.0);
  EXPECT_DOUBLE_EQ(expectation(Statevector::from_bitstring("0000"), n4), 0.0);
  EXPECT_DOUBLE_EQ(expectation(Statevector::from_bitstring("10"), sz_operator(2)), 0.5);
  EXPECT_DOUBLE_EQ(expectation(Statevector::from_bitstring("01"), sz_operator(2)), -0.5);
  EXPECT_THROW(sz_operator(3), DimensionError);
  // Every basis state: N counts ones, Sz is (even ones - odd ones) / 2.
  const auto n6 = number_operator(6);
  const auto sz6 = sz_operator(6);
  for (std::uint64_t b = 0; b < 64; ++b) {
    std::string bits;
    int alpha = 0, beta = 0;
    for (int q = 0; q < 6; ++q) {
      const bool one = (b >> (5 - q)) & 1;
      bits += one ? '1' : '0';
      if (one) (q % 2 == 0 ? alpha : beta)++;
    }
    const auto s = Statevector::from_bitstring(bits);
    EXPECT_DOUBLE_EQ(expectation(s, n6), std::popcount(b));
    EXPECT_DOUBLE_EQ(expectation(s, sz6), 0.5 * (alpha - beta));
  }
}

TEST(Observables, FixtureFilesAgreeWithConstructors) {
  for (const char* mol : {"h4", "lih"}) {
    const auto n = read_pauli_file(kFixtures / mol / "number.txt").sum;
    const auto sz = read_pauli_file(kFixtures / mol / "sz.txt").sum;
    const auto built_n = number_operator(n.n_qubits());
    const auto built_sz = sz_operator(n.n_qubits());
    ASSERT_EQ(n.terms().size(), built_n.terms().size()) << mol;
    for (std::size_t i = 0; i < n.terms().size(); ++i) {
      EXPECT_EQ(n.terms()[i].label(), built_n.terms()[i].label());
      EXPECT_NEAR(n.terms()[i].coefficient, built_n.terms()[i].coefficient, 1e-12);
    }
    ASSERT_EQ(sz.terms().size(), built_sz.terms().size()) << mol;
    for (std::size_t i = 0; i < sz.terms().size(); ++i) {
      EXPECT_EQ(sz.terms()[i].label(), built_sz.terms()[i].label());
      EXPECT_NEAR(sz.terms()[i].coefficient, built_sz.terms()[i].coefficient, 1e-12);
    }
  }
}

TEST(LoadProblem, LiHFixture) {
  const auto p = load_problem(kFixtures / "lih" / "hamiltonian.txt",
                              {{"N", kFixtures / "lih" / "number.txt"}, {"S2", kFixtures / "lih" / "s2.txt"}}, 1);
  EXPECT_EQ(p.circuit.n_qubits(), 10u);
  EXPECT_EQ(*p.n_electrons, 2u);
  EXPECT_EQ(*p.occupation, "1100000000");
  ASSERT_TRUE(p.bounds);
  EXPECT_NEAR(p.bounds->e_min, -7.972, 5e-3);
  EXPECT_EQ(p.observables.size(), 2u);
}

TEST(LoadProblem, HartreeFockStateIsAnEigenstate) {
  const auto dir = kFixtures / "h4";
  const auto p = load_problem(dir / "hamiltonian.txt", {{"N", dir / "number.txt"}, {"Sz", dir / "sz.txt"}}, 2);
  const auto hf = Statevector::from_bitstring(*p.occupation);
  EXPECT_NEAR(expectation(hf, p.observables.at("N")), 4.0, 1e-10);
  EXPECT_NEAR(expectation(hf, p.observables.at("Sz")), 0.0, 1e-10);
}

TEST(LoadProblem, Errors) {
  const auto tmp = std::filesystem::temp_directory_path() / "vqopt_load_problem";
  std::filesystem::create_directories(tmp);
  {
    std::ofstream(tmp / "h.txt") << "1.0 ZZ\n0.5 XX\n";
    std::ofstream(tmp / "o.txt") << "1.0 ZZZ\n";
    std::ofstream(tmp / "bad.txt") << "1.0 ZZ\nq XX\n";
  }
  EXPECT_THROW(load_problem(tmp / "h.txt", {{"O", tmp / "o.txt"}}, 1), DimensionError);
  EXPECT_THROW(load_problem(tmp / "missing.txt", {}, 1), Error);
  try {
    load_problem(tmp / "bad.txt", {}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("bad.txt"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  const auto ok = load_problem(tmp / "h.txt", {}, 1);
  EXPECT_EQ(ok.init_mode, InitMode::RandomUniform);
  EXPECT_FALSE(ok.occupation);
  std::filesystem::remove_all(tmp);
}

TEST(InitialParams, RandomUniform) {
  const auto p = build_barren_plateau(4, 3, 0);
  const auto a = initial_params(p, InitMode::RandomUniform, 7);
  EXPECT_EQ(a, initial_params(p, InitMode::RandomUniform, 7));
  EXPECT_NE(a, initial_params(p, InitMode::RandomUniform, 8));
  EXPECT_GE(a.minCoeff(), 0.0);
  EXPECT_LT(a.maxCoeff(), 2 * pi);
}

TEST(InitialParams, HartreeFockUnperturbed) {
  const auto dir = kFixtures / "h4";
  const auto p = load_problem(dir / "hamiltonian.txt", {{"N", dir / "number.txt"}}, 2);
  const auto theta = initial_params(p, InitMode::HartreeFockPerturbed, 0, std::nullopt, 0.0);
  RealVector want = RealVector::Zero(16);
  want.head(4).setConstant(pi);
  EXPECT_EQ(theta, want);

  // The RY wall alone prepares the HF determinant.
  CircuitBuilder wall(8);
  for (std::size_t q = 0; q < 8; ++q) wall.rotation(GateKind::RY, q, wall.new_param(0));
  const auto s = run_circuit(wall.build(), as_span(RealVector(theta.head(8))));
  EXPECT_NEAR(expectation(s, p.observables.at("N")), 4.0, 1e-10);
}

TEST(InitialParams, HartreeFockNoiseAndErrors) {
  const auto dir = kFixtures / "h4";
  const auto p = load_problem(dir / "hamiltonian.txt", {}, 2);
  const auto theta = initial_params(p, InitMode::HartreeFockPerturbed, 3);
  const auto clean = initial_params(p, InitMode::HartreeFockPerturbed, 3, std::nullopt, 0.0);
  const RealVector noise = theta - clean;
  EXPECT_GT(noise.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LT(noise.cwiseAbs().maxCoeff(), 0.06);
  EXPECT_THROW(initial_params(build_barren_plateau(2, 1, 0), InitMode::HartreeFockPerturbed, 0), ConfigError);
}

TEST(InitialParams, Fixed) {
  const auto p = build_barren_plateau(2, 1, 0);
  RealVector v(2);
  v << 0.1, 0.2;
  EXPECT_EQ(initial_params(p, InitMode::Fixed, 0, v), v);
  EXPECT_THROW(initial_params(p, InitMode::Fixed, 0, RealVector::Zero(3)), DimensionError);
  EXPECT_THROW(initial_params(p, InitMode::Fixed, 0), ConfigError);
}
