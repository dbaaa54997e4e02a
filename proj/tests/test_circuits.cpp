#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "vaa/circuits.hpp"
#include "vaa/spectrum.hpp"

using namespace vaa;

namespace {

double max_phase_gap(const std::vector<std::complex<double>>& diag, const SolutionSpace& s, double ps) {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < diag.size(); ++i) {
    worst = std::max(worst, std::abs(diag[i] - std::polar(1.0, ps * (s[i] - s[0]))));
  }
  return worst;
}

std::size_t count_lines(const std::string& text, const std::string& prefix) {
  std::size_t n = 0;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) n += line.rfind(prefix, 0) == 0;
  return n;
}

}  // namespace

TEST(QuboOracle, ChainGateCounts) {
  const auto c = build_qubo_oracle(fixture::four_node_chain(), 0.1);
  std::size_t p = 0, cp = 0;
  for (const auto& g : c.gates) {
    p += g.kind == GateKind::P;
    cp += g.kind == GateKind::CP;
  }
  EXPECT_EQ(p, 4u);
  EXPECT_EQ(cp, 3u);
}

TEST(QuboOracle, ZeroWeightsGiveIdentity) {
  const auto c = build_qubo_oracle(Problem::linear_qubo({0, 0, 0}, {0, 0}), 3.0);
  for (const auto& g : c.gates) EXPECT_EQ(g.theta, 0.0);
  for (const auto& z : extract_diagonal(c)) EXPECT_EQ(z, std::complex<double>(1.0, 0.0));
}

TEST(QuboOracle, PhaseOfFourNodeChain) {
  const auto diag = extract_diagonal(build_qubo_oracle(fixture::four_node_chain(), 1.0));
  EXPECT_NEAR(std::abs(diag[13] - std::polar(1.0, -24.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::remainder(std::arg(diag[13]) + 24.0, 2 * std::numbers::pi), 0.0, 1e-12);
}

TEST(QuboOracle, MatchesEnginePhases) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = generate_random_graph(8, 12, {ProblemKind::GraphQubo, true, -40, 40}, seed);
    const double ps = 0.0137 * static_cast<double>(seed + 1);
    EXPECT_LT(max_phase_gap(extract_diagonal(build_qubo_oracle(p, ps)), enumerate(p), ps), 1e-12);
  }
}

TEST(MaxCutOracle, SingleEdgeAtPi) {
  const auto c = build_maxcut_oracle(Problem::maxcut(2, {{0, 1, 1.0}}), std::numbers::pi);
  const auto d = extract_diagonal(c);
  const std::complex<double> expect[] = {1.0, -1.0, -1.0, 1.0};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(d[i] - expect[i]), 0.0, 1e-15);
  // Same result through the primitive decomposition.
  const auto de = extract_diagonal(expand_gadgets(c));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(de[i] - expect[i]), 0.0, 1e-15);
}

TEST(MaxCutOracle, GadgetLeavesEqualBitsAlone) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> th(-7.0, 7.0);
  for (int t = 0; t < 20; ++t) {
    CircuitIR c{2, {}, 0, 1.0};
    const double theta = th(rng);
    c.add(Gate::xx_phase(0, 1, theta));
    const auto d = extract_diagonal(expand_gadgets(c));
    EXPECT_NEAR(std::abs(d[0] - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(d[3] - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(d[1] - std::polar(1.0, theta)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(d[2] - std::polar(1.0, theta)), 0.0, 1e-14);
  }
}

TEST(MaxCutOracle, TenNodeFifteenEdgeGraph) {
  const auto p = generate_random_graph(10, 15, {ProblemKind::MaxCut, true}, 4);
  const double ps = 0.41;
  const auto c = build_maxcut_oracle(p, ps);
  EXPECT_EQ(c.gates.size(), 15u);
  const auto s = enumerate(p);
  EXPECT_LT(max_phase_gap(extract_diagonal(c), s, ps), 1e-12);
  EXPECT_LT(max_phase_gap(extract_diagonal(expand_gadgets(c)), s, ps), 1e-12);
}

TEST(Oracles, UnsupportedKinds) {
  const auto col = Problem::coloring(3, 3, {{0, 1, 1}});
  try {
    build_oracle(col, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedKind);
  }
  EXPECT_THROW(build_maxcut_oracle(fixture::four_node_chain(), 1.0), Error);
  EXPECT_THROW(build_qubo_oracle(Problem::maxcut(2, {{0, 1, 1}}), 1.0), Error);
}

TEST(SubsetSumOracle, DepthOne) {
  const auto p = generate_subset_sum(9, 1, 50, 3);
  const auto c = build_oracle(p, 0.02);
  EXPECT_EQ(circuit_depth(c), 1u);
  EXPECT_LT(max_phase_gap(extract_diagonal(c), enumerate(p), 0.02), 1e-12);
}

TEST(ExtractDiagonal, BasicCases) {
  CircuitIR empty{3, {}, 0, 1.0};
  for (const auto& z : extract_diagonal(empty)) EXPECT_EQ(z, std::complex<double>(1.0, 0.0));
  CircuitIR one{2, {}, 0, 1.0};
  one.add(Gate::p(0, 0.7));
  const auto d = extract_diagonal(one);
  EXPECT_EQ(d[0], std::complex<double>(1.0, 0.0));
  EXPECT_EQ(d[1], std::complex<double>(1.0, 0.0));
  EXPECT_NEAR(std::abs(d[2] - std::polar(1.0, 0.7)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(d[3] - std::polar(1.0, 0.7)), 0.0, 1e-15);
}

TEST(ExtractDiagonal, Errors) {
  CircuitIR h{2, {}, 0, 1.0};
  h.add(Gate::h(0));
  try {
    extract_diagonal(h);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotDiagonal);
  }
  CircuitIR x{2, {}, 0, 1.0};
  x.add(Gate::x(1));
  EXPECT_THROW(extract_diagonal(x), Error);
  CircuitIR big{13, {}, 0, 1.0};
  EXPECT_THROW(extract_diagonal(big), Error);
  EXPECT_THROW(x.add(Gate::cp(0, 0, 1.0)), Error);
  EXPECT_THROW(x.add(Gate::p(2, 1.0)), Error);
}

TEST(Qasm, EmptyProgramIsHeaderOnly) {
  CircuitIR c{2, {}, 0, 1.0};
  const auto text = export_qasm(c);
  EXPECT_EQ(text, "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\n");
  const auto back = parse_qasm(text);
  EXPECT_EQ(back.n_qubits, 2u);
  EXPECT_TRUE(back.gates.empty());
}

TEST(Qasm, LineCountsForChain) {
  const auto text = export_qasm(build_qubo_oracle(fixture::four_node_chain(), 0.5));
  EXPECT_EQ(count_lines(text, "p("), 4u);
  EXPECT_EQ(count_lines(text, "cp("), 3u);
}

TEST(Qasm, RoundTripPreservesDiagonal) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto q = generate_random_graph(7, 9, {ProblemKind::GraphQubo, true, -30, 30}, seed);
    const auto m = generate_random_graph(7, 9, {ProblemKind::MaxCut, true}, seed);
    for (const auto& c : {build_oracle(q, 0.31), build_oracle(m, 0.77)}) {
      const auto a = extract_diagonal(c);
      const auto b = extract_diagonal(parse_qasm(export_qasm(c)));
      ASSERT_EQ(a.size(), b.size());
      for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(std::abs(a[i] - b[i]), 0.0, 1e-12);
    }
  }
}

TEST(Qasm, ParseErrors) {
  EXPECT_THROW(parse_qasm("OPENQASM 2.0;\np(1) q[0];\n"), Error);
  EXPECT_THROW(parse_qasm("qreg q[2];\nrz(1) q[0];\n"), Error);
  EXPECT_THROW(parse_qasm("qreg q[2];\ncp(1) q[0];\n"), Error);
  EXPECT_THROW(parse_qasm("qreg q[2];\np(abc) q[0];\n"), Error);
  EXPECT_NO_THROW(parse_qasm("qreg q[2];\nu1(0.5) q[0]; // note\ncu1(0.1) q[0],q[1];\n"));
}

TEST(Json, GateDump) {
  const auto j = to_json(build_maxcut_oracle(Problem::maxcut(3, {{0, 2, 2.0}}), 0.5));
  EXPECT_EQ(j["n_qubits"], 3);
  EXPECT_EQ(j["gates"][0]["kind"], "xxphase");
  EXPECT_EQ(j["gates"][0]["theta"], 1.0);
}
