#pragma once

// Gate-level cost oracles built from P, CP and X gates, their diagonal
// action, and OpenQASM 2.0 text export / import.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vaa/error.hpp"
#include "vaa/problems.hpp"

namespace vaa {

enum class GateKind { H, X, P, CP, XXPhase };

constexpr std::string_view to_string(GateKind k) {
  switch (k) {
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::P: return "p";
    case GateKind::CP: return "cp";
    case GateKind::XXPhase: return "xxphase";
  }
  return "?";
}

struct Gate {
  GateKind kind = GateKind::P;
  std::array<std::size_t, 2> qubits{};
  double theta = 0.0;

  std::size_t arity() const { return kind == GateKind::CP || kind == GateKind::XXPhase ? 2 : 1; }

  static Gate h(std::size_t q) { return {GateKind::H, {q, q}, 0.0}; }
  static Gate x(std::size_t q) { return {GateKind::X, {q, q}, 0.0}; }
  static Gate p(std::size_t q, double theta) { return {GateKind::P, {q, q}, theta}; }
  static Gate cp(std::size_t a, std::size_t b, double theta) { return {GateKind::CP, {a, b}, theta}; }
  /// Phase e^{i theta} on |01> and |10> of (a, b); identity on |00> and |11>.
  static Gate xx_phase(std::size_t a, std::size_t b, double theta) { return {GateKind::XXPhase, {a, b}, theta}; }

  friend bool operator==(const Gate&, const Gate&) = default;
};

struct CircuitIR {
  std::size_t n_qubits = 0;
  std::vector<Gate> gates;
  std::uint64_t source_hash = 0;
  double p_s = 1.0;

  void add(const Gate& g) {
    for (std::size_t i = 0; i < g.arity(); ++i) {
      if (g.qubits[i] >= n_qubits) throw Error(ErrorCode::InvalidArgument, "gate operand outside register");
    }
    if (g.arity() == 2 && g.qubits[0] == g.qubits[1]) {
      throw Error(ErrorCode::InvalidArgument, "two-qubit gate needs distinct operands");
    }
    gates.push_back(g);
  }
};

inline std::uint64_t problem_hash(const Problem& p) { return detail::fnv1a(to_json(p).dump()); }

/// One P(W_i p_s) per variable, then one CP(w_ij p_s) per edge.
inline CircuitIR build_qubo_oracle(const Problem& problem, double p_s) {
  if (!is_qubo(problem.kind()) && problem.kind() != ProblemKind::SubsetSum) {
    throw Error(ErrorCode::UnsupportedKind, "QUBO oracle needs a QUBO or subset-sum problem, got " +
                                                std::string(to_string(problem.kind())));
  }
  CircuitIR c{problem.size(), {}, problem_hash(problem), p_s};
  for (std::size_t i = 0; i < problem.size(); ++i) c.add(Gate::p(i, problem.node_weight(i) * p_s));
  for (const auto& e : problem.edges()) c.add(Gate::cp(e.i, e.j, e.w * p_s));
  return c;
}

/// One XXPhase(w_ij p_s) gadget per edge.
inline CircuitIR build_maxcut_oracle(const Problem& problem, double p_s) {
  if (problem.kind() != ProblemKind::MaxCut) {
    throw Error(ErrorCode::UnsupportedKind, "Max-Cut oracle needs a maxcut problem, got " +
                                                std::string(to_string(problem.kind())));
  }
  CircuitIR c{problem.size(), {}, problem_hash(problem), p_s};
  for (const auto& e : problem.edges()) c.add(Gate::xx_phase(e.i, e.j, e.w * p_s));
  return c;
}

/// Builder for any family with a qubit oracle. Coloring needs qudits and is
/// simulated directly by the engine instead.
inline CircuitIR build_oracle(const Problem& problem, double p_s) {
  switch (problem.kind()) {
    case ProblemKind::LinearQubo:
    case ProblemKind::GraphQubo:
    case ProblemKind::SubsetSum: return build_qubo_oracle(problem, p_s);
    case ProblemKind::MaxCut: return build_maxcut_oracle(problem, p_s);
    case ProblemKind::Coloring: break;
  }
  throw Error(ErrorCode::UnsupportedKind,
              "coloring oracles need qudit gates; simulate them with enumerate() and the engine instead");
}

/// Replaces each XXPhase(a, b) by X(a) CP X(a) X(b) CP X(b).
inline CircuitIR expand_gadgets(const CircuitIR& in) {
  CircuitIR out{in.n_qubits, {}, in.source_hash, in.p_s};
  for (const auto& g : in.gates) {
    if (g.kind != GateKind::XXPhase) {
      out.gates.push_back(g);
      continue;
    }
    const auto [a, b] = g.qubits;
    out.gates.push_back(Gate::x(a));
    out.gates.push_back(Gate::cp(a, b, g.theta));
    out.gates.push_back(Gate::x(a));
    out.gates.push_back(Gate::x(b));
    out.gates.push_back(Gate::cp(a, b, g.theta));
    out.gates.push_back(Gate::x(b));
  }
  return out;
}

inline constexpr std::size_t kDiagonalQubitCap = 12;

/// Per-basis-state phase factors of a diagonal-action circuit, normalized so
/// that index 0 has phase 1. Each basis state is pushed through the gate list;
/// X gates permute it and must restore it by the end.
inline std::vector<std::complex<double>> extract_diagonal(const CircuitIR& circuit) {
  const std::size_t n = circuit.n_qubits;
  if (n > kDiagonalQubitCap) {
    throw Error(ErrorCode::Capacity, "diagonal extraction is capped at " + std::to_string(kDiagonalQubitCap) + " qubits");
  }
  for (const auto& g : circuit.gates) {
    if (g.kind == GateKind::H) throw Error(ErrorCode::NotDiagonal, "circuit contains a Hadamard gate");
  }
  const std::uint64_t d = std::uint64_t{1} << n;
  auto bit = [n](std::uint64_t state, std::size_t q) { return (state >> (n - 1 - q)) & 1U; };
  std::vector<double> phase(d, 0.0);
  for (std::uint64_t start = 0; start < d; ++start) {
    std::uint64_t s = start;
    double acc = 0.0;
    for (const auto& g : circuit.gates) {
      const auto a = g.qubits[0], b = g.qubits[1];
      switch (g.kind) {
        case GateKind::X: s ^= std::uint64_t{1} << (n - 1 - a); break;
        case GateKind::P:
          if (bit(s, a)) acc += g.theta;
          break;
        case GateKind::CP:
          if (bit(s, a) && bit(s, b)) acc += g.theta;
          break;
        case GateKind::XXPhase:
          if (bit(s, a) != bit(s, b)) acc += g.theta;
          break;
        case GateKind::H: break;
      }
    }
    if (s != start) throw Error(ErrorCode::NotDiagonal, "X gates do not cancel; circuit is not diagonal");
    phase[start] = acc;
  }
  std::vector<std::complex<double>> out(d);
  for (std::uint64_t i = 0; i < d; ++i) out[i] = std::polar(1.0, phase[i] - phase[0]);
  return out;
}

/// Gate layers when gates sharing no qubit run in parallel.
inline std::size_t circuit_depth(const CircuitIR& circuit) {
  std::vector<std::size_t> level(circuit.n_qubits, 0);
  std::size_t depth = 0;
  for (const auto& g : circuit.gates) {
    std::size_t l = level[g.qubits[0]];
    if (g.arity() == 2) l = std::max(l, level[g.qubits[1]]);
    ++l;
    level[g.qubits[0]] = l;
    if (g.arity() == 2) level[g.qubits[1]] = l;
    depth = std::max(depth, l);
  }
  return depth;
}

// ---------------------------------------------------------------------------
// OpenQASM 2.0

inline std::string export_qasm(const CircuitIR& circuit) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "OPENQASM 2.0;\n";
  out << "include \"qelib1.inc\";\n";
  out << "qreg q[" << circuit.n_qubits << "];\n";
  for (const auto& g : expand_gadgets(circuit).gates) {
    switch (g.kind) {
      case GateKind::H: out << "h q[" << g.qubits[0] << "];\n"; break;
      case GateKind::X: out << "x q[" << g.qubits[0] << "];\n"; break;
      case GateKind::P: out << "p(" << g.theta << ") q[" << g.qubits[0] << "];\n"; break;
      case GateKind::CP:
        out << "cp(" << g.theta << ") q[" << g.qubits[0] << "],q[" << g.qubits[1] << "];\n";
        break;
      case GateKind::XXPhase: break;  // expanded above
    }
  }
  return out.str();
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::size_t parse_qubit_ref(const std::string& tok) {
  const auto lb = tok.find('['), rb = tok.find(']');
  if (lb == std::string::npos || rb == std::string::npos || rb < lb) {
    throw Error(ErrorCode::Parse, "bad qubit reference '" + tok + "'");
  }
  return std::stoul(tok.substr(lb + 1, rb - lb - 1));
}

}  // namespace detail

/// Reads the subset of OpenQASM 2.0 that export_qasm writes (p/u1, cp/cu1, x, h).
inline CircuitIR parse_qasm(std::string_view text) {
  CircuitIR c;
  bool have_reg = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::string pending;
  while (std::getline(in, raw)) {
    if (auto pos = raw.find("//"); pos != std::string::npos) raw.resize(pos);
    pending += raw;
    std::size_t semi;
    while ((semi = pending.find(';')) != std::string::npos) {
      const std::string stmt = detail::trim(pending.substr(0, semi));
      pending.erase(0, semi + 1);
      if (stmt.empty() || stmt.rfind("OPENQASM", 0) == 0 || stmt.rfind("include", 0) == 0) continue;
      try {
        if (stmt.rfind("qreg", 0) == 0) {
          c.n_qubits = detail::parse_qubit_ref(stmt);
          have_reg = true;
          continue;
        }
        if (!have_reg) throw Error(ErrorCode::Parse, "gate before qreg declaration");
        std::string name = stmt.substr(0, stmt.find_first_of(" ("));
        double theta = 0.0;
        std::string args;
        if (auto lp = stmt.find('('); lp != std::string::npos && lp < stmt.find(' ')) {
          const auto rp = stmt.find(')', lp);
          if (rp == std::string::npos) throw Error(ErrorCode::Parse, "unterminated parameter in '" + stmt + "'");
          theta = std::stod(stmt.substr(lp + 1, rp - lp - 1));
          args = stmt.substr(rp + 1);
        } else {
          args = stmt.substr(name.size());
        }
        std::vector<std::size_t> qs;
        std::stringstream as(args);
        for (std::string tok; std::getline(as, tok, ',');) qs.push_back(detail::parse_qubit_ref(detail::trim(tok)));
        auto need = [&](std::size_t k) {
          if (qs.size() != k) throw Error(ErrorCode::Parse, "wrong operand count in '" + stmt + "'");
        };
        if (name == "p" || name == "u1") {
          need(1);
          c.add(Gate::p(qs[0], theta));
        } else if (name == "cp" || name == "cu1") {
          need(2);
          c.add(Gate::cp(qs[0], qs[1], theta));
        } else if (name == "x") {
          need(1);
          c.add(Gate::x(qs[0]));
        } else if (name == "h") {
          need(1);
          c.add(Gate::h(qs[0]));
        } else {
          throw Error(ErrorCode::Parse, "unsupported gate '" + name + "'");
        }
      } catch (const std::logic_error& ex) {
        throw Error(ErrorCode::Parse, "malformed statement '" + stmt + "': " + ex.what());
      }
    }
  }
  if (!have_reg) throw Error(ErrorCode::Parse, "no qreg declaration");
  return c;
}

inline nlohmann::json to_json(const CircuitIR& c) {
  nlohmann::json j;
  j["n_qubits"] = c.n_qubits;
  j["p_s"] = c.p_s;
  j["source_hash"] = c.source_hash;
  auto gates = nlohmann::json::array();
  for (const auto& g : c.gates) {
    nlohmann::json jg{{"kind", std::string(to_string(g.kind))}};
    jg["qubits"] = g.arity() == 2 ? std::vector<std::size_t>{g.qubits[0], g.qubits[1]}
                                  : std::vector<std::size_t>{g.qubits[0]};
    if (g.kind != GateKind::H && g.kind != GateKind::X) jg["theta"] = g.theta;
    gates.push_back(std::move(jg));
  }
  j["gates"] = std::move(gates);
  return j;
}

}  // namespace vaa
