#pragma once

// Cost-function families over discrete assignments: QUBO (chain or arbitrary
// graph), weighted Max-Cut, k-coloring and subset sum. A Problem is an
// immutable value; generators take explicit seeds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vaa/error.hpp"
#include "vaa/rng.hpp"

namespace vaa {

enum class ProblemKind { LinearQubo, GraphQubo, MaxCut, Coloring, SubsetSum };

constexpr std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::LinearQubo: return "linear_qubo";
    case ProblemKind::GraphQubo: return "graph_qubo";
    case ProblemKind::MaxCut: return "maxcut";
    case ProblemKind::Coloring: return "coloring";
    case ProblemKind::SubsetSum: return "subset_sum";
  }
  return "unknown";
}

inline ProblemKind parse_problem_kind(std::string_view text) {
  for (auto kind : {ProblemKind::LinearQubo, ProblemKind::GraphQubo, ProblemKind::MaxCut,
                    ProblemKind::Coloring, ProblemKind::SubsetSum}) {
    if (to_string(kind) == text) return kind;
  }
  throw Error(ErrorCode::Parse, "unknown problem kind '" + std::string(text) + "'");
}

constexpr bool is_qubo(ProblemKind kind) {
  return kind == ProblemKind::LinearQubo || kind == ProblemKind::GraphQubo;
}

struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;
  double w = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Digit string of a candidate solution. Digit 0 is the leftmost character of
/// the printed form and the most significant digit of the flat index, so the
/// binary string "1101" is flat index 13.
struct Assignment {
  std::vector<int> digits;

  std::size_t size() const { return digits.size(); }
  int operator[](std::size_t i) const { return digits[i]; }

  friend bool operator==(const Assignment&, const Assignment&) = default;

  static Assignment from_index(std::uint64_t index, std::size_t n, int radix = 2) {
    Assignment a;
    a.digits.assign(n, 0);
    for (std::size_t pos = n; pos-- > 0;) {
      a.digits[pos] = static_cast<int>(index % static_cast<std::uint64_t>(radix));
      index /= static_cast<std::uint64_t>(radix);
    }
    return a;
  }

  static Assignment from_string(std::string_view text) {
    Assignment a;
    a.digits.reserve(text.size());
    for (char c : text) {
      if (c < '0' || c > '9') {
        throw Error(ErrorCode::InvalidAssignment, "assignment digits must be 0-9, got '" + std::string(text) + "'");
      }
      a.digits.push_back(c - '0');
    }
    return a;
  }

  std::uint64_t to_index(int radix = 2) const {
    std::uint64_t index = 0;
    for (int d : digits) index = index * static_cast<std::uint64_t>(radix) + static_cast<std::uint64_t>(d);
    return index;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(digits.size());
    for (int d : digits) s.push_back(static_cast<char>('0' + d));
    return s;
  }
};

class Problem {
 public:
  Problem() = default;

  static Problem linear_qubo(std::vector<double> node_weights, const std::vector<double>& chain_weights) {
    const std::size_t n = node_weights.size();
    if (n < 2) throw Error(ErrorCode::InvalidSize, "linear QUBO needs at least 2 nodes");
    if (chain_weights.size() != n - 1) {
      throw Error(ErrorCode::InvalidSize, "linear QUBO with " + std::to_string(n) + " nodes needs " +
                                              std::to_string(n - 1) + " chain weights");
    }
    std::vector<Edge> edges;
    edges.reserve(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, chain_weights[i]});
    return Problem(ProblemKind::LinearQubo, n, std::move(node_weights), std::move(edges), 2);
  }

  static Problem graph_qubo(std::size_t n, std::vector<double> node_weights, std::vector<Edge> edges) {
    if (node_weights.size() != n) throw Error(ErrorCode::InvalidSize, "node weight count must equal n");
    return Problem(ProblemKind::GraphQubo, n, std::move(node_weights), std::move(edges), 2);
  }

  static Problem maxcut(std::size_t n, std::vector<Edge> edges) {
    return Problem(ProblemKind::MaxCut, n, {}, std::move(edges), 2);
  }

  static Problem coloring(std::size_t n, int k_colors, std::vector<Edge> edges) {
    if (k_colors < 2) throw Error(ErrorCode::InvalidArgument, "coloring needs k_colors >= 2");
    return Problem(ProblemKind::Coloring, n, {}, std::move(edges), k_colors);
  }

  static Problem subset_sum(std::vector<double> weights) {
    const std::size_t n = weights.size();
    return Problem(ProblemKind::SubsetSum, n, std::move(weights), {}, 2);
  }

  /// General constructor used by deserialization; validates every family invariant.
  static Problem make(ProblemKind kind, std::size_t n, std::vector<double> node_weights, std::vector<Edge> edges,
                      int k_colors = 2) {
    return Problem(kind, n, std::move(node_weights), std::move(edges), kind == ProblemKind::Coloring ? k_colors : 2);
  }

  ProblemKind kind() const { return kind_; }
  std::size_t size() const { return n_; }
  int radix() const { return radix_; }
  int k_colors() const { return radix_; }
  const std::vector<double>& node_weights() const { return node_weights_; }
  const std::vector<Edge>& edges() const { return edges_; }

  double node_weight(std::size_t i) const { return node_weights_.empty() ? 0.0 : node_weights_[i]; }

  /// Number of assignments, radix^n; saturates at UINT64_MAX.
  std::uint64_t state_count() const {
    std::uint64_t d = 1;
    for (std::size_t i = 0; i < n_; ++i) {
      if (d > UINT64_MAX / static_cast<std::uint64_t>(radix_)) return UINT64_MAX;
      d *= static_cast<std::uint64_t>(radix_);
    }
    return d;
  }

  Assignment assignment(std::uint64_t index) const { return Assignment::from_index(index, n_, radix_); }

  friend bool operator==(const Problem&, const Problem&) = default;

 private:
  Problem(ProblemKind kind, std::size_t n, std::vector<double> node_weights, std::vector<Edge> edges, int radix)
      : kind_(kind), n_(n), radix_(radix), node_weights_(std::move(node_weights)), edges_(std::move(edges)) {
    validate();
  }

  void validate() const {
    if (n_ == 0) throw Error(ErrorCode::InvalidSize, "problem needs at least one variable");
    if (!node_weights_.empty() && node_weights_.size() != n_) {
      throw Error(ErrorCode::InvalidSize, "node weight count must equal n");
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& e : edges_) {
      if (e.i == e.j) throw Error(ErrorCode::InvalidArgument, "self-loop on node " + std::to_string(e.i));
      if (e.i >= n_ || e.j >= n_) throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
      auto key = std::minmax(e.i, e.j);
      if (!seen.insert({key.first, key.second}).second) {
        throw Error(ErrorCode::InvalidArgument,
                    "duplicate edge {" + std::to_string(key.first) + "," + std::to_string(key.second) + "}");
      }
    }
    switch (kind_) {
      case ProblemKind::LinearQubo:
        if (edges_.size() != n_ - 1) throw Error(ErrorCode::InvalidArgument, "linear QUBO must be a chain");
        for (std::size_t k = 0; k < edges_.size(); ++k) {
          const auto& e = edges_[k];
          const bool chained = (e.i == k && e.j == k + 1) || (e.j == k && e.i == k + 1);
          if (!chained) {
            throw Error(ErrorCode::InvalidArgument, "linear QUBO edge " + std::to_string(k) + " must join nodes " +
                                                        std::to_string(k) + " and " + std::to_string(k + 1));
          }
        }
        [[fallthrough]];
      case ProblemKind::GraphQubo:
        if (node_weights_.size() != n_) throw Error(ErrorCode::InvalidSize, "QUBO needs one weight per node");
        break;
      case ProblemKind::MaxCut:
      case ProblemKind::Coloring:
        for (double w : node_weights_) {
          if (w != 0.0) throw Error(ErrorCode::InvalidArgument, "graph partition problems carry no node weights");
        }
        break;
      case ProblemKind::SubsetSum:
        if (!edges_.empty()) throw Error(ErrorCode::InvalidArgument, "subset sum has no edges");
        if (node_weights_.size() != n_) throw Error(ErrorCode::InvalidSize, "subset sum needs one weight per item");
        break;
    }
  }

  ProblemKind kind_ = ProblemKind::SubsetSum;
  std::size_t n_ = 0;
  int radix_ = 2;
  std::vector<double> node_weights_;
  std::vector<Edge> edges_;
};

inline void check_assignment(const Problem& problem, const Assignment& x) {
  if (x.size() != problem.size()) {
    throw Error(ErrorCode::InvalidAssignment, "assignment length " + std::to_string(x.size()) +
                                                  " does not match problem size " + std::to_string(problem.size()));
  }
  for (int d : x.digits) {
    if (d < 0 || d >= problem.radix()) {
      throw Error(ErrorCode::InvalidAssignment,
                  "digit " + std::to_string(d) + " outside radix " + std::to_string(problem.radix()));
    }
  }
}

namespace detail {

// Digit accessor shared by the vector and flat-index evaluation paths.
template <class DigitFn>
double evaluate_digits(const Problem& p, DigitFn digit) {
  double cost = 0.0;
  switch (p.kind()) {
    case ProblemKind::LinearQubo:
    case ProblemKind::GraphQubo:
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (digit(i)) cost += p.node_weights()[i];
      }
      for (const auto& e : p.edges()) {
        if (digit(e.i) && digit(e.j)) cost += e.w;
      }
      break;
    case ProblemKind::MaxCut:
      for (const auto& e : p.edges()) {
        if (digit(e.i) != digit(e.j)) cost += e.w;
      }
      break;
    case ProblemKind::Coloring:
      for (const auto& e : p.edges()) {
        if (digit(e.i) == digit(e.j)) cost += e.w;
      }
      break;
    case ProblemKind::SubsetSum:
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (digit(i)) cost += p.node_weights()[i];
      }
      break;
  }
  return cost;
}

}  // namespace detail

/// C(X) for the problem's family.
inline double evaluate_cost(const Problem& problem, const Assignment& x) {
  check_assignment(problem, x);
  return detail::evaluate_digits(problem, [&](std::size_t i) { return x.digits[i]; });
}

/// C(X) for the assignment at a flat index; no validation beyond the index range.
inline double evaluate_index(const Problem& problem, std::uint64_t index) {
  const std::size_t n = problem.size();
  if (problem.radix() == 2) {
    return detail::evaluate_digits(problem, [&](std::size_t i) { return static_cast<int>((index >> (n - 1 - i)) & 1U); });
  }
  return evaluate_cost(problem, problem.assignment(index));
}

// ---------------------------------------------------------------------------
// Generators

inline Problem generate_linear_qubo(std::size_t n, int weight_lo = -100, int weight_hi = 100,
                                    std::uint64_t seed = 0) {
  if (n < 2) throw Error(ErrorCode::InvalidSize, "linear QUBO needs n >= 2, got " + std::to_string(n));
  if (weight_lo >= weight_hi) throw Error(ErrorCode::InvalidArgument, "weight_lo must be below weight_hi");
  Rng rng = make_stream(seed, "problem");
  std::uniform_int_distribution<int> dist(weight_lo, weight_hi);
  std::vector<double> nodes(n);
  std::vector<double> chain(n - 1);
  for (auto& w : nodes) w = dist(rng);
  for (auto& w : chain) w = dist(rng);
  return Problem::linear_qubo(std::move(nodes), chain);
}

struct GraphOptions {
  ProblemKind kind = ProblemKind::MaxCut;
  bool weighted = false;
  int weight_lo = 1;
  int weight_hi = 10;
  int k_colors = 3;
};

/// Simple random graph with m distinct edges drawn uniformly without replacement.
inline Problem generate_random_graph(std::size_t n, std::size_t m_edges, const GraphOptions& options = {},
                                     std::uint64_t seed = 0) {
  if (n < 2) throw Error(ErrorCode::InvalidSize, "graph needs n >= 2");
  const std::size_t max_edges = n * (n - 1) / 2;
  if (m_edges > max_edges) {
    throw Error(ErrorCode::InvalidSize, "requested " + std::to_string(m_edges) + " edges but a simple graph on " +
                                            std::to_string(n) + " nodes has at most " + std::to_string(max_edges));
  }
  if (options.weighted && options.weight_lo > options.weight_hi) {
    throw Error(ErrorCode::InvalidArgument, "weight_lo must not exceed weight_hi");
  }
  Rng rng = make_stream(seed, "problem");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(max_edges);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  for (std::size_t t = 0; t < m_edges; ++t) {
    std::uniform_int_distribution<std::size_t> pick(t, pairs.size() - 1);
    std::swap(pairs[t], pairs[pick(rng)]);
  }
  pairs.resize(m_edges);
  std::sort(pairs.begin(), pairs.end());

  std::uniform_int_distribution<int> wdist(options.weight_lo, options.weight_hi);
  std::vector<Edge> edges;
  edges.reserve(m_edges);
  for (auto [i, j] : pairs) edges.push_back({i, j, options.weighted ? static_cast<double>(wdist(rng)) : 1.0});

  switch (options.kind) {
    case ProblemKind::MaxCut: return Problem::maxcut(n, std::move(edges));
    case ProblemKind::Coloring: return Problem::coloring(n, options.k_colors, std::move(edges));
    case ProblemKind::GraphQubo: {
      std::vector<double> nodes(n);
      for (auto& w : nodes) w = options.weighted ? wdist(rng) : 1.0;
      return Problem::graph_qubo(n, std::move(nodes), std::move(edges));
    }
    default:
      throw Error(ErrorCode::UnsupportedKind,
                  "random graphs generate maxcut, coloring or graph_qubo, not " + std::string(to_string(options.kind)));
  }
}

inline Problem generate_subset_sum(std::size_t n, int weight_lo, int weight_hi, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidSize, "subset sum needs n >= 1");
  if (weight_lo > weight_hi) throw Error(ErrorCode::InvalidArgument, "weight_lo must not exceed weight_hi");
  Rng rng = make_stream(seed, "problem");
  std::uniform_int_distribution<int> dist(weight_lo, weight_hi);
  std::vector<double> w(n);
  for (auto& x : w) x = dist(rng);
  return Problem::subset_sum(std::move(w));
}

// ---------------------------------------------------------------------------
// JSON: { "kind", "n", "k_colors"?, "node_weights": [...], "edges": [[i, j, w], ...] }

inline nlohmann::json to_json(const Problem& p) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(p.kind()));
  j["n"] = p.size();
  if (p.kind() == ProblemKind::Coloring) j["k_colors"] = p.k_colors();
  j["node_weights"] = p.node_weights();
  auto edges = nlohmann::json::array();
  for (const auto& e : p.edges()) edges.push_back({e.i, e.j, e.w});
  j["edges"] = std::move(edges);
  return j;
}

inline Problem problem_from_json(const nlohmann::json& j) {
  try {
    const auto kind = parse_problem_kind(j.at("kind").get<std::string>());
    const auto n = j.at("n").get<std::size_t>();
    std::vector<double> nodes = j.value("node_weights", std::vector<double>{});
    std::vector<Edge> edges;
    if (j.contains("edges")) {
      for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 3) throw Error(ErrorCode::Parse, "edges must be [i, j, w] triples");
        edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<double>()});
      }
    }
    const int k = j.value("k_colors", 2);
    return Problem::make(kind, n, std::move(nodes), std::move(edges), k);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::Parse, std::string("malformed problem JSON: ") + ex.what());
  }
}

}  // namespace vaa
