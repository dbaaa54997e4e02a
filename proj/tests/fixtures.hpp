#pragma once

#include "oracles.hpp"
#include "vaa/problems.hpp"

namespace fixture {

/// Four-node chain whose active terms at 1101 are W0 = -8, W1 = 18, W3 = -22
/// and w01 = -12 (cost -24). W2, w12 and w23 are inactive there.
inline vaa::Problem four_node_chain() { return vaa::Problem::linear_qubo({-8, 18, 5, -22}, {-12, 7, -3}); }

inline oracle::RawQubo raw(const vaa::Problem& p) {
  oracle::RawQubo q;
  q.n = p.size();
  q.w_node = p.node_weights();
  if (q.w_node.empty()) q.w_node.assign(q.n, 0.0);
  for (const auto& e : p.edges()) q.w_edge.emplace_back(e.i, e.j, e.w);
  return q;
}

}  // namespace fixture
