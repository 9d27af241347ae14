// tkws/matching.h
#pragma once

#include <cstdint>
#include <vector>

namespace tkws::ogbcsr {

struct WeightedEdge {
  int u = 0;
  int v = 0;
  std::int64_t w = 0;
};

// Exact maximum-weight matching on a general graph (Edmonds' blossom
// method, primal-dual formulation after Galil's survey; structured after
// van Rantwijk's reference implementation). Runs in O(V^3). Weights must be
// integers; self-loops are ignored and parallel edges keep the heaviest.
// Returns mate[v] = matched partner of v, or -1. Matching an edge with
// negative weight never helps, so such edges are never used.
std::vector<int> max_weight_matching(int n,
                                     const std::vector<WeightedEdge>& edges);

// Greedy fallback: repeatedly takes the heaviest positive-weight edge whose
// endpoints are both free (ties by lower (u, v)). Used as a comparison
// baseline; the exact solver is authoritative.
std::vector<int> greedy_matching(int n,
                                 const std::vector<WeightedEdge>& edges);

// Total weight of a matching under the given edge list (parallel edges
// keep the heaviest, matching the solvers' view).
std::int64_t matching_weight(const std::vector<int>& mate,
                             const std::vector<WeightedEdge>& edges);

// Exhaustive-search oracle, exponential time: only for small n.
std::vector<int> brute_force_matching(int n,
                                      const std::vector<WeightedEdge>& edges);

}  // namespace tkws::ogbcsr
