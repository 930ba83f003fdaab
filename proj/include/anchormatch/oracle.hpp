#pragma once

#include <cstddef>
#include <vector>

#include "anchormatch/features.hpp"
#include "anchormatch/graph.hpp"

namespace anchormatch {

inline constexpr std::size_t kOracleQueryBound = 10;

/// Every injective label- and edge-preserving map V(Q) -> V(G), indexed by
/// query vertex, sorted. Plain backtracking; shares nothing with the engine.
/// Throws Error(InvalidArgument) when |V(Q)| exceeds `bound`.
std::vector<std::vector<VertexId>> brute_force_matches(const Graph& q, const Graph& g,
                                                       std::size_t bound = kOracleQueryBound);

/// True iff the canonical triples agree.
bool star_isomorphic(const AnchoredStar& a, const AnchoredStar& b);

}  // namespace anchormatch
