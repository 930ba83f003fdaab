#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anchormatch/graph.hpp"

namespace anchormatch {

enum class CostKind : std::uint8_t { Degree, LabelFrequency };
enum class StartKind : std::uint8_t { MaxDeg, MinLF, Rand };

const char* to_string(CostKind kind);
const char* to_string(StartKind kind);

struct CostStrategy {
    CostKind kind = CostKind::Degree;
    /// Data-graph label counts; required for LabelFrequency.
    std::vector<std::size_t> data_label_counts;
};

struct StartStrategy {
    StartKind kind = StartKind::MaxDeg;
    std::optional<std::size_t> K;  // default min(3, |V(Q)|)
    std::uint64_t seed = 1;
};

struct QueryPlan {
    std::vector<OrientedEdge> dfs_edges;  // (parent, child) in traversal order
    std::vector<VertexId> pi;             // first-visit order
    /// non_dfs_checks[j]: earlier vertices of pi joined to pi[j] by a non-DFS edge.
    std::vector<std::vector<VertexId>> non_dfs_checks;
    double total_cost = 0.0;
    VertexId start = 0;
};

/// Degree: -(d_i + d_j). LabelFrequency: min over N(q_i) of the data count
/// of the neighbor's label, plus the same for q_j. Throws on a non-edge.
double edge_cost(const CostStrategy& cost, const Graph& q, VertexId qi, VertexId qj);

/// Throws Error(InvalidArgument) when K is outside [1, |V(Q)|].
std::vector<VertexId> select_start_vertices(const StartStrategy& strategy, const Graph& q,
                                            std::span<const std::size_t> data_label_counts);

/// Greedy DFS from `start`: expands the stack top's cheapest unvisited
/// neighbor (ties by smallest id), backtracking when none remain.
QueryPlan plan_from_start(const Graph& q, const CostStrategy& cost, VertexId start);

std::vector<QueryPlan> explore_plans(const Graph& q, const CostStrategy& cost, std::span<const VertexId> starts);

/// Cheapest explored plan, ties to the earliest start. Throws
/// Error(InvalidQuery) for queries without edges or not connected.
QueryPlan plan_query(const Graph& q, const CostStrategy& cost, const StartStrategy& start,
                     std::span<const std::size_t> data_label_counts);

std::string format_plan(const QueryPlan& plan);

}  // namespace anchormatch
