#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "anchormatch/anchor_index.hpp"
#include "anchormatch/embedding.hpp"
#include "anchormatch/graph.hpp"
#include "anchormatch/planner.hpp"

namespace anchormatch {

struct CandidatePair {
    VertexId parent = 0;  // data vertex for the query edge's `from`
    VertexId child = 0;   // data vertex for the query edge's `to`
    IndexFamily family = IndexFamily::S;

    bool operator==(const CandidatePair&) const = default;
};

struct CandidateSet {
    OrientedEdge query_edge;
    std::vector<CandidatePair> pairs;  // sorted by (parent, child), distinct

    std::size_t count(IndexFamily family) const;
};

/// Query-side lookup material for one label-normalized orientation (u, v).
struct OrientationKeys {
    OrientedEdge edge;
    std::optional<EmbeddingKey> star_at_from;  // max star at u anchored at v
    std::optional<EmbeddingKey> star_at_to;    // max star at v anchored at u
    std::vector<PathCode> paths;               // max paths at u
    bool unknown_label = false;                // a label the model cannot key
};

/// One entry per normalized orientation of `query_edge`.
std::vector<OrientationKeys> query_edge_keys(const Graph& q, OrientedEdge query_edge, const StarKeyer& keyer,
                                             std::size_t dstar);

CandidateSet lookup_candidates(const Graph& q, OrientedEdge query_edge, const std::vector<OrientationKeys>& keys,
                               const AnchorIndexes& idx);

/// Candidates for `query_edge` in its given orientation. When both endpoints
/// share a label the two orientation lookups are intersected.
CandidateSet get_candidates(const Graph& q, OrientedEdge query_edge, const AnchorIndexes& idx,
                            const StarKeyer& keyer);

struct CandidateTable {
    std::vector<CandidateSet> sets;  // aligned with plan.dfs_edges
};

/// Indexed by query vertex.
using Binding = std::vector<VertexId>;
/// Sorted, duplicate-free.
using MatchSet = std::vector<Binding>;

/// Throws Error(InvalidArgument) when workers == 0 or the table is misaligned.
MatchSet match_growth(const QueryPlan& plan, const CandidateTable& table, const Graph& g, std::size_t workers);

struct PlanConfig {
    CostKind cost = CostKind::Degree;
    StartStrategy start;
};

struct StageTimings {
    std::int64_t plan_us = 0;
    std::int64_t embed_us = 0;
    std::int64_t candidates_us = 0;
    std::int64_t growth_us = 0;

    std::int64_t total_us() const { return plan_us + embed_us + candidates_us + growth_us; }
};

struct QueryResult {
    QueryPlan plan;
    CandidateTable table;
    MatchSet matches;
    StageTimings timings;

    std::size_t candidate_count(IndexFamily family) const;
    std::size_t candidate_count() const;
};

/// Plans, looks up candidates and grows matches. Throws
/// Error(DigestMismatch) if the index does not belong to (keyer, g) and
/// Error(InvalidQuery) for queries without edges or not connected.
QueryResult query(const Graph& q, const Graph& g, const AnchorIndexes& idx, const StarKeyer& keyer,
                  const PlanConfig& config = {}, std::size_t workers = 8);

/// "q0->u0 q1->u1 ..." in pi order.
std::string format_match(const Binding& binding, const QueryPlan& plan);

}  // namespace anchormatch
