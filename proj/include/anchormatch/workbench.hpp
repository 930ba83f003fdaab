#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "anchormatch/embedding.hpp"
#include "anchormatch/engine.hpp"
#include "anchormatch/graph.hpp"

namespace anchormatch {

enum class GenModel : std::uint8_t { RandomRegular, SmallWorld, ScaleFree };

const char* to_string(GenModel model);
GenModel parse_gen_model(const std::string& name);

struct GenSpec {
    GenModel model = GenModel::ScaleFree;
    std::size_t vertices = 100;
    /// RandomRegular: the degree r. SmallWorld: ring neighbors k (even).
    /// ScaleFree: edges per new vertex m'.
    std::size_t degree = 2;
    double shortcut_probability = 0.25;  // SmallWorld only
    std::size_t sigma = 10;
    std::uint64_t seed = 1;
};

/// randomRegular: stub pairing with restarts; every degree equals r.
/// smallWorld: ring lattice joined to k/2 neighbors per side, plus for every
/// ring edge (u, u+j) a shortcut from u to a uniform non-neighbor with
/// probability p. scaleFree: starts from a clique on m'+1 vertices, each
/// later vertex attaches to m' distinct targets chosen with probability
/// proportional to degree, so |E| = m'(m'+1)/2 + (n-m'-1)m'.
/// Labels are uniform over [0, sigma). Throws Error(Infeasible) or
/// Error(InvalidArgument) on bad parameters.
Graph generate_graph(const GenSpec& spec);

enum class QueryCategory : std::uint8_t { Any, Dense, Sparse };

const char* to_string(QueryCategory category);
QueryCategory parse_query_category(const std::string& name);

struct QueryGenSpec {
    std::size_t size = 4;
    std::size_t count = 10;
    std::uint64_t seed = 1;
    QueryCategory category = QueryCategory::Any;
};

struct GeneratedQuery {
    Graph graph;
    std::vector<VertexId> source;  // query vertex i came from data vertex source[i]
};

/// Dense means average degree > 3; the category filter only applies to
/// sizes above 4.
bool is_dense_query(const Graph& q);

/// Random-walk queries: the subgraph induced on the first `size` distinct
/// vertices of a seeded walk, numbered in visit order. Throws
/// Error(Infeasible) when the size or category cannot be reached.
std::vector<GeneratedQuery> generate_query_samples(const Graph& g, const QueryGenSpec& spec);
std::vector<Graph> generate_queries(const Graph& g, const QueryGenSpec& spec);

/// One generated data graph of a verification suite with its queries.
struct SuiteGraph {
    GenSpec spec;
    Graph graph;
    std::size_t dstar = 10;
    std::vector<Graph> queries;
};

/// `instances` (graph, query) pairs, `per_graph` queries per graph. Graphs
/// cycle through the three generators, |Sigma| in {3, 10, 50} and d* in
/// {2, 4, 10}; |V| is drawn from [20, 300] and queries have 3 to 8 vertices,
/// alternating dense and sparse where the graph allows it.
std::vector<SuiteGraph> generate_suite(std::size_t instances, std::uint64_t seed, std::size_t per_graph = 5);

/// Uniform pairs of non-isomorphic stars drawn from `stars`; the views point
/// into `stars`. Returns fewer pairs if the list holds a single shape.
std::vector<std::pair<StarView, StarView>> sample_star_pairs(const StarList& stars, std::size_t count,
                                                             std::uint64_t seed);

struct EdgeFiltering {
    OrientedEdge query_edge;
    std::size_t baseline = 0;  // data pairs with the right labels
    std::size_t kept = 0;      // candidate pairs
    std::size_t truth = 0;     // pairs used by some oracle match
    double power = 1.0;
};

struct FilteringReport {
    std::vector<EdgeFiltering> edges;
    std::size_t baseline = 0;
    std::size_t kept = 0;
    std::size_t truth = 0;

    /// Pooled over edges: 1 - sum(kept - truth) / sum(baseline - truth).
    double aggregate() const;
    void merge(const FilteringReport& other);
};

/// `truth` holds the oracle bindings (indexed by query vertex).
FilteringReport filtering_power(const Graph& q, const Graph& g, const QueryResult& result,
                                const std::vector<std::vector<VertexId>>& truth);

struct QueryRecord {
    std::size_t query_id = 0;
    std::size_t matches = 0;
    StageTimings timings;
    std::size_t candidates_s = 0;
    std::size_t candidates_s_prime = 0;
    std::size_t candidates_p = 0;
    std::optional<double> filtering;
};

QueryRecord make_query_record(std::size_t id, const QueryResult& result);

struct RunReport {
    std::vector<QueryRecord> queries;
    std::size_t total_matches = 0;
    StageTimings total_timings;
    std::size_t total_candidates = 0;
    std::optional<double> filtering;       // pooled, when measured
    std::optional<double> conflict_ratio;  // when measured

    void add(const QueryRecord& record);
    /// Tab-separated per-query rows, then a "total" row.
    void write(std::ostream& out) const;
};

}  // namespace anchormatch
