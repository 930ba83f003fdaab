#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace anchormatch {

using VertexId = std::uint32_t;
using Label = std::uint32_t;

/// An edge with a direction: `from` is the anchor center.
struct OrientedEdge {
    VertexId from = 0;
    VertexId to = 0;

    auto operator<=>(const OrientedEdge&) const = default;
};

enum class EdgeType : std::uint8_t { SparseSparse, SparseDense, DenseSparse, DenseDense };

const char* to_string(EdgeType type);

/// Immutable vertex-labeled simple undirected graph in CSR form.
///
/// Adjacency lists are strictly increasing. The label alphabet size is taken
/// as max label + 1 (0 for an empty graph).
class Graph {
public:
    Graph() = default;

    /// Throws Error(InvalidArgument) on self-loops, duplicate edges or
    /// out-of-range endpoints.
    Graph(std::vector<Label> labels, std::span<const std::pair<VertexId, VertexId>> edges);

    std::size_t vertex_count() const { return labels_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    std::size_t sigma_size() const { return sigma_; }

    Label label(VertexId v) const { return labels_[v]; }
    const std::vector<Label>& labels() const { return labels_; }

    std::span<const VertexId> neighbors(VertexId v) const {
        return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
    }

    std::size_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }

    /// O(log degree). Throws Error(InvalidArgument) for ids out of range.
    bool has_edge(VertexId u, VertexId v) const;

    /// Each undirected edge once, as (u, v) with u < v, in increasing order.
    std::vector<std::pair<VertexId, VertexId>> edges() const;

    /// Per-label occurrence counts, sized sigma_size().
    std::vector<std::size_t> label_counts() const;

    /// Content digest of labels and edge set.
    std::uint64_t digest() const { return digest_; }

    bool is_connected() const;

    bool operator==(const Graph& other) const {
        return labels_ == other.labels_ && offsets_ == other.offsets_ &&
               adjacency_ == other.adjacency_;
    }

private:
    std::vector<Label> labels_;
    std::vector<std::size_t> offsets_{0};
    std::vector<VertexId> adjacency_;
    std::size_t edge_count_ = 0;
    std::size_t sigma_ = 0;
    std::uint64_t digest_ = 0;
};

/// Parses one graph in the "t/v/e" text format:
///
///     t <|V|> <|E|>
///     v <id> <label> [<degree>]     (|V| lines, ids 0..|V|-1)
///     e <u> <v>                     (|E| lines)
///
/// Blank lines and lines starting with '#' are skipped. Throws ParseError.
Graph parse_graph(std::istream& in);

/// Parses a stream holding zero or more consecutive graphs.
std::vector<Graph> parse_graphs(std::istream& in);

void write_graph(std::ostream& out, const Graph& g);

Graph read_graph_file(const std::string& path);
std::vector<Graph> read_graphs_file(const std::string& path);
void write_graphs_file(const std::string& path, std::span<const Graph> graphs);

/// Label-normalized orientations of edge {u, v}: the lower-label endpoint
/// first, both orientations when labels tie.
std::vector<OrientedEdge> normalize_edge(const Graph& g, VertexId u, VertexId v);

/// Every normalized orientation of every edge, in edge order.
std::vector<OrientedEdge> normalized_edges(const Graph& g);

EdgeType classify_edge(const Graph& g, OrientedEdge e, std::size_t dstar);

/// Subgraph of g induced on `vertices`; vertex i of the result is vertices[i].
Graph induced_subgraph(const Graph& g, std::span<const VertexId> vertices);

}  // namespace anchormatch
