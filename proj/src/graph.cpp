#include "anchormatch/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "anchormatch/binary_io.hpp"
#include "anchormatch/errors.hpp"

namespace anchormatch {

const char* to_string(EdgeType type) {
    switch (type) {
        case EdgeType::SparseSparse: return "sparse-sparse";
        case EdgeType::SparseDense: return "sparse-dense";
        case EdgeType::DenseSparse: return "dense-sparse";
        case EdgeType::DenseDense: return "dense-dense";
    }
    return "?";
}

Graph::Graph(std::vector<Label> labels, std::span<const std::pair<VertexId, VertexId>> edges)
    : labels_(std::move(labels)) {
    const std::size_t n = labels_.size();
    std::vector<std::size_t> degree(n, 0);
    for (auto [u, v] : edges) {
        if (u >= n || v >= n)
            throw Error(ErrorKind::InvalidArgument,
                        "edge (" + std::to_string(u) + "," + std::to_string(v) +
                            ") references an unknown vertex");
        if (u == v)
            throw Error(ErrorKind::InvalidArgument, "self-loop at vertex " + std::to_string(u));
        ++degree[u];
        ++degree[v];
    }
    offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
    adjacency_.resize(offsets_[n]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (auto [u, v] : edges) {
        adjacency_[fill[u]++] = v;
        adjacency_[fill[v]++] = u;
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto first = adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
        auto last = adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
        std::sort(first, last);
        if (std::adjacent_find(first, last) != last)
            throw Error(ErrorKind::InvalidArgument,
                        "duplicate edge at vertex " + std::to_string(i));
    }
    edge_count_ = edges.size();
    for (Label l : labels_) sigma_ = std::max<std::size_t>(sigma_, std::size_t{l} + 1);

    Fnv1a h;
    h.update_u64(n);
    for (Label l : labels_) h.update_u64(l);
    h.update_u64(edge_count_);
    for (std::size_t u = 0; u < n; ++u)
        for (VertexId v : neighbors(static_cast<VertexId>(u)))
            if (u < v) {
                h.update_u64(u);
                h.update_u64(v);
            }
    digest_ = h.value();
}

bool Graph::has_edge(VertexId u, VertexId v) const {
    if (u >= vertex_count() || v >= vertex_count())
        throw Error(ErrorKind::InvalidArgument, "has_edge: vertex id out of range");
    // Search the shorter list.
    if (degree(u) > degree(v)) std::swap(u, v);
    auto adj = neighbors(u);
    return std::binary_search(adj.begin(), adj.end(), v);
}

std::vector<std::pair<VertexId, VertexId>> Graph::edges() const {
    std::vector<std::pair<VertexId, VertexId>> out;
    out.reserve(edge_count_);
    for (VertexId u = 0; u < vertex_count(); ++u)
        for (VertexId v : neighbors(u))
            if (u < v) out.emplace_back(u, v);
    return out;
}

std::vector<std::size_t> Graph::label_counts() const {
    std::vector<std::size_t> counts(sigma_, 0);
    for (Label l : labels_) ++counts[l];
    return counts;
}

bool Graph::is_connected() const {
    if (vertex_count() == 0) return true;
    std::vector<char> seen(vertex_count(), 0);
    std::vector<VertexId> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        VertexId u = stack.back();
        stack.pop_back();
        for (VertexId w : neighbors(u))
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                stack.push_back(w);
            }
    }
    return reached == vertex_count();
}

namespace {

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    // Next non-blank, non-comment line split into tokens; false at EOF.
    bool next(std::vector<std::string_view>& tokens) {
        while (std::getline(in_, line_)) {
            ++number_;
            tokens.clear();
            std::string_view rest(line_);
            while (!rest.empty()) {
                auto start = rest.find_first_not_of(" \t\r");
                if (start == std::string_view::npos) break;
                rest.remove_prefix(start);
                auto end = rest.find_first_of(" \t\r");
                tokens.push_back(rest.substr(0, end));
                rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
            }
            if (tokens.empty() || tokens[0].starts_with('#')) continue;
            return true;
        }
        return false;
    }

    // Peeks whether the next meaningful line starts a new graph, without
    // consuming anything else.
    bool at_eof() {
        while (true) {
            int c = in_.peek();
            if (c == EOF) return true;
            if (c == '\n' || c == '\r' || c == ' ' || c == '\t') {
                in_.get();
                if (c == '\n') ++number_;
                continue;
            }
            if (c == '#') {
                std::string skip;
                std::getline(in_, skip);
                ++number_;
                continue;
            }
            return false;
        }
    }

    std::size_t number() const { return number_; }

private:
    std::istream& in_;
    std::string line_;
    std::size_t number_ = 0;
};

std::uint64_t parse_number(std::string_view token, std::size_t line) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw ParseError(ParseFailure::Malformed, line,
                         "expected a non-negative integer, got '" + std::string(token) + "'");
    return value;
}

Graph parse_one(LineReader& reader) {
    std::vector<std::string_view> tok;
    if (!reader.next(tok)) throw ParseError(ParseFailure::Malformed, reader.number(), "empty input");
    if (tok.size() != 3 || tok[0] != "t")
        throw ParseError(ParseFailure::Malformed, reader.number(), "expected header 't <|V|> <|E|>'");
    const std::uint64_t n = parse_number(tok[1], reader.number());
    const std::uint64_t m = parse_number(tok[2], reader.number());
    if (n > 0xffffffffULL)
        throw ParseError(ParseFailure::Malformed, reader.number(), "vertex count too large");

    std::vector<Label> labels(n, 0);
    std::vector<char> seen(n, 0);
    std::vector<std::pair<std::size_t, std::uint64_t>> declared;  // (line, degree) per vertex
    declared.assign(n, {0, ~std::uint64_t{0}});
    for (std::uint64_t i = 0; i < n; ++i) {
        if (!reader.next(tok))
            throw ParseError(ParseFailure::CountMismatch, reader.number(),
                             "expected " + std::to_string(n) + " vertex lines");
        const std::size_t line = reader.number();
        if ((tok.size() != 3 && tok.size() != 4) || tok[0] != "v")
            throw ParseError(ParseFailure::Malformed, line, "expected 'v <id> <label> [<degree>]'");
        const std::uint64_t id = parse_number(tok[1], line);
        if (id >= n)
            throw ParseError(ParseFailure::UnknownVertex, line, "vertex id " + std::to_string(id) + " out of range");
        if (seen[id])
            throw ParseError(ParseFailure::Malformed, line, "vertex " + std::to_string(id) + " declared twice");
        seen[id] = 1;
        const std::uint64_t label = parse_number(tok[2], line);
        if (label > 0xffffffffULL) throw ParseError(ParseFailure::Malformed, line, "label too large");
        labels[id] = static_cast<Label>(label);
        if (tok.size() == 4) declared[id] = {line, parse_number(tok[3], line)};
    }

    std::vector<std::pair<VertexId, VertexId>> edges;
    edges.reserve(m);
    std::vector<std::uint64_t> degree(n, 0);
    // Sorted (min, max) pairs for duplicate detection, checked after reading.
    std::vector<std::pair<std::pair<VertexId, VertexId>, std::size_t>> keyed;
    keyed.reserve(m);
    for (std::uint64_t i = 0; i < m; ++i) {
        if (!reader.next(tok))
            throw ParseError(ParseFailure::CountMismatch, reader.number(),
                             "expected " + std::to_string(m) + " edge lines");
        const std::size_t line = reader.number();
        if (tok.size() != 3 || tok[0] != "e")
            throw ParseError(ParseFailure::Malformed, line, "expected 'e <u> <v>'");
        const std::uint64_t u = parse_number(tok[1], line);
        const std::uint64_t v = parse_number(tok[2], line);
        if (u >= n || v >= n)
            throw ParseError(ParseFailure::UnknownVertex, line,
                             "edge references unknown vertex " + std::to_string(u >= n ? u : v));
        if (u == v)
            throw ParseError(ParseFailure::SelfLoop, line, "self-loop at vertex " + std::to_string(u));
        auto a = static_cast<VertexId>(std::min(u, v));
        auto b = static_cast<VertexId>(std::max(u, v));
        edges.emplace_back(a, b);
        keyed.push_back({{a, b}, line});
        ++degree[u];
        ++degree[v];
    }
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    for (std::size_t i = 1; i < keyed.size(); ++i)
        if (keyed[i].first == keyed[i - 1].first)
            throw ParseError(ParseFailure::DuplicateEdge, keyed[i].second,
                             "duplicate edge (" + std::to_string(keyed[i].first.first) + "," +
                                 std::to_string(keyed[i].first.second) + ")");
    for (std::uint64_t id = 0; id < n; ++id)
        if (declared[id].second != ~std::uint64_t{0} && declared[id].second != degree[id])
            throw ParseError(ParseFailure::DegreeMismatch, declared[id].first,
                             "vertex " + std::to_string(id) + " declares degree " +
                                 std::to_string(declared[id].second) + " but has " +
                                 std::to_string(degree[id]));
    return Graph(std::move(labels), edges);
}

}  // namespace

Graph parse_graph(std::istream& in) {
    LineReader reader(in);
    return parse_one(reader);
}

std::vector<Graph> parse_graphs(std::istream& in) {
    LineReader reader(in);
    std::vector<Graph> out;
    while (!reader.at_eof()) out.push_back(parse_one(reader));
    return out;
}

void write_graph(std::ostream& out, const Graph& g) {
    out << "t " << g.vertex_count() << ' ' << g.edge_count() << '\n';
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        out << "v " << v << ' ' << g.label(v) << ' ' << g.degree(v) << '\n';
    for (auto [u, v] : g.edges()) out << "e " << u << ' ' << v << '\n';
}

Graph read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open graph file '" + path + "'");
    return parse_graph(in);
}

std::vector<Graph> read_graphs_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open graph file '" + path + "'");
    return parse_graphs(in);
}

void write_graphs_file(const std::string& path, std::span<const Graph> graphs) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    for (const Graph& g : graphs) write_graph(out, g);
    if (!out) throw Error(ErrorKind::Io, "write failed for '" + path + "'");
}

std::vector<OrientedEdge> normalize_edge(const Graph& g, VertexId u, VertexId v) {
    if (u >= g.vertex_count() || v >= g.vertex_count() || !g.has_edge(u, v))
        throw Error(ErrorKind::InvalidArgument,
                    "(" + std::to_string(u) + "," + std::to_string(v) + ") is not an edge");
    if (g.label(u) < g.label(v)) return {{u, v}};
    if (g.label(v) < g.label(u)) return {{v, u}};
    return {{u, v}, {v, u}};
}

std::vector<OrientedEdge> normalized_edges(const Graph& g) {
    std::vector<OrientedEdge> out;
    out.reserve(g.edge_count() * 2);
    for (auto [u, v] : g.edges()) {
        if (g.label(u) < g.label(v)) {
            out.push_back({u, v});
        } else if (g.label(v) < g.label(u)) {
            out.push_back({v, u});
        } else {
            out.push_back({u, v});
            out.push_back({v, u});
        }
    }
    return out;
}

EdgeType classify_edge(const Graph& g, OrientedEdge e, std::size_t dstar) {
    const bool from_sparse = g.degree(e.from) <= dstar;
    const bool to_sparse = g.degree(e.to) <= dstar;
    if (from_sparse) return to_sparse ? EdgeType::SparseSparse : EdgeType::SparseDense;
    return to_sparse ? EdgeType::DenseSparse : EdgeType::DenseDense;
}

Graph induced_subgraph(const Graph& g, std::span<const VertexId> vertices) {
    std::vector<Label> labels;
    labels.reserve(vertices.size());
    for (VertexId v : vertices) labels.push_back(g.label(v));
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (std::size_t i = 0; i < vertices.size(); ++i)
        for (std::size_t j = i + 1; j < vertices.size(); ++j)
            if (g.has_edge(vertices[i], vertices[j]))
                edges.emplace_back(static_cast<VertexId>(i), static_cast<VertexId>(j));
    return Graph(std::move(labels), edges);
}

}  // namespace anchormatch
