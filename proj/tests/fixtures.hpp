#pragma once

#include <utility>
#include <vector>

#include "anchormatch/graph.hpp"

namespace fixtures {

using anchormatch::Graph;
using anchormatch::Label;
using anchormatch::VertexId;

inline constexpr Label A = 0, B = 1, C = 2, D = 3;

// The worked example: data vertex v_i has id i - 1.
inline Graph example_data() {
    std::vector<Label> labels{A, C, B, D, A, D, D, C, A, B, B, B, A};
    std::vector<std::pair<VertexId, VertexId>> edges{{1, 2},  {1, 3},  {3, 5},  {5, 4},   {5, 6},   {5, 8},  {8, 7},
                                                     {8, 9},  {8, 13}, {9, 12}, {9, 10},  {9, 11},  {12, 13}};
    for (auto& [u, v] : edges) {
        --u;
        --v;
    }
    return Graph(labels, edges);
}

// Query q_i has id i - 1.
inline Graph example_query() {
    std::vector<Label> labels{A, B, A, C, B};
    std::vector<std::pair<VertexId, VertexId>> edges{{0, 1}, {1, 2}, {2, 3}, {2, 4}, {0, 3}};
    return Graph(labels, edges);
}

inline Graph complete_graph(std::size_t n, Label label = 0) {
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (VertexId u = 0; u < n; ++u)
        for (VertexId v = u + 1; v < n; ++v) edges.emplace_back(u, v);
    return Graph(std::vector<Label>(n, label), edges);
}

inline Graph path_graph(std::vector<Label> labels) {
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (VertexId v = 1; v < labels.size(); ++v) edges.emplace_back(v - 1, v);
    return Graph(std::move(labels), edges);
}

}  // namespace fixtures
