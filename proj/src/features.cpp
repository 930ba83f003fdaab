#include "anchormatch/features.hpp"

#include <algorithm>
#include <string>

namespace anchormatch {

void require_radius_one(int k) {
    if (k != 1)
        throw Error(ErrorKind::Unsupported,
                    "anchored features are implemented for k = 1 only (got k = " + std::to_string(k) + ")");
}

namespace detail {

void require_edge(const Graph& g, OrientedEdge e) {
    if (e.from >= g.vertex_count() || e.to >= g.vertex_count() || !g.has_edge(e.from, e.to))
        throw Error(ErrorKind::InvalidArgument, "(" + std::to_string(e.from) + "," +
                                                    std::to_string(e.to) + ") is not an edge");
}

std::vector<VertexId> sorted_leaf_candidates(const Graph& g, OrientedEdge e) {
    std::vector<VertexId> others;
    others.reserve(g.degree(e.from));
    for (VertexId w : g.neighbors(e.from))
        if (w != e.to) others.push_back(w);
    std::sort(others.begin(), others.end(), [&](VertexId a, VertexId b) {
        return g.label(a) != g.label(b) ? g.label(a) < g.label(b) : a < b;
    });
    return others;
}

}  // namespace detail

std::vector<AnchoredStar> enumerate_anchored_stars(const Graph& g, OrientedEdge e, int k) {
    require_radius_one(k);
    std::vector<AnchoredStar> out;
    for_each_anchored_star(g, e, [&](const AnchoredStar& s) { out.push_back(s); });
    return out;
}

AnchoredStar max_anchored_star(const Graph& g, OrientedEdge e, int k) {
    require_radius_one(k);
    detail::require_edge(g, e);
    AnchoredStar star;
    star.center_label = g.label(e.from);
    star.anchor_label = g.label(e.to);
    star.members = {e.from, e.to};
    for (VertexId w : detail::sorted_leaf_candidates(g, e)) {
        star.leaf_labels.push_back(g.label(w));
        star.members.push_back(w);
    }
    return star;
}

std::vector<PathCode> enumerate_anchored_paths(const Graph& g, OrientedEdge e, int k) {
    require_radius_one(k);
    detail::require_edge(g, e);
    const Label lu = g.label(e.from);
    const Label lv = g.label(e.to);
    std::vector<PathCode> out;
    out.reserve(g.degree(e.from));
    out.push_back(PathCode::edge(lu, lv));
    for (VertexId w : g.neighbors(e.from))
        if (w != e.to) out.push_back(PathCode::path(g.label(w), lu, lv));
    return out;
}

std::vector<PathCode> max_anchored_paths(const Graph& g, OrientedEdge e, int k) {
    require_radius_one(k);
    detail::require_edge(g, e);
    const Label lu = g.label(e.from);
    const Label lv = g.label(e.to);
    if (g.degree(e.from) < 2) return {PathCode::edge(lu, lv)};
    std::vector<PathCode> out;
    for (VertexId w : g.neighbors(e.from))
        if (w != e.to) out.push_back(PathCode::path(g.label(w), lu, lv));
    return out;
}

}  // namespace anchormatch
