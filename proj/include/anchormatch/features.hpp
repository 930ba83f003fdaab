#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "anchormatch/errors.hpp"
#include "anchormatch/graph.hpp"

namespace anchormatch {

/// Anchored 1-radius subgraph: the anchor edge (center, anchor) plus a subset
/// of the center's other incident edges. Stars have a trivial canonical form,
/// so (center_label, anchor_label, sorted leaf_labels) identifies the
/// isomorphism class.
struct AnchoredStar {
    Label center_label = 0;
    Label anchor_label = 0;
    std::vector<Label> leaf_labels;  // ascending
    /// Data side only: center, anchor, then the leaf vertices in leaf_labels order.
    std::vector<VertexId> members;

    bool same_shape(const AnchoredStar& other) const {
        return center_label == other.center_label && anchor_label == other.anchor_label &&
               leaf_labels == other.leaf_labels;
    }
};

/// Non-owning view of a star's labels. Leaves may be in any order.
struct StarView {
    Label center_label = 0;
    Label anchor_label = 0;
    std::span<const Label> leaf_labels;

    StarView() = default;
    StarView(Label center, Label anchor, std::span<const Label> leaves)
        : center_label(center), anchor_label(anchor), leaf_labels(leaves) {}
    StarView(const AnchoredStar& s)  // NOLINT(google-explicit-constructor)
        : center_label(s.center_label), anchor_label(s.anchor_label), leaf_labels(s.leaf_labels) {}
};

/// Label tuple of an anchored 1-radius path, farthest vertex first:
/// (L(w), L(u), L(v)) or (L(u), L(v)).
struct PathCode {
    std::array<Label, 3> labels{};
    std::uint8_t length = 0;

    static PathCode edge(Label u, Label v) { return {{u, v, 0}, 2}; }
    static PathCode path(Label w, Label u, Label v) { return {{w, u, v}, 3}; }

    auto operator<=>(const PathCode&) const = default;
};

struct PathCodeHash {
    std::size_t operator()(const PathCode& c) const noexcept {
        std::uint64_t h = c.length;
        for (Label l : c.labels) h = (h ^ l) * 0x100000001b3ULL + 0x9e3779b97f4a7c15ULL;
        return static_cast<std::size_t>(h ^ (h >> 29));
    }
};

/// Only radius 1 is implemented; any other value throws Error(Unsupported).
void require_radius_one(int k);

/// Largest center degree accepted for star enumeration.
inline constexpr std::size_t kMaxStarCenterDegree = 31;

/// Calls `visit(const AnchoredStar&)` once per subset of the center's
/// non-anchor incident edges: 2^(d(from)-1) calls in total. The star object
/// is reused between calls.
template <typename Visitor>
void for_each_anchored_star(const Graph& g, OrientedEdge e, Visitor&& visit);

std::vector<AnchoredStar> enumerate_anchored_stars(const Graph& g, OrientedEdge e, int k = 1);

AnchoredStar max_anchored_star(const Graph& g, OrientedEdge e, int k = 1);

/// All d(from) anchored paths: the 2-tuple plus one 3-tuple per other
/// neighbor, as a multiset.
std::vector<PathCode> enumerate_anchored_paths(const Graph& g, OrientedEdge e, int k = 1);

/// The maximum paths: every 3-tuple when d(from) >= 2, else the 2-tuple.
std::vector<PathCode> max_anchored_paths(const Graph& g, OrientedEdge e, int k = 1);

namespace detail {

void require_edge(const Graph& g, OrientedEdge e);

/// Center's neighbors other than the anchor, ordered by (label, id).
std::vector<VertexId> sorted_leaf_candidates(const Graph& g, OrientedEdge e);

}  // namespace detail

template <typename Visitor>
void for_each_anchored_star(const Graph& g, OrientedEdge e, Visitor&& visit) {
    detail::require_edge(g, e);
    const std::vector<VertexId> others = detail::sorted_leaf_candidates(g, e);
    if (others.size() + 1 > kMaxStarCenterDegree)
        throw Error(ErrorKind::Unsupported, "star enumeration center degree exceeds limit");
    AnchoredStar star;
    star.center_label = g.label(e.from);
    star.anchor_label = g.label(e.to);
    const std::uint64_t subsets = std::uint64_t{1} << others.size();
    for (std::uint64_t mask = 0; mask < subsets; ++mask) {
        star.leaf_labels.clear();
        star.members.clear();
        star.members.push_back(e.from);
        star.members.push_back(e.to);
        for (std::uint64_t bits = mask; bits != 0; bits &= bits - 1) {
            VertexId w = others[static_cast<std::size_t>(std::countr_zero(bits))];
            star.leaf_labels.push_back(g.label(w));
            star.members.push_back(w);
        }
        visit(static_cast<const AnchoredStar&>(star));
    }
}

}  // namespace anchormatch
