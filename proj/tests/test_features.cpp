#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "anchormatch/features.hpp"
#include "anchormatch/oracle.hpp"
#include "anchormatch/rng.hpp"
#include "anchormatch/workbench.hpp"
#include "fixtures.hpp"

using namespace anchormatch;

namespace {

Graph hub(std::size_t leaves, std::vector<Label> labels = {}) {
    if (labels.empty()) labels.assign(leaves + 1, 0);
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (VertexId v = 1; v <= leaves; ++v) edges.emplace_back(0, v);
    return Graph(labels, edges);
}

}  // namespace

TEST(Stars, CountPerEdge) {
    for (std::size_t leaves = 1; leaves <= 6; ++leaves) {
        Graph g = hub(leaves);
        auto stars = enumerate_anchored_stars(g, {0, 1});
        EXPECT_EQ(stars.size(), std::size_t{1} << (leaves - 1));
        // leaf side: degree 1, only the bare edge
        EXPECT_EQ(enumerate_anchored_stars(g, {1, 0}).size(), 1u);
    }
}

TEST(Stars, DegreeFourGivesEight) {
    Graph g = hub(4, {0, 1, 2, 3, 4});
    auto stars = enumerate_anchored_stars(g, {0, 1});
    ASSERT_EQ(stars.size(), 8u);
    // every subset of {2,3,4} exactly once
    std::set<std::vector<Label>> seen;
    for (const auto& s : stars) {
        EXPECT_EQ(s.center_label, 0u);
        EXPECT_EQ(s.anchor_label, 1u);
        EXPECT_TRUE(std::is_sorted(s.leaf_labels.begin(), s.leaf_labels.end()));
        EXPECT_EQ(s.members.size(), s.leaf_labels.size() + 2);
        seen.insert(s.leaf_labels);
    }
    EXPECT_EQ(seen.size(), 8u);
}

TEST(Stars, MembersMatchSubsetsOracle) {
    Graph g = fixtures::example_data();
    for (auto [a, b] : g.edges()) {
        for (OrientedEdge e : {OrientedEdge{a, b}, OrientedEdge{b, a}}) {
            std::vector<VertexId> others;
            for (VertexId w : g.neighbors(e.from))
                if (w != e.to) others.push_back(w);
            std::multiset<std::multiset<Label>> expected;
            for (std::size_t mask = 0; mask < (std::size_t{1} << others.size()); ++mask) {
                std::multiset<Label> s;
                for (std::size_t i = 0; i < others.size(); ++i)
                    if (mask >> i & 1) s.insert(g.label(others[i]));
                expected.insert(s);
            }
            std::multiset<std::multiset<Label>> got;
            for (const auto& s : enumerate_anchored_stars(g, e)) {
                EXPECT_EQ(s.members[0], e.from);
                EXPECT_EQ(s.members[1], e.to);
                for (std::size_t i = 2; i < s.members.size(); ++i) {
                    EXPECT_TRUE(g.has_edge(e.from, s.members[i]));
                    EXPECT_EQ(g.label(s.members[i]), s.leaf_labels[i - 2]);
                }
                got.insert(std::multiset<Label>(s.leaf_labels.begin(), s.leaf_labels.end()));
            }
            EXPECT_EQ(got, expected);
        }
    }
}

TEST(Stars, MaxStarHoldsAllLeaves) {
    Graph g = fixtures::example_data();
    // v5 (id 4) anchored at v3 (id 2): leaves v4, v6, v8 -> D, D, C
    auto s = max_anchored_star(g, {4, 2});
    EXPECT_EQ(s.center_label, fixtures::A);
    EXPECT_EQ(s.anchor_label, fixtures::B);
    EXPECT_EQ(s.leaf_labels, (std::vector<Label>{fixtures::C, fixtures::D, fixtures::D}));
}

TEST(Stars, RejectsNonEdgesAndOtherRadii) {
    Graph g = fixtures::path_graph({0, 1, 2});
    EXPECT_THROW(enumerate_anchored_stars(g, {0, 2}), Error);
    try {
        enumerate_anchored_stars(g, {0, 1}, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Unsupported);
    }
    EXPECT_THROW(enumerate_anchored_paths(g, {0, 1}, 0), Error);
}

TEST(Stars, DegreeLimit) {
    Graph g = hub(kMaxStarCenterDegree + 1);
    try {
        enumerate_anchored_stars(g, {0, 1});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Unsupported);
    }
}

TEST(Paths, CountPerEdge) {
    GenSpec spec;
    spec.model = GenModel::ScaleFree;
    spec.vertices = 80;
    spec.sigma = 4;
    Graph g = generate_graph(spec);
    for (auto [a, b] : g.edges()) {
        EXPECT_EQ(enumerate_anchored_paths(g, {a, b}).size(), g.degree(a));
        EXPECT_EQ(enumerate_anchored_paths(g, {b, a}).size(), g.degree(b));
    }
}

TEST(Paths, ExampleCode) {
    using fixtures::A;
    using fixtures::B;
    using fixtures::C;
    Graph q = fixtures::example_query();
    // (q3, q4): q3's other neighbors are q2 and q5, both B
    auto max = max_anchored_paths(q, {2, 3});
    ASSERT_EQ(max.size(), 2u);
    EXPECT_EQ(max[0], PathCode::path(B, A, C));
    EXPECT_EQ(max[1], PathCode::path(B, A, C));
    auto all = enumerate_anchored_paths(q, {2, 3});
    ASSERT_EQ(all.size(), 3u);
    EXPECT_EQ(std::count(all.begin(), all.end(), PathCode::edge(A, C)), 1);

    // leaf center: only the edge code
    auto leaf = max_anchored_paths(q, {4, 2});
    ASSERT_EQ(leaf.size(), 1u);
    EXPECT_EQ(leaf[0], PathCode::edge(B, A));
}

TEST(Oracle, StarIsomorphicAgreesWithBijectionSearch) {
    // Compare the triple test against an explicit search for a label and
    // anchor preserving leaf bijection.
    Rng rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        AnchoredStar a, b;
        a.center_label = static_cast<Label>(rng.below(2));
        b.center_label = static_cast<Label>(rng.below(2));
        a.anchor_label = static_cast<Label>(rng.below(2));
        b.anchor_label = static_cast<Label>(rng.below(2));
        std::size_t na = rng.below(4), nb = rng.below(4);
        for (std::size_t i = 0; i < na; ++i) a.leaf_labels.push_back(static_cast<Label>(rng.below(3)));
        for (std::size_t i = 0; i < nb; ++i) b.leaf_labels.push_back(static_cast<Label>(rng.below(3)));
        std::vector<Label> la = a.leaf_labels, lb = b.leaf_labels;
        std::sort(la.begin(), la.end());
        std::sort(lb.begin(), lb.end());
        a.leaf_labels = la;
        b.leaf_labels = lb;
        bool bijection = false;
        if (a.center_label == b.center_label && a.anchor_label == b.anchor_label && la.size() == lb.size()) {
            std::vector<std::size_t> perm(lb.size());
            std::iota(perm.begin(), perm.end(), 0);
            do {
                bool ok = true;
                for (std::size_t i = 0; i < la.size(); ++i) ok = ok && la[i] == lb[perm[i]];
                bijection = bijection || ok;
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
        EXPECT_EQ(star_isomorphic(a, b), bijection);
    }
}
