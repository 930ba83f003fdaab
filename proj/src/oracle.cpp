#include "anchormatch/oracle.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

#include "anchormatch/errors.hpp"

namespace anchormatch {

namespace {

std::uint64_t edge_code(VertexId a, VertexId b) {
    if (a > b) std::swap(a, b);
    return (std::uint64_t{a} << 32) | b;
}

struct Search {
    const Graph& q;
    const Graph& g;
    std::unordered_set<std::uint64_t> data_edges;
    std::vector<std::vector<VertexId>> by_label;
    std::vector<VertexId> order;
    std::vector<std::vector<VertexId>> earlier_neighbors;  // per order position
    std::vector<VertexId> binding;
    std::vector<char> used;
    std::vector<std::vector<VertexId>> out;

    Search(const Graph& query, const Graph& data) : q(query), g(data) {
        for (auto [a, b] : g.edges()) data_edges.insert(edge_code(a, b));
        by_label.resize(g.sigma_size());
        for (VertexId v = 0; v < g.vertex_count(); ++v) by_label[g.label(v)].push_back(v);

        // BFS order, restarting at the lowest unvisited vertex.
        std::vector<char> seen(q.vertex_count(), 0);
        for (VertexId root = 0; root < q.vertex_count(); ++root) {
            if (seen[root]) continue;
            std::deque<VertexId> frontier{root};
            seen[root] = 1;
            while (!frontier.empty()) {
                VertexId u = frontier.front();
                frontier.pop_front();
                order.push_back(u);
                for (VertexId w : q.neighbors(u))
                    if (!seen[w]) {
                        seen[w] = 1;
                        frontier.push_back(w);
                    }
            }
        }
        std::vector<std::size_t> pos(q.vertex_count());
        for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
        earlier_neighbors.resize(order.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            for (VertexId w : q.neighbors(order[i]))
                if (pos[w] < i) earlier_neighbors[i].push_back(w);
        binding.assign(q.vertex_count(), 0);
        used.assign(g.vertex_count(), 0);
    }

    void run(std::size_t i) {
        if (i == order.size()) {
            out.push_back(binding);
            return;
        }
        const VertexId u = order[i];
        const Label l = q.label(u);
        if (l >= by_label.size()) return;
        for (VertexId v : by_label[l]) {
            if (used[v]) continue;
            bool ok = true;
            for (VertexId w : earlier_neighbors[i])
                if (!data_edges.count(edge_code(binding[w], v))) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            binding[u] = v;
            used[v] = 1;
            run(i + 1);
            used[v] = 0;
        }
    }
};

}  // namespace

std::vector<std::vector<VertexId>> brute_force_matches(const Graph& q, const Graph& g, std::size_t bound) {
    if (q.vertex_count() > bound)
        throw Error(ErrorKind::InvalidArgument, "query has " + std::to_string(q.vertex_count()) +
                                                    " vertices, oracle bound is " + std::to_string(bound));
    if (q.vertex_count() == 0) return {};
    Search s(q, g);
    s.run(0);
    std::sort(s.out.begin(), s.out.end());
    return std::move(s.out);
}

bool star_isomorphic(const AnchoredStar& a, const AnchoredStar& b) {
    if (a.center_label != b.center_label || a.anchor_label != b.anchor_label) return false;
    std::vector<Label> la = a.leaf_labels, lb = b.leaf_labels;
    std::sort(la.begin(), la.end());
    std::sort(lb.begin(), lb.end());
    return la == lb;
}

}  // namespace anchormatch
