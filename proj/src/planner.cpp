#include "anchormatch/planner.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

#include "anchormatch/errors.hpp"
#include "anchormatch/rng.hpp"

namespace anchormatch {

const char* to_string(CostKind kind) { return kind == CostKind::Degree ? "deg" : "lf"; }

const char* to_string(StartKind kind) {
    switch (kind) {
        case StartKind::MaxDeg: return "maxdeg";
        case StartKind::MinLF: return "minlf";
        case StartKind::Rand: return "rand";
    }
    return "?";
}

namespace {

std::size_t data_count(std::span<const std::size_t> counts, Label l) { return l < counts.size() ? counts[l] : 0; }

double min_neighbor_frequency(const CostStrategy& cost, const Graph& q, VertexId v) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (VertexId w : q.neighbors(v)) best = std::min(best, data_count(cost.data_label_counts, q.label(w)));
    return static_cast<double>(best);
}

}  // namespace

double edge_cost(const CostStrategy& cost, const Graph& q, VertexId qi, VertexId qj) {
    if (!q.has_edge(qi, qj))
        throw Error(ErrorKind::InvalidArgument,
                    "(" + std::to_string(qi) + "," + std::to_string(qj) + ") is not a query edge");
    if (cost.kind == CostKind::Degree) return -static_cast<double>(q.degree(qi) + q.degree(qj));
    return min_neighbor_frequency(cost, q, qi) + min_neighbor_frequency(cost, q, qj);
}

std::vector<VertexId> select_start_vertices(const StartStrategy& strategy, const Graph& q,
                                            std::span<const std::size_t> data_label_counts) {
    const std::size_t n = q.vertex_count();
    if (n == 0) throw Error(ErrorKind::InvalidQuery, "empty query graph");
    const std::size_t K = strategy.K.value_or(std::min<std::size_t>(3, n));
    if (K < 1 || K > n)
        throw Error(ErrorKind::InvalidArgument,
                    "K = " + std::to_string(K) + " is outside [1, " + std::to_string(n) + "]");
    std::vector<VertexId> order(n);
    std::iota(order.begin(), order.end(), VertexId{0});
    switch (strategy.kind) {
        case StartKind::MaxDeg:
            std::stable_sort(order.begin(), order.end(),
                             [&](VertexId a, VertexId b) { return q.degree(a) > q.degree(b); });
            break;
        case StartKind::MinLF:
            std::stable_sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
                return data_count(data_label_counts, q.label(a)) < data_count(data_label_counts, q.label(b));
            });
            break;
        case StartKind::Rand: {
            Rng rng(strategy.seed);
            rng.shuffle(std::span<VertexId>(order));
            break;
        }
    }
    order.resize(K);
    return order;
}

QueryPlan plan_from_start(const Graph& q, const CostStrategy& cost, VertexId start) {
    const std::size_t n = q.vertex_count();
    if (start >= n) throw Error(ErrorKind::InvalidArgument, "start vertex out of range");
    QueryPlan plan;
    plan.start = start;
    std::vector<char> visited(n, 0);
    std::vector<VertexId> parent(n, start);
    std::vector<VertexId> stack{start};
    visited[start] = 1;
    plan.pi.push_back(start);
    while (!stack.empty()) {
        const VertexId top = stack.back();
        bool found = false;
        VertexId best = 0;
        double best_cost = 0.0;
        for (VertexId w : q.neighbors(top)) {  // ascending ids, so strict < keeps the smallest on ties
            if (visited[w]) continue;
            const double c = edge_cost(cost, q, top, w);
            if (!found || c < best_cost) {
                found = true;
                best = w;
                best_cost = c;
            }
        }
        if (!found) {
            stack.pop_back();
            continue;
        }
        visited[best] = 1;
        parent[best] = top;
        plan.pi.push_back(best);
        plan.dfs_edges.push_back({top, best});
        plan.total_cost += best_cost;
        stack.push_back(best);
    }
    if (plan.pi.size() != n) throw Error(ErrorKind::InvalidQuery, "query graph is not connected");

    plan.non_dfs_checks.assign(n, {});
    for (std::size_t j = 1; j < n; ++j) {
        const VertexId v = plan.pi[j];
        for (std::size_t i = 0; i < j; ++i) {
            const VertexId u = plan.pi[i];
            if (u != parent[v] && q.has_edge(u, v)) plan.non_dfs_checks[j].push_back(u);
        }
    }
    return plan;
}

std::vector<QueryPlan> explore_plans(const Graph& q, const CostStrategy& cost, std::span<const VertexId> starts) {
    std::vector<QueryPlan> plans;
    plans.reserve(starts.size());
    for (VertexId s : starts) plans.push_back(plan_from_start(q, cost, s));
    return plans;
}

QueryPlan plan_query(const Graph& q, const CostStrategy& cost, const StartStrategy& start,
                     std::span<const std::size_t> data_label_counts) {
    if (q.edge_count() == 0) throw Error(ErrorKind::InvalidQuery, "query graph has no edge to anchor on");
    if (!q.is_connected()) throw Error(ErrorKind::InvalidQuery, "query graph is not connected");
    const std::vector<VertexId> starts = select_start_vertices(start, q, data_label_counts);
    std::vector<QueryPlan> plans = explore_plans(q, cost, starts);
    std::size_t best = 0;
    for (std::size_t i = 1; i < plans.size(); ++i)
        if (plans[i].total_cost < plans[best].total_cost) best = i;
    return std::move(plans[best]);
}

std::string format_plan(const QueryPlan& plan) {
    std::ostringstream out;
    out << "dfs:";
    for (OrientedEdge e : plan.dfs_edges) out << " (q" << e.from << ",q" << e.to << ")";
    out << "\npi:";
    for (VertexId v : plan.pi) out << " q" << v;
    out << "\nnon-dfs:";
    for (std::size_t j = 0; j < plan.non_dfs_checks.size(); ++j)
        for (VertexId u : plan.non_dfs_checks[j]) out << " (q" << u << ",q" << plan.pi[j] << ")";
    out << "\ncost: " << plan.total_cost << "\n";
    return out.str();
}

}  // namespace anchormatch
