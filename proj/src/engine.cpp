#include "anchormatch/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <iterator>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "anchormatch/errors.hpp"
#include "anchormatch/features.hpp"

namespace anchormatch {

std::size_t CandidateSet::count(IndexFamily family) const {
    return static_cast<std::size_t>(
        std::count_if(pairs.begin(), pairs.end(), [&](const CandidatePair& p) { return p.family == family; }));
}

std::vector<OrientationKeys> query_edge_keys(const Graph& q, OrientedEdge query_edge, const StarKeyer& keyer,
                                             std::size_t dstar) {
    std::vector<OrientationKeys> out;
    for (OrientedEdge e : normalize_edge(q, query_edge.from, query_edge.to)) {
        OrientationKeys keys;
        keys.edge = e;
        // A data center of degree <= d* cannot host a query vertex of larger degree.
        if (q.degree(e.from) <= dstar) {
            keys.star_at_from = keyer.key(max_anchored_star(q, e));
            keys.unknown_label = keys.unknown_label || !keys.star_at_from;
        }
        if (q.degree(e.to) <= dstar) {
            keys.star_at_to = keyer.key(max_anchored_star(q, {e.to, e.from}));
            keys.unknown_label = keys.unknown_label || !keys.star_at_to;
        }
        keys.paths = max_anchored_paths(q, e);
        std::sort(keys.paths.begin(), keys.paths.end());
        keys.paths.erase(std::unique(keys.paths.begin(), keys.paths.end()), keys.paths.end());
        out.push_back(std::move(keys));
    }
    return out;
}

namespace {

bool pair_less(const CandidatePair& a, const CandidatePair& b) {
    return a.parent != b.parent ? a.parent < b.parent : a.child < b.child;
}

std::vector<CandidatePair> orientation_candidates(OrientedEdge query_edge, const OrientationKeys& keys,
                                                  const Graph& q, const AnchorIndexes& idx) {
    std::vector<CandidatePair> out;
    if (keys.unknown_label) return out;
    const OrientedEdge e = keys.edge;
    const bool flipped = e.from != query_edge.from;
    auto emit = [&](OrientedEdge d, IndexFamily family) {
        out.push_back(flipped ? CandidatePair{d.to, d.from, family} : CandidatePair{d.from, d.to, family});
    };
    const Label lu = q.label(e.from);
    const Label lv = q.label(e.to);
    if (keys.star_at_from)
        for (OrientedEdge d : idx.lookup_star(IndexFamily::S, *keys.star_at_from, lu, lv)) emit(d, IndexFamily::S);
    if (keys.star_at_to)
        for (OrientedEdge d : idx.lookup_star(IndexFamily::SPrime, *keys.star_at_to, lu, lv))
            emit(d, IndexFamily::SPrime);
    if (!keys.paths.empty()) {
        auto first = idx.lookup_path(keys.paths.front());
        std::vector<OrientedEdge> common(first.begin(), first.end());
        std::vector<OrientedEdge> next;
        for (std::size_t i = 1; i < keys.paths.size() && !common.empty(); ++i) {
            auto more = idx.lookup_path(keys.paths[i]);
            next.clear();
            std::set_intersection(common.begin(), common.end(), more.begin(), more.end(), std::back_inserter(next));
            common.swap(next);
        }
        for (OrientedEdge d : common) emit(d, IndexFamily::P);
    }
    std::sort(out.begin(), out.end(), pair_less);
    return out;
}

}  // namespace

CandidateSet lookup_candidates(const Graph& q, OrientedEdge query_edge, const std::vector<OrientationKeys>& keys,
                               const AnchorIndexes& idx) {
    CandidateSet set;
    set.query_edge = query_edge;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        std::vector<CandidatePair> found = orientation_candidates(query_edge, keys[i], q, idx);
        if (i == 0) {
            set.pairs = std::move(found);
            continue;
        }
        std::vector<CandidatePair> kept;
        std::set_intersection(set.pairs.begin(), set.pairs.end(), found.begin(), found.end(),
                              std::back_inserter(kept), pair_less);
        set.pairs = std::move(kept);
    }
    return set;
}

CandidateSet get_candidates(const Graph& q, OrientedEdge query_edge, const AnchorIndexes& idx,
                            const StarKeyer& keyer) {
    return lookup_candidates(q, query_edge, query_edge_keys(q, query_edge, keyer, idx.meta.dstar), idx);
}

MatchSet match_growth(const QueryPlan& plan, const CandidateTable& table, const Graph& g, std::size_t workers) {
    if (workers == 0) throw Error(ErrorKind::InvalidArgument, "worker count must be >= 1");
    const std::size_t n = plan.pi.size();
    if (n < 2 || table.sets.size() != plan.dfs_edges.size() || plan.dfs_edges.size() + 1 != n ||
        plan.non_dfs_checks.size() != n)
        throw Error(ErrorKind::InvalidArgument, "candidate table is not aligned with the plan");

    // join[j] maps the data vertex bound to dfs_edges[j].from to its child candidates.
    std::vector<std::unordered_map<VertexId, std::vector<VertexId>>> join(table.sets.size());
    for (std::size_t j = 1; j < table.sets.size(); ++j)
        for (const CandidatePair& p : table.sets[j].pairs) join[j][p.parent].push_back(p.child);

    const std::vector<CandidatePair>& seeds = table.sets[0].pairs;
    MatchSet result;
    std::mutex sink;
    std::atomic<std::size_t> next_seed{0};

    auto work = [&] {
        Binding binding(n, 0);
        MatchSet local;
        auto grow = [&](auto& self, std::size_t j) -> void {
            if (j == n) {
                local.push_back(binding);
                return;
            }
            const OrientedEdge edge = plan.dfs_edges[j - 1];
            auto it = join[j - 1].find(binding[edge.from]);
            if (it == join[j - 1].end()) return;
            const VertexId qv = plan.pi[j];
            for (VertexId x : it->second) {
                bool ok = true;
                for (std::size_t i = 0; i < j && ok; ++i) ok = binding[plan.pi[i]] != x;
                for (std::size_t i = 0; i < plan.non_dfs_checks[j].size() && ok; ++i)
                    ok = g.has_edge(binding[plan.non_dfs_checks[j][i]], x);
                if (!ok) continue;
                binding[qv] = x;
                self(self, j + 1);
            }
        };
        for (std::size_t s = next_seed++; s < seeds.size(); s = next_seed++) {
            const CandidatePair& seed = seeds[s];
            if (seed.parent == seed.child) continue;
            binding[plan.pi[0]] = seed.parent;
            binding[plan.pi[1]] = seed.child;
            grow(grow, 2);
        }
        std::lock_guard<std::mutex> lock(sink);
        result.insert(result.end(), std::make_move_iterator(local.begin()), std::make_move_iterator(local.end()));
    };

    const std::size_t threads = std::max<std::size_t>(1, std::min(workers, seeds.size()));
    if (threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
        for (std::thread& th : pool) th.join();
    }
    std::sort(result.begin(), result.end());
    result.erase(std::unique(result.begin(), result.end()), result.end());
    return result;
}

std::size_t QueryResult::candidate_count(IndexFamily family) const {
    std::size_t total = 0;
    for (const CandidateSet& s : table.sets) total += s.count(family);
    return total;
}

std::size_t QueryResult::candidate_count() const {
    std::size_t total = 0;
    for (const CandidateSet& s : table.sets) total += s.pairs.size();
    return total;
}

QueryResult query(const Graph& q, const Graph& g, const AnchorIndexes& idx, const StarKeyer& keyer,
                  const PlanConfig& config, std::size_t workers) {
    using clock = std::chrono::steady_clock;
    auto micros = [](clock::time_point a, clock::time_point b) {
        return std::chrono::duration_cast<std::chrono::microseconds>(b - a).count();
    };
    check_index_meta(idx, keyer, g);
    require_radius_one(static_cast<int>(idx.meta.k));

    QueryResult r;
    auto t0 = clock::now();
    CostStrategy cost{config.cost, g.label_counts()};
    r.plan = plan_query(q, cost, config.start, cost.data_label_counts);
    auto t1 = clock::now();

    std::vector<std::vector<OrientationKeys>> keys;
    keys.reserve(r.plan.dfs_edges.size());
    for (OrientedEdge e : r.plan.dfs_edges) keys.push_back(query_edge_keys(q, e, keyer, idx.meta.dstar));
    auto t2 = clock::now();

    r.table.sets.reserve(keys.size());
    for (std::size_t j = 0; j < keys.size(); ++j)
        r.table.sets.push_back(lookup_candidates(q, r.plan.dfs_edges[j], keys[j], idx));
    auto t3 = clock::now();

    r.matches = match_growth(r.plan, r.table, g, workers);
    auto t4 = clock::now();

    r.timings = {micros(t0, t1), micros(t1, t2), micros(t2, t3), micros(t3, t4)};
    return r;
}

std::string format_match(const Binding& binding, const QueryPlan& plan) {
    std::ostringstream out;
    for (std::size_t i = 0; i < plan.pi.size(); ++i) {
        if (i) out << ' ';
        out << 'q' << plan.pi[i] << "->" << binding[plan.pi[i]];
    }
    return out.str();
}

}  // namespace anchormatch
