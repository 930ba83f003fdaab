#include "anchormatch/workbench.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>

#include "anchormatch/errors.hpp"
#include "anchormatch/rng.hpp"

namespace anchormatch {

const char* to_string(GenModel model) {
    switch (model) {
        case GenModel::RandomRegular: return "rg";
        case GenModel::SmallWorld: return "ws";
        case GenModel::ScaleFree: return "ba";
    }
    return "?";
}

GenModel parse_gen_model(const std::string& name) {
    if (name == "rg" || name == "regular") return GenModel::RandomRegular;
    if (name == "ws" || name == "nws" || name == "smallworld") return GenModel::SmallWorld;
    if (name == "ba" || name == "scalefree") return GenModel::ScaleFree;
    throw Error(ErrorKind::InvalidArgument, "unknown graph model '" + name + "' (expected rg, ws or ba)");
}

namespace {

using EdgeSet = std::set<std::pair<VertexId, VertexId>>;

std::pair<VertexId, VertexId> ordered(VertexId a, VertexId b) { return a < b ? std::pair(a, b) : std::pair(b, a); }

// One pairing attempt; nullopt when the leftover stubs cannot be joined.
std::optional<EdgeSet> try_regular(std::size_t n, std::size_t r, Rng& rng) {
    EdgeSet edges;
    std::vector<VertexId> stubs;
    for (std::size_t i = 0; i < r; ++i)
        for (VertexId v = 0; v < n; ++v) stubs.push_back(v);
    while (!stubs.empty()) {
        std::map<VertexId, std::size_t> leftover;
        rng.shuffle(std::span<VertexId>(stubs));
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
            auto e = ordered(stubs[i], stubs[i + 1]);
            if (e.first != e.second && !edges.count(e)) {
                edges.insert(e);
            } else {
                ++leftover[stubs[i]];
                ++leftover[stubs[i + 1]];
            }
        }
        bool suitable = leftover.empty();
        for (auto a = leftover.begin(); a != leftover.end() && !suitable; ++a)
            for (auto b = std::next(a); b != leftover.end() && !suitable; ++b)
                suitable = !edges.count(ordered(a->first, b->first));
        if (!suitable) return std::nullopt;
        stubs.clear();
        for (auto [v, count] : leftover)
            for (std::size_t i = 0; i < count; ++i) stubs.push_back(v);
    }
    return edges;
}

EdgeSet random_regular(const GenSpec& spec, Rng& rng) {
    const std::size_t n = spec.vertices, r = spec.degree;
    if (r >= n) throw Error(ErrorKind::Infeasible, "regular degree must be below the vertex count");
    if ((n * r) % 2 != 0) throw Error(ErrorKind::Infeasible, "r * |V| must be even for a regular graph");
    if (r == 0) return {};
    for (int attempt = 0; attempt < 1000; ++attempt)
        if (auto edges = try_regular(n, r, rng)) return *edges;
    throw Error(ErrorKind::Infeasible, "random regular pairing did not converge");
}

EdgeSet small_world(const GenSpec& spec, Rng& rng) {
    const std::size_t n = spec.vertices, k = spec.degree;
    if (k % 2 != 0 || k == 0) throw Error(ErrorKind::InvalidArgument, "small-world ring degree k must be even and positive");
    if (k >= n) throw Error(ErrorKind::Infeasible, "small-world ring degree must be below the vertex count");
    if (spec.shortcut_probability < 0.0 || spec.shortcut_probability > 1.0)
        throw Error(ErrorKind::InvalidArgument, "shortcut probability must lie in [0, 1]");
    EdgeSet edges;
    std::vector<std::set<VertexId>> adj(n);
    auto add = [&](VertexId a, VertexId b) {
        edges.insert(ordered(a, b));
        adj[a].insert(b);
        adj[b].insert(a);
    };
    for (VertexId u = 0; u < n; ++u)
        for (std::size_t j = 1; j <= k / 2; ++j) add(u, static_cast<VertexId>((u + j) % n));
    for (VertexId u = 0; u < n; ++u) {
        for (std::size_t j = 1; j <= k / 2; ++j) {
            if (!rng.bernoulli(spec.shortcut_probability)) continue;
            if (adj[u].size() >= n - 1) continue;
            VertexId w;
            do {
                w = static_cast<VertexId>(rng.below(n));
            } while (w == u || adj[u].count(w));
            add(u, w);
        }
    }
    return edges;
}

EdgeSet scale_free(const GenSpec& spec, Rng& rng) {
    const std::size_t n = spec.vertices, m = spec.degree;
    if (m == 0) throw Error(ErrorKind::InvalidArgument, "attachment count m' must be positive");
    if (m + 1 > n) throw Error(ErrorKind::Infeasible, "scale-free graph needs more than m' vertices");
    EdgeSet edges;
    std::vector<VertexId> repeated;  // each vertex once per incident edge
    for (VertexId a = 0; a <= m; ++a)
        for (VertexId b = a + 1; b <= m; ++b) {
            edges.insert({a, b});
            repeated.push_back(a);
            repeated.push_back(b);
        }
    for (VertexId v = static_cast<VertexId>(m + 1); v < n; ++v) {
        std::set<VertexId> targets;
        while (targets.size() < m) targets.insert(repeated[rng.below(repeated.size())]);
        for (VertexId t : targets) {
            edges.insert(ordered(t, v));
            repeated.push_back(t);
            repeated.push_back(v);
        }
    }
    return edges;
}

}  // namespace

Graph generate_graph(const GenSpec& spec) {
    if (spec.vertices == 0) throw Error(ErrorKind::InvalidArgument, "vertex count must be positive");
    if (spec.sigma == 0) throw Error(ErrorKind::InvalidArgument, "label alphabet must be non-empty");
    Rng rng(spec.seed);
    EdgeSet edges;
    switch (spec.model) {
        case GenModel::RandomRegular: edges = random_regular(spec, rng); break;
        case GenModel::SmallWorld: edges = small_world(spec, rng); break;
        case GenModel::ScaleFree: edges = scale_free(spec, rng); break;
    }
    Rng label_rng(splitmix64(spec.seed ^ 0x1abe15ULL));
    std::vector<Label> labels(spec.vertices);
    for (Label& l : labels) l = static_cast<Label>(label_rng.below(spec.sigma));
    std::vector<std::pair<VertexId, VertexId>> list(edges.begin(), edges.end());
    return Graph(std::move(labels), list);
}

const char* to_string(QueryCategory category) {
    switch (category) {
        case QueryCategory::Any: return "any";
        case QueryCategory::Dense: return "dense";
        case QueryCategory::Sparse: return "sparse";
    }
    return "?";
}

QueryCategory parse_query_category(const std::string& name) {
    if (name == "any") return QueryCategory::Any;
    if (name == "dense") return QueryCategory::Dense;
    if (name == "sparse") return QueryCategory::Sparse;
    throw Error(ErrorKind::InvalidArgument, "unknown query category '" + name + "' (expected any, dense or sparse)");
}

bool is_dense_query(const Graph& q) {
    return q.vertex_count() > 0 &&
           2.0 * static_cast<double>(q.edge_count()) / static_cast<double>(q.vertex_count()) > 3.0;
}

std::vector<GeneratedQuery> generate_query_samples(const Graph& g, const QueryGenSpec& spec) {
    if (spec.size < 2) throw Error(ErrorKind::InvalidArgument, "query size must be >= 2");
    if (g.vertex_count() < spec.size)
        throw Error(ErrorKind::Infeasible, "graph has fewer vertices than the requested query size");
    Rng rng(spec.seed);
    std::vector<GeneratedQuery> out;
    const std::size_t max_attempts = 200 * std::max<std::size_t>(spec.count, 1) + 1000;
    const std::size_t max_steps = 50 * spec.size;
    std::vector<VertexId> walk;
    std::vector<char> seen(g.vertex_count(), 0);
    for (std::size_t attempt = 0; out.size() < spec.count; ++attempt) {
        if (attempt >= max_attempts)
            throw Error(ErrorKind::Infeasible, "could not collect " + std::to_string(spec.count) + " " +
                                                   to_string(spec.category) + " queries of size " +
                                                   std::to_string(spec.size));
        walk.clear();
        VertexId cur = static_cast<VertexId>(rng.below(g.vertex_count()));
        walk.push_back(cur);
        seen[cur] = 1;
        for (std::size_t step = 0; step < max_steps && walk.size() < spec.size; ++step) {
            auto nb = g.neighbors(cur);
            if (nb.empty()) break;
            cur = nb[rng.below(nb.size())];
            if (!seen[cur]) {
                seen[cur] = 1;
                walk.push_back(cur);
            }
        }
        for (VertexId v : walk) seen[v] = 0;
        if (walk.size() < spec.size) continue;
        Graph q = induced_subgraph(g, walk);
        if (spec.size > 4 && spec.category != QueryCategory::Any &&
            is_dense_query(q) != (spec.category == QueryCategory::Dense))
            continue;
        out.push_back({std::move(q), walk});
    }
    return out;
}

std::vector<Graph> generate_queries(const Graph& g, const QueryGenSpec& spec) {
    std::vector<Graph> out;
    for (GeneratedQuery& s : generate_query_samples(g, spec)) out.push_back(std::move(s.graph));
    return out;
}

std::vector<SuiteGraph> generate_suite(std::size_t instances, std::uint64_t seed, std::size_t per_graph) {
    if (per_graph == 0) throw Error(ErrorKind::InvalidArgument, "per-graph query count must be positive");
    static constexpr std::size_t kSigmas[] = {3, 10, 50};
    static constexpr std::size_t kDstars[] = {10, 4, 2};
    std::vector<SuiteGraph> suite;
    std::size_t made = 0;
    for (std::size_t i = 0; made < instances; ++i) {
        Rng rng(splitmix64(seed + 0x5417e * (i + 1)));
        SuiteGraph sg;
        GenSpec& spec = sg.spec;
        spec.model = static_cast<GenModel>(i % 3);
        spec.sigma = kSigmas[(i / 3) % 3];
        sg.dstar = kDstars[(i / 9) % 3];
        spec.vertices = 20 + rng.below(281);
        spec.seed = rng.next();
        switch (spec.model) {
            case GenModel::RandomRegular:
                spec.degree = 3 + rng.below(4);
                if ((spec.degree * spec.vertices) % 2 != 0) ++spec.degree;
                break;
            case GenModel::SmallWorld:
                spec.degree = 4;
                spec.shortcut_probability = rng.uniform(0.0, 0.5);
                break;
            case GenModel::ScaleFree:
                spec.degree = 2 + rng.below(2);
                break;
        }
        sg.graph = generate_graph(spec);
        const std::size_t take = std::min(per_graph, instances - made);
        for (std::size_t j = 0; j < take; ++j) {
            QueryGenSpec qs;
            qs.size = 3 + (made + j) % 6;
            qs.count = 1;
            qs.seed = splitmix64(spec.seed ^ (j + 1));
            qs.category = (made + j) % 2 == 0 ? QueryCategory::Dense : QueryCategory::Sparse;
            std::vector<Graph> q;
            try {
                q = generate_queries(sg.graph, qs);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::Infeasible) throw;
                qs.category = QueryCategory::Any;
                q = generate_queries(sg.graph, qs);
            }
            sg.queries.push_back(std::move(q.front()));
        }
        made += take;
        suite.push_back(std::move(sg));
    }
    return suite;
}

std::vector<std::pair<StarView, StarView>> sample_star_pairs(const StarList& stars, std::size_t count,
                                                             std::uint64_t seed) {
    std::vector<std::pair<StarView, StarView>> out;
    if (stars.size() < 2) return out;
    Rng rng(seed);
    out.reserve(count);
    const std::size_t max_draws = 50 * count + 1000;
    for (std::size_t draw = 0; draw < max_draws && out.size() < count; ++draw) {
        StarView a = stars[rng.below(stars.size())];
        StarView b = stars[rng.below(stars.size())];
        const bool same = a.center_label == b.center_label && a.anchor_label == b.anchor_label &&
                          std::equal(a.leaf_labels.begin(), a.leaf_labels.end(), b.leaf_labels.begin(),
                                     b.leaf_labels.end());
        if (!same) out.emplace_back(a, b);
    }
    return out;
}

double FilteringReport::aggregate() const {
    if (baseline == truth) return 1.0;
    return 1.0 - static_cast<double>(kept - truth) / static_cast<double>(baseline - truth);
}

void FilteringReport::merge(const FilteringReport& other) {
    edges.insert(edges.end(), other.edges.begin(), other.edges.end());
    baseline += other.baseline;
    kept += other.kept;
    truth += other.truth;
}

FilteringReport filtering_power(const Graph& q, const Graph& g, const QueryResult& result,
                                const std::vector<std::vector<VertexId>>& truth) {
    FilteringReport report;
    const auto data_edges = g.edges();
    for (std::size_t j = 0; j < result.plan.dfs_edges.size(); ++j) {
        const OrientedEdge e = result.plan.dfs_edges[j];
        const Label li = q.label(e.from), lj = q.label(e.to);
        EdgeFiltering f;
        f.query_edge = e;
        for (auto [a, b] : data_edges) {
            if (g.label(a) == li && g.label(b) == lj) ++f.baseline;
            if (g.label(b) == li && g.label(a) == lj) ++f.baseline;
        }
        f.kept = result.table.sets[j].pairs.size();
        std::set<std::pair<VertexId, VertexId>> used;
        for (const auto& binding : truth) used.insert({binding[e.from], binding[e.to]});
        f.truth = used.size();
        if (f.kept < f.truth || f.baseline < f.kept)
            throw Error(ErrorKind::InvalidArgument, "candidate counts inconsistent with the oracle");
        f.power = f.baseline == f.truth
                      ? 1.0
                      : 1.0 - static_cast<double>(f.kept - f.truth) / static_cast<double>(f.baseline - f.truth);
        report.baseline += f.baseline;
        report.kept += f.kept;
        report.truth += f.truth;
        report.edges.push_back(f);
    }
    return report;
}

QueryRecord make_query_record(std::size_t id, const QueryResult& result) {
    QueryRecord r;
    r.query_id = id;
    r.matches = result.matches.size();
    r.timings = result.timings;
    r.candidates_s = result.candidate_count(IndexFamily::S);
    r.candidates_s_prime = result.candidate_count(IndexFamily::SPrime);
    r.candidates_p = result.candidate_count(IndexFamily::P);
    return r;
}

void RunReport::add(const QueryRecord& record) {
    queries.push_back(record);
    total_matches += record.matches;
    total_timings.plan_us += record.timings.plan_us;
    total_timings.embed_us += record.timings.embed_us;
    total_timings.candidates_us += record.timings.candidates_us;
    total_timings.growth_us += record.timings.growth_us;
    total_candidates += record.candidates_s + record.candidates_s_prime + record.candidates_p;
}

void RunReport::write(std::ostream& out) const {
    out << "query\tmatches\tplan_us\tembed_us\tcandidates_us\tgrowth_us\ttotal_us\tcand_S\tcand_S'\tcand_P\tfiltering\n";
    auto row = [&](const std::string& id, std::size_t matches, const StageTimings& t, std::size_t s, std::size_t sp,
                   std::size_t p, std::optional<double> filt) {
        out << id << '\t' << matches << '\t' << t.plan_us << '\t' << t.embed_us << '\t' << t.candidates_us << '\t'
            << t.growth_us << '\t' << t.total_us() << '\t' << s << '\t' << sp << '\t' << p << '\t';
        if (filt)
            out << *filt;
        else
            out << '-';
        out << '\n';
    };
    std::size_t s = 0, sp = 0, p = 0;
    for (const QueryRecord& r : queries) {
        row(std::to_string(r.query_id), r.matches, r.timings, r.candidates_s, r.candidates_s_prime, r.candidates_p,
            r.filtering);
        s += r.candidates_s;
        sp += r.candidates_s_prime;
        p += r.candidates_p;
    }
    row("total", total_matches, total_timings, s, sp, p, filtering);
    if (conflict_ratio) out << "conflict_ratio\t" << *conflict_ratio << '\n';
}

}  // namespace anchormatch
