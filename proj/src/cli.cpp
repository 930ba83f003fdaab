#include "anchormatch/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "anchormatch/anchor_index.hpp"
#include "anchormatch/embedding.hpp"
#include "anchormatch/engine.hpp"
#include "anchormatch/errors.hpp"
#include "anchormatch/graph.hpp"
#include "anchormatch/oracle.hpp"
#include "anchormatch/planner.hpp"
#include "anchormatch/workbench.hpp"

namespace anchormatch {

namespace {

struct Options {
    std::string graph, queries, index, model, out;
    std::size_t dstar = 10;
    int k = 1;
    std::string backend = "gin";
    std::size_t m = 3, n = 10, epochs = 20, batch = 1024;
    double lr = 0.001, xi = 1.0;
    std::uint64_t seed = 1;
    std::string plan = "maxdeg", cost = "deg";
    std::size_t K = 0;  // 0: default
    std::size_t workers = 8;

    std::string gen_model = "ba", category = "any";
    std::size_t vertices = 1000, degree = 2, sigma = 10, size = 4, count = 10;
    double p = 0.25;
    std::size_t pairs = 0, suite = 0;
    bool oracle = false, print_plan = false;
};

// Keeps the model alive for as long as the keyer is used.
struct Backend {
    std::unique_ptr<GinModel> model;
    std::optional<StarKeyer> keyer;
};

GinShape shape_of(const Options& o) {
    GinShape shape;
    shape.m = o.m;
    shape.n = o.n;
    return shape;
}

Backend make_backend(const Options& o, const Graph& g) {
    Backend b;
    if (o.backend == "wl") {
        b.keyer = StarKeyer::wl();
    } else if (o.backend == "gin") {
        if (o.model.empty()) throw Error(ErrorKind::InvalidArgument, "--backend gin needs --model");
        b.model = std::make_unique<GinModel>(load_model(o.model));
        b.keyer = StarKeyer::gin(*b.model);
    } else if (o.backend == "gin-untrained") {
        b.model = std::make_unique<GinModel>(GinModel::initialize(g.sigma_size(), shape_of(o), o.seed));
        b.keyer = StarKeyer::gin(*b.model);
    } else {
        throw Error(ErrorKind::InvalidArgument, "unknown backend '" + o.backend + "'");
    }
    return b;
}

TrainConfig train_config(const Options& o) {
    TrainConfig cfg;
    cfg.epochs = o.epochs;
    cfg.learning_rate = o.lr;
    cfg.batch_size = o.batch;
    cfg.seed = o.seed;
    return cfg;
}

LabelGridConfig label_config(const Options& o) {
    LabelGridConfig cfg;
    cfg.xi = o.xi;
    cfg.seed = o.seed;
    return cfg;
}

PlanConfig plan_config(const Options& o) {
    PlanConfig cfg;
    if (o.cost == "deg")
        cfg.cost = CostKind::Degree;
    else if (o.cost == "lf")
        cfg.cost = CostKind::LabelFrequency;
    else
        throw Error(ErrorKind::InvalidArgument, "unknown cost '" + o.cost + "'");
    if (o.plan == "maxdeg")
        cfg.start.kind = StartKind::MaxDeg;
    else if (o.plan == "minlf")
        cfg.start.kind = StartKind::MinLF;
    else if (o.plan == "rand")
        cfg.start.kind = StartKind::Rand;
    else
        throw Error(ErrorKind::InvalidArgument, "unknown plan strategy '" + o.plan + "'");
    if (o.K > 0) cfg.start.K = o.K;
    cfg.start.seed = o.seed;
    return cfg;
}

// Writes to --out when given, else to `out`.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (path.empty()) return;
        file_.open(path, std::ios::binary);
        if (!file_) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
        stream_ = &file_;
    }
    std::ostream& operator*() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

void require(const std::string& value, const char* flag) {
    if (value.empty()) throw Error(ErrorKind::InvalidArgument, std::string("missing required ") + flag);
}

int cmd_gen_graph(const Options& o, std::ostream& out) {
    GenSpec spec;
    spec.model = parse_gen_model(o.gen_model);
    spec.vertices = o.vertices;
    spec.degree = o.degree;
    spec.shortcut_probability = o.p;
    spec.sigma = o.sigma;
    spec.seed = o.seed;
    Graph g = generate_graph(spec);
    Sink sink(o.out, out);
    write_graph(*sink, g);
    return kExitOk;
}

int cmd_gen_queries(const Options& o, std::ostream& out) {
    require(o.graph, "--graph");
    Graph g = read_graph_file(o.graph);
    QueryGenSpec spec;
    spec.size = o.size;
    spec.count = o.count;
    spec.seed = o.seed;
    spec.category = parse_query_category(o.category);
    std::vector<Graph> queries = generate_queries(g, spec);
    Sink sink(o.out, out);
    for (const Graph& q : queries) write_graph(*sink, q);
    return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out) {
    require(o.graph, "--graph");
    require(o.out, "--out");
    Graph g = read_graph_file(o.graph);
    TrainingReport report;
    GinModel model = train_model(g, o.dstar, train_config(o), label_config(o), shape_of(o), o.seed, &report, o.k);
    save_model(model, o.out);
    out << "training stars: " << report.training_set_size << "\n";
    for (std::size_t e = 0; e < report.epoch_loss.size(); ++e)
        out << "epoch " << e + 1 << " loss " << report.epoch_loss[e] << "\n";
    out << "model digest: " << std::hex << model.digest << std::dec << "\n";
    return kExitOk;
}

int cmd_build_index(const Options& o, std::ostream& out) {
    require(o.graph, "--graph");
    require(o.out, "--out");
    Graph g = read_graph_file(o.graph);
    Backend b = make_backend(o, g);
    BuildStats stats;
    AnchorIndexes idx = build_indexes(g, *b.keyer, o.dstar, o.k, &stats);
    save_indexes(idx, o.out);
    out << "iS keys: " << idx.star.size() << "\niS' keys: " << idx.star_prime.size()
        << "\niP keys: " << idx.path.size() << "\nstar insertions: " << stats.star_insertions
        << "\npath insertions: " << stats.path_insertions << "\n";
    return kExitOk;
}

int cmd_query(const Options& o, std::ostream& out) {
    require(o.graph, "--graph");
    require(o.index, "--index");
    require(o.queries, "--queries");
    Graph g = read_graph_file(o.graph);
    std::vector<Graph> queries = read_graphs_file(o.queries);
    AnchorIndexes idx = load_indexes(o.index);
    Backend b = make_backend(o, g);
    check_index_meta(idx, *b.keyer, g);
    const PlanConfig cfg = plan_config(o);
    Sink sink(o.out, out);
    for (std::size_t i = 0; i < queries.size(); ++i) {
        QueryResult r = query(queries[i], g, idx, *b.keyer, cfg, o.workers);
        *sink << "# query " << i << ": " << r.matches.size() << " matches\n";
        if (o.print_plan) *sink << format_plan(r.plan);
        for (const Binding& m : r.matches) *sink << format_match(m, r.plan) << "\n";
        *sink << "# timings_us plan=" << r.timings.plan_us << " embed=" << r.timings.embed_us
              << " candidates=" << r.timings.candidates_us << " growth=" << r.timings.growth_us
              << " total=" << r.timings.total_us() << "\n";
    }
    return kExitOk;
}

// Engine vs oracle on one instance.
bool exact_on(const Graph& q, const Graph& g, const AnchorIndexes& idx, const StarKeyer& keyer,
              const PlanConfig& cfg, std::size_t workers) {
    return query(q, g, idx, keyer, cfg, workers).matches == brute_force_matches(q, g);
}

int cmd_verify(const Options& o, std::ostream& out) {
    const PlanConfig cfg = plan_config(o);
    std::size_t exact = 0, total = 0;
    if (o.suite > 0) {
        for (const SuiteGraph& sg : generate_suite(o.suite, o.seed)) {
            Backend b;
            if (o.backend == "gin") {
                GinModel model;
                try {
                    model = train_model(sg.graph, sg.dstar, train_config(o), label_config(o), shape_of(o), o.seed);
                } catch (const Error& e) {
                    // Every edge is dense-dense, so no star key is ever looked up.
                    if (e.kind() != ErrorKind::Infeasible) throw;
                    model = GinModel::initialize(sg.graph.sigma_size(), shape_of(o), o.seed);
                }
                b.model = std::make_unique<GinModel>(std::move(model));
                b.keyer = StarKeyer::gin(*b.model);
            } else {
                b = make_backend(o, sg.graph);
            }
            AnchorIndexes idx = build_indexes(sg.graph, *b.keyer, sg.dstar, o.k);
            for (const Graph& q : sg.queries) {
                ++total;
                if (exact_on(q, sg.graph, idx, *b.keyer, cfg, o.workers))
                    ++exact;
                else
                    out << "mismatch: instance " << total - 1 << "\n";
            }
        }
    } else {
        require(o.graph, "--graph");
        require(o.queries, "--queries");
        Graph g = read_graph_file(o.graph);
        std::vector<Graph> queries = read_graphs_file(o.queries);
        Backend b = make_backend(o, g);
        AnchorIndexes idx = o.index.empty() ? build_indexes(g, *b.keyer, o.dstar, o.k) : load_indexes(o.index);
        check_index_meta(idx, *b.keyer, g);
        for (std::size_t i = 0; i < queries.size(); ++i) {
            ++total;
            if (exact_on(queries[i], g, idx, *b.keyer, cfg, o.workers))
                ++exact;
            else
                out << "mismatch: query " << i << "\n";
        }
    }
    out << exact << "/" << total << " exact\n";
    return exact == total ? kExitOk : kExitMismatch;
}

int cmd_stats(const Options& o, std::ostream& out) {
    require(o.graph, "--graph");
    Graph g = read_graph_file(o.graph);
    Backend b = make_backend(o, g);
    out << "vertices: " << g.vertex_count() << "\nedges: " << g.edge_count() << "\nsigma: " << g.sigma_size()
        << "\n";
    if (!o.index.empty()) {
        AnchorIndexes idx = load_indexes(o.index);
        check_index_meta(idx, *b.keyer, g);
        auto edges_in = [](const StarIndex& s) {
            std::size_t total = 0;
            for (const auto& [key, entries] : s)
                for (const IndexEntry& e : entries) total += e.edges.size();
            return total;
        };
        std::size_t path_edges = 0;
        for (const auto& [code, edges] : idx.path) path_edges += edges.size();
        const std::size_t sigma = g.sigma_size();
        out << "iS keys: " << idx.star.size() << " edge refs: " << edges_in(idx.star) << "\n"
            << "iS' keys: " << idx.star_prime.size() << " edge refs: " << edges_in(idx.star_prime) << "\n"
            << "iP keys: " << idx.path.size() << " edge refs: " << path_edges
            << " bound: " << sigma * sigma * sigma + sigma * sigma << "\n";
    }
    if (o.pairs > 0) {
        StarList stars = collect_training_stars(g, o.dstar, o.k);
        auto pairs = sample_star_pairs(stars, o.pairs, o.seed);
        ConflictStats c = conflict_ratio(*b.keyer, pairs);
        out << "conflicts: " << c.conflicts << "/" << c.non_isomorphic_pairs << " ratio: " << c.ratio() << "\n";
    }
    return kExitOk;
}

int cmd_bench(const Options& o, std::ostream& out) {
    require(o.graph, "--graph");
    require(o.queries, "--queries");
    Graph g = read_graph_file(o.graph);
    std::vector<Graph> queries = read_graphs_file(o.queries);
    Backend b = make_backend(o, g);
    AnchorIndexes idx = o.index.empty() ? build_indexes(g, *b.keyer, o.dstar, o.k) : load_indexes(o.index);
    check_index_meta(idx, *b.keyer, g);
    const PlanConfig cfg = plan_config(o);
    RunReport report;
    FilteringReport pooled;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        QueryResult r = query(queries[i], g, idx, *b.keyer, cfg, o.workers);
        QueryRecord rec = make_query_record(i, r);
        if (o.oracle) {
            FilteringReport f = filtering_power(queries[i], g, r, brute_force_matches(queries[i], g));
            rec.filtering = f.aggregate();
            pooled.merge(f);
        }
        report.add(rec);
    }
    if (o.oracle) report.filtering = pooled.aggregate();
    if (o.pairs > 0) {
        StarList stars = collect_training_stars(g, o.dstar, o.k);
        report.conflict_ratio = conflict_ratio(*b.keyer, sample_star_pairs(stars, o.pairs, o.seed)).ratio();
    }
    Sink sink(o.out, out);
    report.write(*sink);
    return kExitOk;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Io: return kExitIo;
        case ErrorKind::Parse:
        case ErrorKind::Format: return kExitParse;
        case ErrorKind::DigestMismatch: return kExitDigest;
        default: return kExitInvalid;
    }
}

}  // namespace

int run_commands(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Exact subgraph matching over anchored-star indexes"};
    app.require_subcommand(1);

    auto graph_opt = [&](CLI::App* c) { c->add_option("--graph", o.graph, "data graph file"); };
    auto out_opt = [&](CLI::App* c) { c->add_option("--out", o.out, "output file"); };
    auto backend_opts = [&](CLI::App* c) {
        c->add_option("--backend", o.backend, "gin | gin-untrained | wl")
            ->check(CLI::IsMember({"gin", "gin-untrained", "wl"}));
        c->add_option("--model", o.model, "trained model file (gin)");
        c->add_option("--d-star", o.dstar, "degree threshold d*");
        c->add_option("--k", o.k, "feature radius (only 1)");
        c->add_option("--m", o.m, "embedding width");
        c->add_option("--n", o.n, "hidden width");
        c->add_option("--seed", o.seed, "seed");
    };
    auto train_opts = [&](CLI::App* c) {
        c->add_option("--epochs", o.epochs);
        c->add_option("--lr", o.lr);
        c->add_option("--batch", o.batch);
        c->add_option("--xi", o.xi);
    };
    auto plan_opts = [&](CLI::App* c) {
        c->add_option("--plan", o.plan, "maxdeg | minlf | rand")->check(CLI::IsMember({"maxdeg", "minlf", "rand"}));
        c->add_option("--K", o.K, "start vertices to explore");
        c->add_option("--cost", o.cost, "deg | lf")->check(CLI::IsMember({"deg", "lf"}));
        c->add_option("--workers", o.workers, "growth worker threads");
        c->add_option("--queries", o.queries, "query graph file");
        c->add_option("--index", o.index, "index file");
    };

    auto* gen_graph = app.add_subcommand("gen-graph", "generate a synthetic data graph");
    gen_graph->add_option("--model", o.gen_model, "rg | ws | ba");
    gen_graph->add_option("--vertices", o.vertices);
    gen_graph->add_option("--degree", o.degree, "r (rg), ring k (ws) or m' (ba)");
    gen_graph->add_option("--p", o.p, "shortcut probability (ws)");
    gen_graph->add_option("--sigma", o.sigma);
    gen_graph->add_option("--seed", o.seed);
    out_opt(gen_graph);

    auto* gen_queries = app.add_subcommand("gen-queries", "random-walk query graphs");
    graph_opt(gen_queries);
    gen_queries->add_option("--size", o.size);
    gen_queries->add_option("--count", o.count);
    gen_queries->add_option("--category", o.category, "any | dense | sparse");
    gen_queries->add_option("--seed", o.seed);
    out_opt(gen_queries);

    auto* train = app.add_subcommand("train", "train the GIN embedding");
    graph_opt(train);
    backend_opts(train);
    train_opts(train);
    out_opt(train);

    auto* build = app.add_subcommand("build-index", "build and save the anchor indexes");
    graph_opt(build);
    backend_opts(build);
    out_opt(build);

    auto* query_cmd = app.add_subcommand("query", "match query graphs");
    graph_opt(query_cmd);
    backend_opts(query_cmd);
    plan_opts(query_cmd);
    query_cmd->add_flag("--print-plan", o.print_plan);
    out_opt(query_cmd);

    auto* verify = app.add_subcommand("verify", "compare the engine with the brute-force oracle");
    graph_opt(verify);
    backend_opts(verify);
    train_opts(verify);
    plan_opts(verify);
    verify->add_option("--suite", o.suite, "generate this many seeded instances instead of reading files");

    auto* stats = app.add_subcommand("stats", "index sizes and embedding conflicts");
    graph_opt(stats);
    backend_opts(stats);
    stats->add_option("--index", o.index);
    stats->add_option("--pairs", o.pairs, "sampled star pairs for the conflict ratio");

    auto* bench = app.add_subcommand("bench", "per-query run report");
    graph_opt(bench);
    backend_opts(bench);
    plan_opts(bench);
    bench->add_flag("--oracle", o.oracle, "measure filtering power against the oracle");
    bench->add_option("--pairs", o.pairs);
    out_opt(bench);

    std::vector<std::string> rev(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(rev.begin(), rev.end());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*gen_graph) return cmd_gen_graph(o, out);
        if (*gen_queries) return cmd_gen_queries(o, out);
        if (*train) return cmd_train(o, out);
        if (*build) return cmd_build_index(o, out);
        if (*query_cmd) return cmd_query(o, out);
        if (*verify) return cmd_verify(o, out);
        if (*stats) return cmd_stats(o, out);
        if (*bench) return cmd_bench(o, out);
    } catch (const ParseError& e) {
        err << "parse error at line " << e.line() << ": " << e.what() << "\n";
        return kExitParse;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::bad_alloc&) {
        err << "error: out of memory\n";
        return kExitInvalid;
    }
    return kExitUsage;
}

}  // namespace anchormatch
