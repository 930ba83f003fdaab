#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "anchormatch/embedding.hpp"
#include "anchormatch/rng.hpp"
#include "anchormatch/workbench.hpp"
#include "gradcheck.hpp"

using namespace anchormatch;

namespace {

GinModel small_model(std::size_t sigma = 5, std::uint64_t seed = 4) {
    GinShape shape;
    shape.layers = 2;
    shape.n = 6;
    shape.m = 3;
    return GinModel::initialize(sigma, shape, seed);
}

// Plain GIN over an explicit adjacency list, no canonical ordering.
std::vector<double> reference_forward(const GinModel& model, const FeatureTable& f, Label c, Label a,
                                      const std::vector<Label>& leaves) {
    const std::size_t n = model.n;
    std::vector<Label> labels{c, a};
    labels.insert(labels.end(), leaves.begin(), leaves.end());
    const std::size_t V = labels.size();
    std::vector<std::vector<std::size_t>> adj(V);
    for (std::size_t v = 1; v < V; ++v) {
        adj[0].push_back(v);
        adj[v].push_back(0);
    }
    std::vector<std::vector<double>> h(V);
    for (std::size_t v = 0; v < V; ++v) {
        auto row = f.row(labels[v]);
        h[v].assign(row.begin(), row.end());
    }
    for (const GinLayer& layer : model.layers) {
        std::vector<std::vector<double>> next(V, std::vector<double>(n));
        for (std::size_t v = 0; v < V; ++v) {
            std::vector<double> z(n);
            for (std::size_t i = 0; i < n; ++i) {
                z[i] = (1 + layer.epsilon) * h[v][i];
                for (std::size_t u : adj[v]) z[i] += h[u][i];
            }
            for (std::size_t i = 0; i < n; ++i) {
                double acc = layer.bias[i];
                for (std::size_t j = 0; j < n; ++j) acc += layer.weight[i * n + j] * z[j];
                next[v][i] = std::max(acc, 0.0);
            }
        }
        h = std::move(next);
    }
    std::vector<double> pooled(n, 0.0);
    for (const auto& row : h)
        for (std::size_t i = 0; i < n; ++i) pooled[i] += row[i];
    std::vector<double> out(model.m, 0.0);
    for (std::size_t i = 0; i < model.m; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i] += model.readout_weight[i * n + j] * pooled[j];
    return out;
}

}  // namespace

TEST(Features, DeterministicAndPrefixStable) {
    auto a = init_label_features(10, 8, 3);
    auto b = init_label_features(10, 8, 3);
    auto c = init_label_features(20, 8, 3);
    EXPECT_EQ(a.values, b.values);
    EXPECT_TRUE(std::equal(a.values.begin(), a.values.end(), c.values.begin()));
    EXPECT_NE(a.values, init_label_features(10, 8, 4).values);
    for (double x : c.values) {
        EXPECT_GE(x, -1.0);
        EXPECT_LT(x, 1.0);
    }
}

TEST(Gin, InitializationIsSeeded) {
    GinModel a = small_model(5, 4), b = small_model(5, 4), c = small_model(5, 5);
    EXPECT_EQ(flatten_parameters(a), flatten_parameters(b));
    EXPECT_EQ(a.digest, b.digest);
    EXPECT_NE(a.digest, c.digest);
    const double bound = 1.0 / std::sqrt(6.0);
    for (double w : a.layers[0].weight) EXPECT_LE(std::fabs(w), bound);
    for (double x : a.layers[1].bias) EXPECT_EQ(x, 0.0);
    EXPECT_EQ(a.parameter_count(), flatten_parameters(a).size());
}

TEST(Gin, ExactDyadicOracle) {
    GinModel model;
    model.n = 2;
    model.m = 2;
    model.sigma = 3;
    GinLayer layer;
    layer.epsilon = 0.5;
    layer.weight = {0.5, -0.25, 1.0, 0.125};
    layer.bias = {0.25, -1.0};
    model.layers = {layer};
    model.readout_weight = {1.0, 2.0, -0.5, 0.75};
    FeatureTable f;
    f.n = 2;
    f.values = {1.0, 0.5, -0.5, 2.0, 0.25, -1.0};

    std::vector<std::vector<Label>> leaf_sets{{}, {0}, {2, 1}, {1, 1, 0}, {2, 2, 2, 0}};
    for (Label c = 0; c < 3; ++c)
        for (Label a = 0; a < 3; ++a)
            for (const auto& leaves : leaf_sets) {
                auto got = gin_forward(model, f, StarView(c, a, leaves));
                EXPECT_EQ(got, reference_forward(model, f, c, a, leaves));
            }
    // hand-computed: center A, anchor B, no leaves
    // h0 = (1, .5), (-.5, 2); z_c = 1.5*(1,.5) + (-.5,2) = (1, 2.75); z_a = 1.5*(-.5,2) + (1,.5) = (.25, 3.5)
    // pre_c = (.5 - .6875 + .25, 1 + .34375 - 1) = (.0625, .34375)
    // pre_a = (.125 - .875 + .25, .25 + .4375 - 1) = (-.5, -.3125) -> 0
    // o = (.0625 + .6875, -.03125 + .2578125)
    auto o = gin_forward(model, f, StarView(0, 1, {}));
    EXPECT_EQ(o, (std::vector<double>{0.75, 0.2265625}));
}

TEST(Gin, MatchesReferenceOnInitializedModel) {
    GinModel model = small_model();
    Rng rng(1);
    for (int t = 0; t < 50; ++t) {
        std::vector<Label> leaves(rng.below(6));
        for (Label& l : leaves) l = static_cast<Label>(rng.below(5));
        auto got = gin_forward(model, StarView(1, 2, leaves));
        auto want = reference_forward(model, model.features, 1, 2, leaves);
        for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
    }
}

TEST(Gin, LeafOrderInvariantBitForBit) {
    GinModel model = small_model(7);
    Rng rng(2);
    for (int t = 0; t < 100; ++t) {
        std::vector<Label> leaves(1 + rng.below(8));
        for (Label& l : leaves) l = static_cast<Label>(rng.below(7));
        auto base = gin_forward(model, StarView(3, 1, leaves));
        for (int p = 0; p < 5; ++p) {
            rng.shuffle(std::span<Label>(leaves));
            EXPECT_EQ(gin_forward(model, StarView(3, 1, leaves)), base);
        }
    }
}

TEST(Gin, ZeroReadoutGivesZero) {
    GinModel model = small_model();
    std::fill(model.readout_weight.begin(), model.readout_weight.end(), 0.0);
    std::vector<Label> leaves{0, 1, 4};
    for (double x : gin_forward(model, StarView(2, 3, leaves))) EXPECT_EQ(x, 0.0);
}

TEST(Gin, RejectsUnknownLabels) {
    GinModel model = small_model(5);
    std::vector<Label> leaves{9};
    EXPECT_THROW(gin_forward(model, StarView(0, 1, leaves)), Error);
    EXPECT_FALSE(StarKeyer::gin(model).key(StarView(0, 1, leaves)).has_value());
}

TEST(Keys, RoundingAndTags) {
    GinModel model = small_model();
    std::vector<double> v{0.5980004, -0.25, 1.2345678, -0.0000026};
    auto key = embedding_key(v, model);
    EXPECT_EQ(key.components, (std::vector<std::int64_t>{598000, -250000, 1234568, -3}));
    EXPECT_EQ(key.backend, BackendTag::Gin);
    EXPECT_EQ(key.model_digest, model.digest);
    std::vector<double> bad{std::nan("")};
    EXPECT_THROW(embedding_key(bad, model), Error);
    std::vector<double> huge{1e14};
    EXPECT_THROW(embedding_key(huge, model), Error);
}

TEST(Keys, WlExhaustiveSmallAlphabet) {
    // Every star shape with sigma=3 and up to 4 leaves: keys equal iff the
    // canonical triples are equal.
    std::vector<std::tuple<Label, Label, std::vector<Label>>> shapes;
    for (Label c = 0; c < 3; ++c)
        for (Label a = 0; a < 3; ++a)
            for (std::size_t d = 0; d <= 4; ++d) {
                std::vector<Label> leaves(d, 0);
                while (true) {
                    shapes.emplace_back(c, a, leaves);
                    std::size_t i = d;
                    while (i > 0 && leaves[i - 1] == 2) --i;
                    if (i == 0) break;
                    ++leaves[i - 1];
                    for (std::size_t j = i; j < d; ++j) leaves[j] = leaves[i - 1];
                }
            }
    std::set<std::vector<std::int64_t>> keys;
    for (auto& [c, a, leaves] : shapes) keys.insert(wl_hash_key(StarView(c, a, leaves)).components);
    EXPECT_EQ(keys.size(), shapes.size());
    std::vector<Label> one{2, 0, 1}, two{1, 2, 0};
    EXPECT_EQ(wl_hash_key(StarView(0, 1, one)), wl_hash_key(StarView(0, 1, two)));
    EXPECT_NE(wl_hash_key(StarView(0, 1, one)), wl_hash_key(StarView(1, 0, one)));
}

TEST(LabelGrid, AxisCount) {
    EXPECT_EQ(grid_axis_count(8, 3), 2u);
    EXPECT_EQ(grid_axis_count(9, 3), 3u);
    EXPECT_EQ(grid_axis_count(1, 3), 1u);
    EXPECT_EQ(grid_axis_count(1000, 3), 10u);
    EXPECT_EQ(grid_axis_count(1001, 3), 11u);
}

TEST(LabelGrid, DistinctAndSpaced) {
    auto grid = assign_training_labels(8, 3, 1.0, 0.0, std::nullopt, 3);
    ASSERT_EQ(grid.size(), 8u);
    std::set<std::vector<double>> pts;
    for (std::size_t i = 0; i < 8; ++i) {
        auto p = grid.at(i);
        for (double x : p) EXPECT_TRUE(x == 0.0 || x == 1.0);
        pts.emplace(p.begin(), p.end());
    }
    EXPECT_EQ(pts.size(), 8u);

    auto wide = assign_training_labels(50, 2, 0.5, -1.0, 10.0, 9);
    for (std::size_t i = 0; i < wide.size(); ++i)
        for (std::size_t j = i + 1; j < wide.size(); ++j) {
            double d = 0;
            for (std::size_t c = 0; c < 2; ++c) d += std::pow(wide.at(i)[c] - wide.at(j)[c], 2);
            EXPECT_GE(std::sqrt(d), 0.5);
        }
    EXPECT_THROW(assign_training_labels(100, 2, 1.0, 0.0, 3.0, 1), Error);
}

TEST(Loss, MatchesDoubleLoop) {
    GinModel model = small_model();
    Rng rng(8);
    auto b = gradcheck::random_batch(rng, 7, 5, 3);
    double want = 0;
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = i + 1; j < 7; ++j) {
            auto oi = gin_forward(model, b.stars[i]);
            auto oj = gin_forward(model, b.stars[j]);
            double lg = 0, og = 0;
            for (std::size_t c = 0; c < 3; ++c) {
                lg += std::pow(b.labels[i][c] - b.labels[j][c], 2);
                og += std::pow(oi[c] - oj[c], 2);
            }
            want += std::max(0.0, std::sqrt(lg) - std::sqrt(og));
        }
    EXPECT_NEAR(compute_loss(model, b.stars, b.labels), want, 1e-12);
}

TEST(Loss, GridOverloadAgrees) {
    GinModel model = small_model();
    auto grid = assign_training_labels(4, 3, 1.0, 0.0, std::nullopt, 2);
    std::vector<Label> l0{}, l1{1}, l2{2, 3}, l3{4, 4, 0};
    std::vector<StarView> stars{{0, 1, l0}, {0, 1, l1}, {2, 1, l2}, {3, 3, l3}};
    std::vector<std::size_t> index{3, 0, 2, 1};
    std::vector<std::vector<double>> labels;
    for (std::size_t i : index) labels.emplace_back(grid.at(i).begin(), grid.at(i).end());
    EXPECT_DOUBLE_EQ(compute_loss(model, stars, grid, index), compute_loss(model, stars, labels));
}

TEST(Gradient, FiniteDifferences) {
    Rng rng(11);
    for (int t = 0; t < 5; ++t) {
        GinModel model = small_model(5, 20 + t);
        gradcheck::randomize_biases(model, rng);
        auto b = gradcheck::random_batch(rng, 2 + rng.below(5), 5, 3);
        EXPECT_LT(gradcheck::max_relative_error(model, b), 1e-4);
    }
}

TEST(Parameters, FlattenAssignRoundTrip) {
    GinModel model = small_model();
    auto p = flatten_parameters(model);
    for (double& x : p) x *= 0.5;
    std::uint64_t before = model.digest;
    assign_parameters(model, p);
    EXPECT_EQ(flatten_parameters(model), p);
    EXPECT_NE(model.digest, before);
    EXPECT_EQ(model.digest, model.compute_digest());
    p.pop_back();
    EXPECT_THROW(assign_parameters(model, p), Error);
}

TEST(Adam, MovesAgainstGradient) {
    AdamOptimizer opt(2, 0.1);
    std::vector<double> p{1.0, -1.0}, g{2.0, -3.0};
    opt.step(p, g);
    EXPECT_NEAR(p[0], 0.9, 1e-6);
    EXPECT_NEAR(p[1], -0.9, 1e-6);
}

namespace {

Graph training_graph() {
    GenSpec spec;
    spec.model = GenModel::SmallWorld;
    spec.vertices = 60;
    spec.degree = 4;
    spec.sigma = 6;
    spec.seed = 2;
    return generate_graph(spec);
}

}  // namespace

TEST(Training, StarSetSelection) {
    // hub of degree 12: its spokes are trained from the leaf side
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (VertexId v = 1; v <= 12; ++v) edges.emplace_back(0, v);
    Graph g(std::vector<Label>(13, 0), edges);
    // each edge has two normalized orientations; from-side hub gets skipped
    // in favour of the leaf center, which has one star
    EXPECT_EQ(collect_training_stars(g, 4).size(), 24u);
    // with d* large both orientations center where normalized
    EXPECT_EQ(collect_training_stars(g, 20).size(), 12u * (1u << 11) + 12u);
    Graph k10 = [] {
        std::vector<std::pair<VertexId, VertexId>> e;
        for (VertexId u = 0; u < 10; ++u)
            for (VertexId v = u + 1; v < 10; ++v) e.emplace_back(u, v);
        return Graph(std::vector<Label>(10, 0), e);
    }();
    EXPECT_EQ(collect_training_stars(k10, 3).size(), 0u);
}

TEST(Training, DeterministicAndLowersLoss) {
    Graph g = training_graph();
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.batch_size = 64;
    cfg.learning_rate = 0.01;
    TrainingReport r1, r2;
    GinModel a = train_model(g, 10, cfg, {}, {}, 1, &r1);
    GinModel b = train_model(g, 10, cfg, {}, {}, 1, &r2);
    EXPECT_EQ(a.digest, b.digest);
    EXPECT_EQ(r1.epoch_loss, r2.epoch_loss);
    ASSERT_EQ(r1.epoch_loss.size(), 5u);
    EXPECT_LT(r1.epoch_loss.back(), r1.epoch_loss.front());
    EXPECT_EQ(r1.training_set_size, collect_training_stars(g, 10).size());
}

TEST(Training, EmptyTrainingSetIsInfeasible) {
    std::vector<std::pair<VertexId, VertexId>> e;
    for (VertexId u = 0; u < 6; ++u)
        for (VertexId v = u + 1; v < 6; ++v) e.emplace_back(u, v);
    Graph k6(std::vector<Label>(6, 0), e);
    try {
        train_model(k6, 2, {}, {});
        FAIL();
    } catch (const Error& err) {
        EXPECT_EQ(err.kind(), ErrorKind::Infeasible);
    }
}

TEST(Conflicts, WlIsConflictFree) {
    Graph g = training_graph();
    StarList stars = collect_training_stars(g, 10);
    auto pairs = sample_star_pairs(stars, 5000, 1);
    EXPECT_FALSE(pairs.empty());
    auto stats = conflict_ratio(StarKeyer::wl(), pairs);
    EXPECT_EQ(stats.conflicts, 0u);
    EXPECT_EQ(stats.non_isomorphic_pairs, pairs.size());
}

TEST(Serialization, RoundTripAndTamper) {
    GinModel model = small_model();
    std::string bytes = serialize_model(model);
    GinModel back = deserialize_model(bytes);
    EXPECT_EQ(serialize_model(back), bytes);
    EXPECT_EQ(back.digest, model.digest);
    EXPECT_EQ(back.features.values, model.features.values);

    std::string flipped = bytes;
    flipped[flipped.size() / 2] ^= 0x10;
    try {
        deserialize_model(flipped);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DigestMismatch);
    }
    std::string magic = bytes;
    magic[0] = 'X';
    try {
        deserialize_model(magic);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Format);
    }
    EXPECT_THROW(deserialize_model(bytes + "x"), Error);
    EXPECT_THROW(deserialize_model(bytes.substr(0, bytes.size() - 3)), Error);
}
