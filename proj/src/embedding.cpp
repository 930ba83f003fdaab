#include "anchormatch/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string_view>

#include "anchormatch/binary_io.hpp"
#include "anchormatch/errors.hpp"
#include "anchormatch/rng.hpp"

namespace anchormatch {

const char* to_string(BackendTag tag) {
    switch (tag) {
        case BackendTag::Gin: return "gin";
        case BackendTag::Wl: return "wl";
    }
    return "?";
}

FeatureTable init_label_features(std::size_t sigma_size, std::size_t n, std::uint64_t seed) {
    FeatureTable table;
    table.n = n;
    table.values.resize(sigma_size * n);
    for (std::size_t l = 0; l < sigma_size; ++l) {
        const std::uint64_t row_seed = splitmix64(seed ^ splitmix64(0x51ab1e5ULL + l));
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t bits = splitmix64(row_seed + i);
            table.values[l * n + i] = static_cast<double>(bits >> 11) * 0x1.0p-52 - 1.0;
        }
    }
    return table;
}

GinModel GinModel::initialize(std::size_t sigma, const GinShape& shape, std::uint64_t seed) {
    if (shape.layers == 0 || shape.n == 0 || shape.m == 0)
        throw Error(ErrorKind::InvalidArgument, "GIN dimensions must be positive");
    GinModel model;
    model.n = shape.n;
    model.m = shape.m;
    model.sigma = sigma;
    model.seed = seed;
    model.feature_seed = splitmix64(seed ^ 0xfea7ULL);
    Rng rng(seed);
    const double bound = 1.0 / std::sqrt(static_cast<double>(shape.n));
    for (std::size_t t = 0; t < shape.layers; ++t) {
        GinLayer layer;
        layer.epsilon = shape.epsilon;
        layer.weight.resize(shape.n * shape.n);
        for (double& w : layer.weight) w = rng.uniform(-bound, bound);
        layer.bias.assign(shape.n, 0.0);
        model.layers.push_back(std::move(layer));
    }
    model.readout_weight.resize(shape.m * shape.n);
    for (double& w : model.readout_weight) w = rng.uniform(-bound, bound);
    model.features = init_label_features(sigma, shape.n, model.feature_seed);
    model.update_digest();
    return model;
}

std::uint64_t GinModel::compute_digest() const {
    Fnv1a h;
    h.update_u64(layers.size());
    h.update_u64(n);
    h.update_u64(m);
    h.update_u64(sigma);
    h.update_u64(feature_seed);
    h.update_u64(seed);
    for (const GinLayer& layer : layers) {
        h.update_f64(layer.epsilon);
        for (double w : layer.weight) h.update_f64(w);
        for (double b : layer.bias) h.update_f64(b);
    }
    for (double w : readout_weight) h.update_f64(w);
    return h.value();
}

void GinModel::validate() const {
    auto fail = [](const char* what) { throw Error(ErrorKind::InvalidArgument, what); };
    if (n == 0 || m == 0 || layers.empty()) fail("GIN model has empty dimensions");
    for (const GinLayer& layer : layers) {
        if (layer.weight.size() != n * n || layer.bias.size() != n) fail("GIN layer shape mismatch");
        if (!std::isfinite(layer.epsilon)) fail("non-finite epsilon");
        for (double w : layer.weight)
            if (!std::isfinite(w)) fail("non-finite layer weight");
        for (double b : layer.bias)
            if (!std::isfinite(b)) fail("non-finite layer bias");
    }
    if (readout_weight.size() != m * n) fail("readout weight shape mismatch");
    for (double w : readout_weight)
        if (!std::isfinite(w)) fail("non-finite readout weight");
}

namespace {

// Activations of one forward pass over a star. Vertex 0 is the center,
// vertex 1 the anchor, the rest are leaves; every non-center vertex is
// adjacent to the center only.
struct ForwardTrace {
    std::size_t vertices = 0;
    std::vector<std::vector<double>> hidden;  // layers + 1 entries, vertices * n each
    std::vector<std::vector<double>> z;       // layers entries
    std::vector<std::vector<double>> pre;     // layers entries
    std::vector<double> pooled;
    std::vector<double> output;
};

bool row_less(const double* a, const double* b, std::size_t n) {
    return std::lexicographical_compare(a, a + n, b, b + n);
}

// Sums rows in lexicographic order of their values into `out`.
void canonical_sum(std::vector<const double*>& rows, std::size_t n, double* out) {
    std::sort(rows.begin(), rows.end(), [n](const double* a, const double* b) { return row_less(a, b, n); });
    std::fill(out, out + n, 0.0);
    for (const double* r : rows)
        for (std::size_t i = 0; i < n; ++i) out[i] += r[i];
}

void forward(const GinModel& model, const FeatureTable& features, StarView star, ForwardTrace& trace) {
    const std::size_t n = model.n;
    if (features.n != n) throw Error(ErrorKind::InvalidArgument, "feature table width does not match model");
    const std::size_t rows = features.rows();
    auto check = [&](Label l) {
        if (l >= rows)
            throw Error(ErrorKind::InvalidArgument,
                        "label " + std::to_string(l) + " is outside the feature table");
    };
    check(star.center_label);
    check(star.anchor_label);
    for (Label l : star.leaf_labels) check(l);

    const std::size_t V = 2 + star.leaf_labels.size();
    trace.vertices = V;
    const std::size_t T = model.layers.size();
    trace.hidden.resize(T + 1);
    trace.z.resize(T);
    trace.pre.resize(T);

    std::vector<double>& h0 = trace.hidden[0];
    h0.resize(V * n);
    auto put = [&](std::size_t v, Label l) {
        auto row = features.row(l);
        std::copy(row.begin(), row.end(), h0.begin() + static_cast<std::ptrdiff_t>(v * n));
    };
    put(0, star.center_label);
    put(1, star.anchor_label);
    for (std::size_t i = 0; i < star.leaf_labels.size(); ++i) put(2 + i, star.leaf_labels[i]);

    std::vector<const double*> addends;
    std::vector<double> center_agg(n);
    for (std::size_t t = 0; t < T; ++t) {
        const GinLayer& layer = model.layers[t];
        const std::vector<double>& h = trace.hidden[t];
        addends.clear();
        for (std::size_t v = 1; v < V; ++v) addends.push_back(h.data() + v * n);
        canonical_sum(addends, n, center_agg.data());

        std::vector<double>& z = trace.z[t];
        std::vector<double>& pre = trace.pre[t];
        std::vector<double>& next = trace.hidden[t + 1];
        z.resize(V * n);
        pre.resize(V * n);
        next.resize(V * n);
        const double self_scale = 1.0 + layer.epsilon;
        for (std::size_t v = 0; v < V; ++v) {
            const double* agg = v == 0 ? center_agg.data() : h.data();  // leaves see only the center
            for (std::size_t i = 0; i < n; ++i) z[v * n + i] = self_scale * h[v * n + i] + agg[i];
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < n; ++j) acc += layer.weight[i * n + j] * z[v * n + j];
                acc += layer.bias[i];
                pre[v * n + i] = acc;
                next[v * n + i] = acc > 0.0 ? acc : 0.0;
            }
        }
    }

    const std::vector<double>& last = trace.hidden[T];
    addends.clear();
    for (std::size_t v = 0; v < V; ++v) addends.push_back(last.data() + v * n);
    trace.pooled.resize(n);
    canonical_sum(addends, n, trace.pooled.data());

    trace.output.resize(model.m);
    for (std::size_t i = 0; i < model.m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += model.readout_weight[i * n + j] * trace.pooled[j];
        trace.output[i] = acc;
    }
}

// Accumulates d(output . dout)/d(params) into grad (flatten_parameters layout).
void backward(const GinModel& model, const ForwardTrace& trace, std::span<const double> dout,
              std::span<double> grad) {
    const std::size_t n = model.n;
    const std::size_t V = trace.vertices;
    const std::size_t T = model.layers.size();
    const std::size_t readout_offset = T * (n * n + n);

    std::vector<double> dpooled(n, 0.0);
    for (std::size_t i = 0; i < model.m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            grad[readout_offset + i * n + j] += dout[i] * trace.pooled[j];
            dpooled[j] += model.readout_weight[i * n + j] * dout[i];
        }
    }

    std::vector<double> dh(V * n);
    for (std::size_t v = 0; v < V; ++v) std::copy(dpooled.begin(), dpooled.end(), dh.begin() + static_cast<std::ptrdiff_t>(v * n));

    std::vector<double> dpre(V * n), dz(V * n);
    for (std::size_t t = T; t-- > 0;) {
        const GinLayer& layer = model.layers[t];
        const std::size_t w_offset = t * (n * n + n);
        const std::size_t b_offset = w_offset + n * n;
        const std::vector<double>& pre = trace.pre[t];
        const std::vector<double>& z = trace.z[t];
        for (std::size_t k = 0; k < V * n; ++k) dpre[k] = pre[k] > 0.0 ? dh[k] : 0.0;
        std::fill(dz.begin(), dz.end(), 0.0);
        for (std::size_t v = 0; v < V; ++v) {
            for (std::size_t i = 0; i < n; ++i) {
                const double g = dpre[v * n + i];
                if (g == 0.0) continue;
                grad[b_offset + i] += g;
                for (std::size_t j = 0; j < n; ++j) {
                    grad[w_offset + i * n + j] += g * z[v * n + j];
                    dz[v * n + j] += layer.weight[i * n + j] * g;
                }
            }
        }
        if (t == 0) break;  // inputs are fixed label features
        const double self_scale = 1.0 + layer.epsilon;
        for (std::size_t i = 0; i < n; ++i) {
            double center = self_scale * dz[i];
            for (std::size_t v = 1; v < V; ++v) {
                center += dz[v * n + i];
                dh[v * n + i] = self_scale * dz[v * n + i] + dz[i];
            }
            dh[i] = center;
        }
    }
}

double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// Pairwise hinge loss over outputs; optionally fills d(loss)/d(output_i).
double pair_loss(std::span<const std::vector<double>> outputs, std::span<const std::span<const double>> labels,
                 std::vector<std::vector<double>>* doutputs) {
    double loss = 0.0;
    const std::size_t B = outputs.size();
    const std::size_t m = B == 0 ? 0 : outputs[0].size();
    for (std::size_t i = 0; i < B; ++i) {
        for (std::size_t j = i + 1; j < B; ++j) {
            const double label_gap = distance(labels[i], labels[j]);
            const double out_gap = distance(outputs[i], outputs[j]);
            const double term = label_gap - out_gap;
            if (term <= 0.0) continue;
            loss += term;
            if (doutputs && out_gap > 0.0) {
                for (std::size_t c = 0; c < m; ++c) {
                    const double g = (outputs[i][c] - outputs[j][c]) / out_gap;
                    (*doutputs)[i][c] -= g;
                    (*doutputs)[j][c] += g;
                }
            }
        }
    }
    return loss;
}

}  // namespace

EmbeddingVector gin_forward(const GinModel& model, const FeatureTable& features, StarView star) {
    ForwardTrace trace;
    forward(model, features, star, trace);
    return trace.output;
}

EmbeddingVector gin_forward(const GinModel& model, StarView star) {
    return gin_forward(model, model.features, star);
}

EmbeddingKey embedding_key(std::span<const double> vec, const GinModel& model) {
    EmbeddingKey key;
    key.backend = BackendTag::Gin;
    key.model_digest = model.digest;
    key.components.reserve(vec.size());
    for (double o : vec) {
        const double scaled = o * kKeyScale;
        if (!std::isfinite(scaled) || std::fabs(scaled) > 9.0e18)
            throw Error(ErrorKind::InvalidArgument, "embedding component is not finite or out of key range");
        key.components.push_back(std::llround(scaled));
    }
    return key;
}

EmbeddingKey wl_hash_key(StarView star) {
    std::vector<Label> leaves(star.leaf_labels.begin(), star.leaf_labels.end());
    std::sort(leaves.begin(), leaves.end());
    Fnv1a h;
    std::uint64_t chain = 0x243f6a8885a308d3ULL;
    auto feed = [&](std::uint64_t x) {
        h.update_u64(x);
        chain = splitmix64(chain ^ x);
    };
    feed(star.center_label);
    feed(star.anchor_label);
    feed(leaves.size());
    for (Label l : leaves) feed(l);
    EmbeddingKey key;
    key.backend = BackendTag::Wl;
    key.model_digest = 0;
    key.components = {static_cast<std::int64_t>(h.value()), static_cast<std::int64_t>(chain)};
    return key;
}

std::optional<EmbeddingKey> StarKeyer::key(StarView star) const {
    if (!model_) return wl_hash_key(star);
    const std::size_t rows = model_->features.rows();
    if (star.center_label >= rows || star.anchor_label >= rows) return std::nullopt;
    for (Label l : star.leaf_labels)
        if (l >= rows) return std::nullopt;
    return embedding_key(gin_forward(*model_, star), *model_);
}

std::size_t grid_axis_count(std::size_t count, std::size_t m) {
    if (count <= 1) return 1;
    auto covers = [&](std::size_t g) {
        std::size_t total = 1;
        for (std::size_t i = 0; i < m; ++i) {
            if (total >= count) return true;
            total *= g;
        }
        return total >= count;
    };
    std::size_t g = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(count), 1.0 / static_cast<double>(m))));
    if (g < 1) g = 1;
    while (g > 1 && covers(g - 1)) --g;
    while (!covers(g)) ++g;
    return g;
}

LabelGrid assign_training_labels(std::size_t count, std::size_t m, double xi, double lo,
                                 std::optional<double> hi, std::uint64_t seed) {
    if (count == 0) throw Error(ErrorKind::InvalidArgument, "label grid needs at least one point");
    if (m < 1) throw Error(ErrorKind::InvalidArgument, "label dimension must be positive");
    if (!(xi > 0.0)) throw Error(ErrorKind::InvalidArgument, "label spacing xi must be positive");
    const std::size_t g = grid_axis_count(count, m);
    const double span_needed = static_cast<double>(g - 1) * xi;
    const double upper = hi.value_or(lo + span_needed);
    // Relative slack absorbs rounding in caller-computed ranges.
    if (upper - lo < span_needed * (1.0 - 1e-12))
        throw Error(ErrorKind::Infeasible, "label range [" + std::to_string(lo) + ", " + std::to_string(upper) +
                                               "] cannot hold " + std::to_string(g) + " values spaced " +
                                               std::to_string(xi) + " apart");
    std::vector<double> axis(g);
    const double step = g > 1 ? std::max(xi, (upper - lo) / static_cast<double>(g - 1)) : 0.0;
    for (std::size_t i = 0; i < g; ++i) axis[i] = lo + static_cast<double>(i) * step;

    std::vector<std::size_t> slot(count);
    std::iota(slot.begin(), slot.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(slot));

    LabelGrid grid;
    grid.m = m;
    grid.xi = xi;
    grid.lo = lo;
    grid.hi = upper;
    grid.values.resize(count * m);
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t idx = slot[i];  // mixed-radix digits, last dimension fastest
        for (std::size_t d = m; d-- > 0;) {
            grid.values[i * m + d] = axis[idx % g];
            idx /= g;
        }
    }
    return grid;
}

void StarList::add(StarView s) {
    centers_.push_back(s.center_label);
    anchors_.push_back(s.anchor_label);
    leaves_.insert(leaves_.end(), s.leaf_labels.begin(), s.leaf_labels.end());
    offsets_.push_back(static_cast<std::uint32_t>(leaves_.size()));
}

StarList collect_training_stars(const Graph& g, std::size_t dstar, int k) {
    require_radius_one(k);
    StarList stars;
    for (OrientedEdge e : normalized_edges(g)) {
        OrientedEdge centered;
        if (g.degree(e.from) <= dstar) {
            centered = e;
        } else if (g.degree(e.to) <= dstar) {
            centered = {e.to, e.from};
        } else {
            continue;
        }
        for_each_anchored_star(g, centered, [&](const AnchoredStar& s) { stars.add(s); });
    }
    return stars;
}

double compute_loss(const GinModel& model, std::span<const StarView> stars,
                    std::span<const std::vector<double>> labels) {
    if (stars.size() != labels.size()) throw Error(ErrorKind::InvalidArgument, "stars and labels differ in length");
    std::vector<std::vector<double>> outputs;
    outputs.reserve(stars.size());
    for (StarView s : stars) outputs.push_back(gin_forward(model, s));
    std::vector<std::span<const double>> label_views(labels.begin(), labels.end());
    return pair_loss(outputs, label_views, nullptr);
}

double compute_loss(const GinModel& model, std::span<const StarView> stars, const LabelGrid& labels,
                    std::span<const std::size_t> label_index) {
    std::vector<std::vector<double>> outputs;
    std::vector<std::span<const double>> label_views;
    for (std::size_t i = 0; i < stars.size(); ++i) {
        outputs.push_back(gin_forward(model, stars[i]));
        label_views.push_back(labels.at(label_index[i]));
    }
    return pair_loss(outputs, label_views, nullptr);
}

std::vector<double> flatten_parameters(const GinModel& model) {
    std::vector<double> out;
    out.reserve(model.parameter_count());
    for (const GinLayer& layer : model.layers) {
        out.insert(out.end(), layer.weight.begin(), layer.weight.end());
        out.insert(out.end(), layer.bias.begin(), layer.bias.end());
    }
    out.insert(out.end(), model.readout_weight.begin(), model.readout_weight.end());
    return out;
}

void assign_parameters(GinModel& model, std::span<const double> params) {
    if (params.size() != model.parameter_count())
        throw Error(ErrorKind::InvalidArgument, "parameter vector has the wrong size");
    std::size_t pos = 0;
    for (GinLayer& layer : model.layers) {
        std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(pos), layer.weight.size(), layer.weight.begin());
        pos += layer.weight.size();
        std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(pos), layer.bias.size(), layer.bias.begin());
        pos += layer.bias.size();
    }
    std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(pos), model.readout_weight.size(),
                model.readout_weight.begin());
    model.update_digest();
}

namespace {

double batch_gradient(const GinModel& model, std::span<const StarView> stars,
                      std::span<const std::span<const double>> labels, std::vector<ForwardTrace>& traces,
                      std::span<double> grad) {
    const std::size_t B = stars.size();
    if (traces.size() < B) traces.resize(B);
    std::vector<std::vector<double>> outputs(B);
    for (std::size_t i = 0; i < B; ++i) {
        forward(model, model.features, stars[i], traces[i]);
        outputs[i] = traces[i].output;
    }
    std::vector<std::vector<double>> douts(B, std::vector<double>(model.m, 0.0));
    const double loss = pair_loss(outputs, labels, &douts);
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < B; ++i) {
        bool any = false;
        for (double d : douts[i]) any = any || d != 0.0;
        if (any) backward(model, traces[i], douts[i], grad);
    }
    return loss;
}

}  // namespace

std::vector<double> loss_gradient(const GinModel& model, std::span<const StarView> stars,
                                  std::span<const std::vector<double>> labels, double* loss) {
    if (stars.size() != labels.size()) throw Error(ErrorKind::InvalidArgument, "stars and labels differ in length");
    std::vector<std::span<const double>> label_views(labels.begin(), labels.end());
    std::vector<ForwardTrace> traces;
    std::vector<double> grad(model.parameter_count(), 0.0);
    const double value = batch_gradient(model, stars, label_views, traces, grad);
    if (loss) *loss = value;
    return grad;
}

AdamOptimizer::AdamOptimizer(std::size_t size, double learning_rate, double beta1, double beta2, double eps)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps), m_(size, 0.0), v_(size, 0.0) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        const double mhat = m_[i] / c1;
        const double vhat = v_[i] / c2;
        params[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
}

GinModel train_model(const Graph& g, std::size_t dstar, const TrainConfig& cfg, const LabelGridConfig& label_cfg,
                     const GinShape& shape, std::uint64_t init_seed, TrainingReport* report, int k) {
    if (cfg.epochs < 1) throw Error(ErrorKind::InvalidArgument, "epochs must be >= 1");
    if (!(cfg.learning_rate > 0.0)) throw Error(ErrorKind::InvalidArgument, "learning rate must be positive");
    if (cfg.batch_size < 2) throw Error(ErrorKind::InvalidArgument, "batch size must be >= 2");

    const StarList stars = collect_training_stars(g, dstar, k);
    if (stars.size() == 0) throw Error(ErrorKind::Infeasible, "empty training set: no edge has an endpoint with degree <= d*");
    const LabelGrid labels =
        assign_training_labels(stars.size(), shape.m, label_cfg.xi, label_cfg.lo, label_cfg.hi, label_cfg.seed);

    GinModel model = GinModel::initialize(g.sigma_size(), shape, init_seed);
    std::vector<double> params = flatten_parameters(model);
    std::vector<double> grad(params.size(), 0.0);
    AdamOptimizer adam(params.size(), cfg.learning_rate);

    std::vector<std::size_t> order(stars.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(cfg.seed);
    std::vector<ForwardTrace> traces;
    std::vector<StarView> batch;
    std::vector<std::span<const double>> batch_labels;
    if (report) {
        report->training_set_size = stars.size();
        report->epoch_loss.clear();
    }

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            if (end - start < 2) continue;
            batch.clear();
            batch_labels.clear();
            for (std::size_t i = start; i < end; ++i) {
                batch.push_back(stars[order[i]]);
                batch_labels.push_back(labels.at(order[i]));
            }
            epoch_loss += batch_gradient(model, batch, batch_labels, traces, grad);
            adam.step(params, grad);
            assign_parameters(model, params);
        }
        if (report) report->epoch_loss.push_back(epoch_loss);
    }
    model.validate();
    model.update_digest();
    return model;
}

ConflictStats conflict_ratio(const StarKeyer& keyer, std::span<const std::pair<StarView, StarView>> pairs) {
    ConflictStats stats;
    std::vector<Label> a_leaves, b_leaves;
    for (const auto& [a, b] : pairs) {
        a_leaves.assign(a.leaf_labels.begin(), a.leaf_labels.end());
        b_leaves.assign(b.leaf_labels.begin(), b.leaf_labels.end());
        std::sort(a_leaves.begin(), a_leaves.end());
        std::sort(b_leaves.begin(), b_leaves.end());
        if (a.center_label == b.center_label && a.anchor_label == b.anchor_label && a_leaves == b_leaves) continue;
        ++stats.non_isomorphic_pairs;
        auto ka = keyer.key(a);
        auto kb = keyer.key(b);
        if (ka && kb && *ka == *kb) ++stats.conflicts;
    }
    return stats;
}

namespace {
constexpr std::string_view kModelMagic = "GAE-GIN1";
}

std::string serialize_model(const GinModel& model) {
    model.validate();
    ByteWriter w;
    w.raw(kModelMagic);
    w.u64(model.layers.size());
    w.u64(model.n);
    w.u64(model.m);
    w.u64(model.sigma);
    w.u64(model.feature_seed);
    w.u64(model.seed);
    for (const GinLayer& layer : model.layers) {
        w.f64(layer.epsilon);
        for (double x : layer.weight) w.f64(x);
        for (double x : layer.bias) w.f64(x);
    }
    for (double x : model.readout_weight) w.f64(x);
    w.u64(model.compute_digest());
    return w.bytes();
}

GinModel deserialize_model(std::string_view bytes) {
    ByteReader r(bytes);
    if (bytes.size() < kModelMagic.size() || r.raw(kModelMagic.size()) != kModelMagic)
        throw Error(ErrorKind::Format, "not a GIN model file (bad magic)");
    GinModel model;
    const std::uint64_t layers = r.u64();
    model.n = r.u64();
    model.m = r.u64();
    model.sigma = r.u64();
    model.feature_seed = r.u64();
    model.seed = r.u64();
    constexpr std::uint64_t kLimit = 1u << 16;
    if (layers == 0 || layers > kLimit || model.n == 0 || model.n > kLimit || model.m == 0 || model.m > kLimit ||
        model.sigma > (std::uint64_t{1} << 32))
        throw Error(ErrorKind::Format, "model dimensions out of range");
    const std::uint64_t expected = (layers * (1 + model.n * model.n + model.n) + model.m * model.n + 1) * 8;
    if (r.remaining() < expected) throw Error(ErrorKind::Format, "truncated model file");
    for (std::uint64_t t = 0; t < layers; ++t) {
        GinLayer layer;
        layer.epsilon = r.f64();
        layer.weight.resize(model.n * model.n);
        for (double& x : layer.weight) x = r.f64();
        layer.bias.resize(model.n);
        for (double& x : layer.bias) x = r.f64();
        model.layers.push_back(std::move(layer));
    }
    model.readout_weight.resize(model.m * model.n);
    for (double& x : model.readout_weight) x = r.f64();
    const std::uint64_t stored = r.u64();
    if (!r.done()) throw Error(ErrorKind::Format, "trailing bytes after model digest");
    model.validate();
    model.update_digest();
    if (model.digest != stored) throw Error(ErrorKind::DigestMismatch, "model digest does not match its weights");
    model.features = init_label_features(model.sigma, model.n, model.feature_seed);
    return model;
}

void save_model(const GinModel& model, const std::string& path) { write_file_bytes(path, serialize_model(model)); }

GinModel load_model(const std::string& path) { return deserialize_model(read_file_bytes(path)); }

}  // namespace anchormatch
