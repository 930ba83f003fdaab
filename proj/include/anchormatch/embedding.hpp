#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anchormatch/features.hpp"
#include "anchormatch/graph.hpp"

namespace anchormatch {

enum class BackendTag : std::uint8_t { Gin = 1, Wl = 2 };

const char* to_string(BackendTag tag);

/// Per-label input feature rows (label encoding), n columns each.
struct FeatureTable {
    std::size_t n = 0;
    std::vector<double> values;  // rows() * n, row-major

    std::size_t rows() const { return n == 0 ? 0 : values.size() / n; }
    std::span<const double> row(Label l) const { return {values.data() + std::size_t{l} * n, n}; }
};

/// Deterministic in (label, n, seed): a row depends only on those three, so
/// the table for a larger alphabet extends the smaller one.
FeatureTable init_label_features(std::size_t sigma_size, std::size_t n, std::uint64_t seed);

struct GinLayer {
    double epsilon = 0.0;
    std::vector<double> weight;  // n x n, row-major
    std::vector<double> bias;    // n
};

struct GinShape {
    std::size_t layers = 2;
    std::size_t n = 10;  // feature and hidden width
    std::size_t m = 3;   // output width
    double epsilon = 0.0;
};

/// GIN over anchored stars: per layer h' = ReLU(W((1+eps)h + sum of
/// neighbor h) + b), sum readout over all star vertices, then o = W_out h_G.
///
/// `digest` covers every persisted field; call update_digest() after
/// changing weights.
struct GinModel {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t sigma = 0;
    std::uint64_t feature_seed = 0;
    std::uint64_t seed = 0;
    std::vector<GinLayer> layers;
    std::vector<double> readout_weight;  // m x n, row-major
    std::uint64_t digest = 0;
    FeatureTable features;  // derived from (sigma, n, feature_seed); not persisted

    /// Seeded uniform(-1/sqrt(n), 1/sqrt(n)) weights, zero biases.
    static GinModel initialize(std::size_t sigma, const GinShape& shape, std::uint64_t seed);

    std::size_t layer_count() const { return layers.size(); }
    std::size_t parameter_count() const { return layers.size() * (n * n + n) + m * n; }

    std::uint64_t compute_digest() const;
    void update_digest() { digest = compute_digest(); }

    /// Throws Error(InvalidArgument) when shapes disagree or a weight is not finite.
    void validate() const;
};

using EmbeddingVector = std::vector<double>;

/// Neighbor sums and the readout add their addends in lexicographic order of
/// the addend vectors, so any leaf order yields bit-identical output.
/// Throws Error(InvalidArgument) for labels outside the feature table.
EmbeddingVector gin_forward(const GinModel& model, const FeatureTable& features, StarView star);
EmbeddingVector gin_forward(const GinModel& model, StarView star);

struct EmbeddingKey {
    BackendTag backend = BackendTag::Wl;
    std::uint64_t model_digest = 0;
    std::vector<std::int64_t> components;

    bool operator==(const EmbeddingKey&) const = default;
};

struct KeyComponentsHash {
    std::size_t operator()(const std::vector<std::int64_t>& c) const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (std::int64_t x : c) {
            h ^= static_cast<std::uint64_t>(x);
            h *= 0x100000001b3ULL;
            h ^= h >> 32;
        }
        return static_cast<std::size_t>(h);
    }
};

inline constexpr double kKeyScale = 1e6;

/// round(o_i * 1e6), half away from zero. Throws Error(InvalidArgument) on
/// non-finite or out-of-range components.
EmbeddingKey embedding_key(std::span<const double> vec, const GinModel& model);

/// Digest of the canonical (center, anchor, sorted leaves) triple.
EmbeddingKey wl_hash_key(StarView star);

/// Maps stars to index keys for one backend.
class StarKeyer {
public:
    static StarKeyer wl() { return StarKeyer(nullptr); }
    /// `model` must outlive the keyer.
    static StarKeyer gin(const GinModel& model) { return StarKeyer(&model); }

    BackendTag backend() const { return model_ ? BackendTag::Gin : BackendTag::Wl; }
    std::uint64_t model_digest() const { return model_ ? model_->digest : 0; }
    const GinModel* model() const { return model_; }

    /// nullopt when the star carries a label the model has no feature row for
    /// (such a label cannot occur in the graph the model was built for).
    std::optional<EmbeddingKey> key(StarView star) const;

private:
    explicit StarKeyer(const GinModel* model) : model_(model) {}
    const GinModel* model_;
};

/// m-dimensional training targets on a regular grid.
struct LabelGrid {
    std::size_t m = 0;
    double xi = 1.0;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> values;  // size() * m

    std::size_t size() const { return m == 0 ? 0 : values.size() / m; }
    std::span<const double> at(std::size_t i) const { return {values.data() + i * m, m}; }
};

/// Smallest g with g^m >= count.
std::size_t grid_axis_count(std::size_t count, std::size_t m);

/// Assigns `count` distinct grid points, pairwise at least `xi` apart, drawn
/// from g = ceil(count^(1/m)) evenly spaced axis values in [lo, hi]; the
/// assignment order is shuffled by `seed`. When `hi` is absent it defaults to
/// lo + (g - 1) * xi. Throws Error(Infeasible) when the range is too narrow.
LabelGrid assign_training_labels(std::size_t count, std::size_t m, double xi, double lo,
                                 std::optional<double> hi, std::uint64_t seed);

/// Flat list of stars with compact storage.
class StarList {
public:
    void add(StarView s);
    std::size_t size() const { return centers_.size(); }
    StarView operator[](std::size_t i) const {
        return {centers_[i], anchors_[i],
                std::span<const Label>(leaves_.data() + offsets_[i], offsets_[i + 1] - offsets_[i])};
    }

private:
    std::vector<Label> centers_;
    std::vector<Label> anchors_;
    std::vector<std::uint32_t> offsets_{0};
    std::vector<Label> leaves_;
};

/// The star training set: every anchored star of every edge that has an
/// endpoint of degree <= dstar, centered at the low-label endpoint when it is
/// sparse and at the other endpoint otherwise.
StarList collect_training_stars(const Graph& g, std::size_t dstar, int k = 1);

/// Sum over unordered pairs of max(0, |l_i - l_j| - |o_i - o_j|).
double compute_loss(const GinModel& model, std::span<const StarView> stars, const LabelGrid& labels,
                    std::span<const std::size_t> label_index);
double compute_loss(const GinModel& model, std::span<const StarView> stars,
                    std::span<const std::vector<double>> labels);

/// Parameters flattened as: per layer weight then bias, then readout weight.
std::vector<double> flatten_parameters(const GinModel& model);
void assign_parameters(GinModel& model, std::span<const double> params);

/// Analytic gradient of compute_loss with respect to flatten_parameters().
std::vector<double> loss_gradient(const GinModel& model, std::span<const StarView> stars,
                                  std::span<const std::vector<double>> labels, double* loss = nullptr);

struct TrainConfig {
    std::size_t epochs = 20;
    double learning_rate = 0.001;
    std::size_t batch_size = 1024;
    std::uint64_t seed = 1;
};

struct LabelGridConfig {
    double xi = 1.0;
    double lo = 0.0;
    std::optional<double> hi;
    std::uint64_t seed = 7;
};

struct TrainingReport {
    std::size_t training_set_size = 0;
    std::vector<double> epoch_loss;  // summed batch losses per epoch
};

/// Deterministic in all seeds; single-threaded. Throws Error(Infeasible)
/// when no edge qualifies.
GinModel train_model(const Graph& g, std::size_t dstar, const TrainConfig& cfg,
                     const LabelGridConfig& label_cfg, const GinShape& shape = {},
                     std::uint64_t init_seed = 1, TrainingReport* report = nullptr, int k = 1);

/// Adam over a flat parameter vector.
class AdamOptimizer {
public:
    AdamOptimizer(std::size_t size, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                  double eps = 1e-8);
    void step(std::span<double> params, std::span<const double> grad);

private:
    double lr_, beta1_, beta2_, eps_;
    std::vector<double> m_, v_;
    std::size_t t_ = 0;
};

struct ConflictStats {
    std::size_t non_isomorphic_pairs = 0;
    std::size_t conflicts = 0;
    double ratio() const {
        return non_isomorphic_pairs == 0 ? 0.0
                                         : static_cast<double>(conflicts) / static_cast<double>(non_isomorphic_pairs);
    }
};

/// Fraction of non-isomorphic pairs (canonical triples differ) whose keys are
/// equal. Isomorphic pairs are skipped.
ConflictStats conflict_ratio(const StarKeyer& keyer, std::span<const std::pair<StarView, StarView>> pairs);

std::string serialize_model(const GinModel& model);
/// Verifies magic and digest; throws Error(Format) or Error(DigestMismatch).
GinModel deserialize_model(std::string_view bytes);
void save_model(const GinModel& model, const std::string& path);
GinModel load_model(const std::string& path);

}  // namespace anchormatch
