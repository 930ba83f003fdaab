#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "anchormatch/embedding.hpp"
#include "anchormatch/rng.hpp"

namespace gradcheck {

using namespace anchormatch;

// Random tiny batch: up to 4 leaves, labels < sigma, random m-dim targets.
struct Batch {
    std::vector<std::vector<Label>> leaves;
    std::vector<StarView> stars;
    std::vector<std::vector<double>> labels;
};

inline Batch random_batch(Rng& rng, std::size_t size, std::size_t sigma, std::size_t m) {
    Batch b;
    b.leaves.resize(size);
    std::vector<std::pair<Label, Label>> ends(size);
    for (std::size_t i = 0; i < size; ++i) {
        ends[i] = {static_cast<Label>(rng.below(sigma)), static_cast<Label>(rng.below(sigma))};
        std::size_t d = rng.below(5);
        for (std::size_t j = 0; j < d; ++j) b.leaves[i].push_back(static_cast<Label>(rng.below(sigma)));
        std::vector<double> l(m);
        for (double& x : l) x = rng.uniform(0.0, 4.0);
        b.labels.push_back(std::move(l));
    }
    for (std::size_t i = 0; i < size; ++i) b.stars.emplace_back(ends[i].first, ends[i].second, b.leaves[i]);
    return b;
}

// Initial biases are zero, so a layer fed only dead units sits exactly on the
// ReLU kink where no finite difference agrees with a one-sided derivative.
// Random biases move the check to a differentiable point.
inline void randomize_biases(GinModel& model, Rng& rng) {
    for (GinLayer& layer : model.layers)
        for (double& b : layer.bias) b = rng.uniform(-0.5, 0.5);
    model.update_digest();
}

// Largest |analytic - numeric| / max(|analytic|, |numeric|, floor) over all
// parameters, with central differences of step h.
inline double max_relative_error(GinModel model, const Batch& b, double h = 1e-5, double floor = 1e-4) {
    std::vector<double> analytic = loss_gradient(model, b.stars, b.labels);
    std::vector<double> params = flatten_parameters(model);
    double worst = 0.0;
    for (std::size_t p = 0; p < params.size(); ++p) {
        std::vector<double> shifted = params;
        shifted[p] = params[p] + h;
        assign_parameters(model, shifted);
        const double up = compute_loss(model, b.stars, b.labels);
        shifted[p] = params[p] - h;
        assign_parameters(model, shifted);
        const double down = compute_loss(model, b.stars, b.labels);
        const double numeric = (up - down) / (2 * h);
        const double scale = std::max({std::fabs(analytic[p]), std::fabs(numeric), floor});
        worst = std::max(worst, std::fabs(analytic[p] - numeric) / scale);
    }
    assign_parameters(model, params);
    return worst;
}

}  // namespace gradcheck
