#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vfn/graph/network.hpp"
#include "vfn/tensor.hpp"

namespace vfn::train {

struct SolverConfig {
    float base_lr = 0.01f;  // 0.04 is the usual choice for normalized nets
    float lr_power = 0.5f;
    std::int64_t max_iter = 0;
    float momentum = 0.9f;
    float weight_decay = 0.0005f;
    std::int64_t batch_size = 0;
    std::uint64_t rng_seed = 0;
    std::int64_t crop_size = 227;
    float flip_prob = 0.5f;

    void validate() const {
        if (!(momentum >= 0.0f) || momentum >= 1.0f) {
            throw ConfigError("solver: momentum must lie in [0,1)");
        }
        if (weight_decay < 0.0f) throw ConfigError("solver: weight decay must be >= 0");
        if (max_iter < 1) throw ConfigError("solver: max_iter must be >= 1");
        if (batch_size < 1) throw ConfigError("solver: batch size must be >= 1");
        if (crop_size < 1) throw ConfigError("solver: crop size must be >= 1");
        if (!(flip_prob >= 0.0f && flip_prob <= 1.0f)) {
            throw ConfigError("solver: flip probability must lie in [0,1]");
        }
    }
};

/// lr = base_lr * (1 - iter/max_iter)^power.
inline float poly_lr(const SolverConfig& cfg, std::int64_t iter) {
    if (iter < 0 || iter > cfg.max_iter) {
        throw NumericError("poly_lr: iteration " + std::to_string(iter) + " outside [0," +
                           std::to_string(cfg.max_iter) + "]");
    }
    const double progress = 1.0 - static_cast<double>(iter) / static_cast<double>(cfg.max_iter);
    return static_cast<float>(cfg.base_lr * std::pow(progress, cfg.lr_power));
}

/// Momentum buffers, one per parameter, zero at start.
struct SolverState {
    std::int64_t iteration = 0;
    std::map<std::string, Tensor> velocity;

    void bind(graph::Network& net) {
        velocity.clear();
        for (const auto& p : net.trainable_parameters()) {
            velocity.emplace(p.name, Tensor(p.tensor->shape()));
        }
        iteration = 0;
    }
};

/// v <- momentum*v - lr*(g + weight_decay*w); w <- w + v.
inline void sgd_step(const std::vector<graph::Network::ParamRef>& params,
                     const std::map<std::string, Tensor>& grads, SolverState& state, float lr,
                     const SolverConfig& cfg) {
    for (const auto& p : params) {
        const auto git = grads.find(p.name);
        if (git == grads.end()) throw StateError("sgd: no gradient for parameter " + p.name);
        const Tensor& g = git->second;
        auto vit = state.velocity.find(p.name);
        if (vit == state.velocity.end()) throw StateError("sgd: no velocity for parameter " + p.name);
        Tensor& v = vit->second;
        Tensor& w = *p.tensor;
        if (g.shape() != w.shape() || v.shape() != w.shape()) {
            throw ShapeError("sgd: shape mismatch for parameter " + p.name);
        }
        for (std::int64_t i = 0; i < w.count(); ++i) {
            v[i] = cfg.momentum * v[i] - lr * (g[i] + cfg.weight_decay * w[i]);
            w[i] += v[i];
        }
    }
    ++state.iteration;
}

}  // namespace vfn::train
