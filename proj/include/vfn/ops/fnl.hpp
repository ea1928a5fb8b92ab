#pragma once

#include <cmath>
#include <cstdint>

#include "vfn/tensor.hpp"

namespace vfn::ops {

/// Statistic granularity of the fast normalization layer. Fully-connected
/// outputs normalize each node independently; convolutional outputs default
/// to one statistic per channel, pooled over batch and spatial positions.
enum class FnlStat { per_node, per_channel };

/// Momentum-tracked running statistics plus the per-batch cache the
/// backward pass needs. Running mean starts at 0, running variance at 1.
template <typename T>
struct BasicFnlState {
    BasicTensor<T> running_mean;
    BasicTensor<T> running_var;
    T momentum = T(0.99);
    T epsilon = T(1e-5);

    BasicTensor<T> batch_mean;
    BasicTensor<T> batch_var;
    BasicTensor<T> cached_input;
    bool has_cache = false;

    void init(std::int64_t nodes) {
        running_mean = BasicTensor<T>(Shape{nodes}, T(0));
        running_var = BasicTensor<T>(Shape{nodes}, T(1));
    }
};

using FnlState = BasicFnlState<float>;

namespace detail {

struct FnlLayout {
    std::int64_t nodes = 0;
    std::int64_t samples = 0;
    std::int64_t spatial = 0;  // H*W when channel-pooled, else 1
    bool channel_pooled = false;

    std::int64_t index(std::int64_t node, std::int64_t sample) const {
        if (!channel_pooled) return sample * nodes + node;
        const std::int64_t n = sample / spatial;
        const std::int64_t s = sample % spatial;
        return (n * nodes + node) * spatial + s;
    }
};

template <typename T>
FnlLayout fnl_layout(const BasicTensor<T>& in, FnlStat stat) {
    if (in.shape().rank() < 2) {
        throw ShapeError("fnl: input must carry a batch dimension, got " + in.shape().to_string());
    }
    const std::int64_t batch = in.shape().dim(0);
    FnlLayout layout;
    if (stat == FnlStat::per_channel) {
        if (in.shape().rank() != 4) {
            throw ShapeError("fnl: per-channel statistics need (N,C,H,W) input, got " +
                             in.shape().to_string());
        }
        layout.nodes = in.shape().dim(1);
        layout.spatial = in.shape().dim(2) * in.shape().dim(3);
        layout.samples = batch * layout.spatial;
        layout.channel_pooled = true;
    } else {
        layout.nodes = in.count() / batch;
        layout.spatial = 1;
        layout.samples = batch;
    }
    return layout;
}

}  // namespace detail

/// Train mode normalizes each node with the batch mean and biased (1/N)
/// batch variance, then folds the batch statistics into the running ones:
/// mu_x <- w*mu_x + (1-w)*mu, sigma_x <- w*sigma_x + (1-w)*sigma. There is
/// no scale/shift recovery. Test mode applies the stored running values.
template <typename T>
BasicTensor<T> fnl_forward(const BasicTensor<T>& in, BasicFnlState<T>& state, Mode mode,
                           FnlStat stat = FnlStat::per_node) {
    const detail::FnlLayout layout = detail::fnl_layout(in, stat);
    if (state.running_mean.empty()) {
        state.init(layout.nodes);
    } else if (state.running_mean.count() != layout.nodes) {
        throw ShapeError("fnl: state tracks " + std::to_string(state.running_mean.count()) +
                         " nodes but input has " + std::to_string(layout.nodes));
    }

    BasicTensor<T> out(in.shape());
    if (mode == Mode::test) {
        for (std::int64_t d = 0; d < layout.nodes; ++d) {
            const T mu = state.running_mean[d];
            const T var = state.running_var[d];
            if (var < T(0)) {
                throw StateError("fnl: stored variance of node " + std::to_string(d) +
                                 " is negative");
            }
            const T inv = T(1) / std::sqrt(var + state.epsilon);
            for (std::int64_t s = 0; s < layout.samples; ++s) {
                const std::int64_t i = layout.index(d, s);
                out[i] = (in[i] - mu) * inv;
            }
        }
        return out;
    }

    if (in.shape().dim(0) < 2) {
        throw ConfigError("fnl: train mode needs batch size >= 2, got " +
                          std::to_string(in.shape().dim(0)));
    }
    state.batch_mean = BasicTensor<T>(Shape{layout.nodes});
    state.batch_var = BasicTensor<T>(Shape{layout.nodes});
    const T inv_n = T(1) / static_cast<T>(layout.samples);
    for (std::int64_t d = 0; d < layout.nodes; ++d) {
        T sum = T(0);
        for (std::int64_t s = 0; s < layout.samples; ++s) sum += in[layout.index(d, s)];
        const T mu = sum * inv_n;
        T sq = T(0);
        for (std::int64_t s = 0; s < layout.samples; ++s) {
            const T diff = in[layout.index(d, s)] - mu;
            sq += diff * diff;
        }
        const T var = sq * inv_n;
        const T inv = T(1) / std::sqrt(var + state.epsilon);
        for (std::int64_t s = 0; s < layout.samples; ++s) {
            const std::int64_t i = layout.index(d, s);
            out[i] = (in[i] - mu) * inv;
        }
        state.batch_mean[d] = mu;
        state.batch_var[d] = var;
        state.running_mean[d] = state.momentum * state.running_mean[d] + (T(1) - state.momentum) * mu;
        state.running_var[d] = state.momentum * state.running_var[d] + (T(1) - state.momentum) * var;
    }
    state.cached_input = in;
    state.has_cache = true;
    return out;
}

/// Chain-rule backward over the cached batch:
///   dL/dsigma = -1/2 sum_i dL/do_i (x_i - mu) (sigma+eps)^(-3/2)
///   dL/dmu    = sum_i dL/do_i * (-1/sqrt(sigma+eps))
///               + dL/dsigma * (-2 sum_i (x_i - mu) / N)
///   dL/dx_i   = dL/do_i / sqrt(sigma+eps)
///               + dL/dsigma * 2 (x_i - mu) / N + dL/dmu / N
template <typename T>
BasicTensor<T> fnl_backward(const BasicTensor<T>& grad_out, BasicFnlState<T>& state,
                            FnlStat stat = FnlStat::per_node) {
    if (!state.has_cache) throw StateError("fnl: backward before a train-mode forward");
    if (grad_out.shape() != state.cached_input.shape()) {
        throw ShapeError("fnl: grad shape " + grad_out.shape().to_string() +
                         " does not match cached batch " + state.cached_input.shape().to_string());
    }
    const detail::FnlLayout layout = detail::fnl_layout(state.cached_input, stat);
    const BasicTensor<T>& x = state.cached_input;
    BasicTensor<T> grad_in(grad_out.shape());
    const T inv_n = T(1) / static_cast<T>(layout.samples);
    for (std::int64_t d = 0; d < layout.nodes; ++d) {
        const T mu = state.batch_mean[d];
        const T veps = state.batch_var[d] + state.epsilon;
        const T inv_std = T(1) / std::sqrt(veps);
        const T inv_pow32 = inv_std / veps;  // (sigma+eps)^(-3/2)

        T dvar = T(0);
        T gsum = T(0);
        T centered_sum = T(0);
        for (std::int64_t s = 0; s < layout.samples; ++s) {
            const std::int64_t i = layout.index(d, s);
            const T centered = x[i] - mu;
            dvar += grad_out[i] * centered;
            gsum += grad_out[i];
            centered_sum += centered;
        }
        dvar *= T(-0.5) * inv_pow32;
        const T dmu = -gsum * inv_std + dvar * (T(-2) * centered_sum * inv_n);
        for (std::int64_t s = 0; s < layout.samples; ++s) {
            const std::int64_t i = layout.index(d, s);
            grad_in[i] = grad_out[i] * inv_std + dvar * T(2) * (x[i] - mu) * inv_n + dmu * inv_n;
        }
    }
    return grad_in;
}

}  // namespace vfn::ops
