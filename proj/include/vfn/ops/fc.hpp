#pragma once

#include <cstdint>

#include "vfn/gemm.hpp"
#include "vfn/tensor.hpp"

namespace vfn::ops {

/// Inner product, out = W^T x + b: weights (n, m) map a length-n input to
/// m outputs. Batched inputs of any rank are flattened per sample.
struct FcParams {
    Tensor weights;  // (n, m)
    Tensor bias;     // (m)

    std::int64_t in_features() const { return weights.shape().dim(0); }
    std::int64_t out_features() const { return weights.shape().dim(1); }

    void validate() const {
        if (weights.shape().rank() != 2) {
            throw ShapeError("fc: weights must be (n,m), got " + weights.shape().to_string());
        }
        if (bias.shape() != Shape{out_features()}) {
            throw ShapeError("fc: bias shape " + bias.shape().to_string() + " does not match (" +
                             std::to_string(out_features()) + ")");
        }
    }
};

struct FcCache {
    Tensor input2d;  // (N, n) flattened view of the input
    Shape in_shape;
};

inline Tensor fc_forward(const Tensor& in, const FcParams& p, FcCache* cache = nullptr) {
    p.validate();
    if (in.shape().rank() < 2) {
        throw ShapeError("fc: input must carry a batch dimension, got " + in.shape().to_string());
    }
    const std::int64_t batch = in.shape().dim(0);
    const std::int64_t flat = in.count() / batch;
    if (flat != p.in_features()) {
        throw ShapeError("fc: flattened input length " + std::to_string(flat) +
                         " does not match weight rows " + std::to_string(p.in_features()));
    }
    Tensor x = in.reshaped(Shape{batch, flat});
    Tensor out(Shape{batch, p.out_features()});
    gemm(false, false, 1.0f, x, p.weights, 0.0f, out);
    for (std::int64_t i = 0; i < batch; ++i) {
        float* row = out.data() + i * p.out_features();
        for (std::int64_t j = 0; j < p.out_features(); ++j) row[j] += p.bias[j];
    }
    if (cache) {
        cache->input2d = std::move(x);
        cache->in_shape = in.shape();
    }
    return out;
}

struct FcGrads {
    Tensor grad_in;
    Tensor grad_w;
    Tensor grad_b;
};

inline FcGrads fc_backward(const Tensor& grad_out, const FcCache& cache, const FcParams& p) {
    if (cache.input2d.empty()) throw StateError("fc: backward before forward");
    const std::int64_t batch = cache.input2d.shape().dim(0);
    if (grad_out.shape() != Shape{batch, p.out_features()}) {
        throw ShapeError("fc: grad shape " + grad_out.shape().to_string() + " does not match " +
                         Shape{batch, p.out_features()}.to_string());
    }
    FcGrads grads;
    grads.grad_w = Tensor(p.weights.shape());
    gemm(true, false, 1.0f, cache.input2d, grad_out, 0.0f, grads.grad_w);
    grads.grad_b = Tensor(p.bias.shape());
    for (std::int64_t i = 0; i < batch; ++i)
        for (std::int64_t j = 0; j < p.out_features(); ++j)
            grads.grad_b[j] += grad_out[i * p.out_features() + j];
    Tensor gx(Shape{batch, p.in_features()});
    gemm(false, true, 1.0f, grad_out, p.weights, 0.0f, gx);
    grads.grad_in = gx.reshaped(cache.in_shape);
    return grads;
}

}  // namespace vfn::ops
