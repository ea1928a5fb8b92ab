#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "vfn/tensor.hpp"

namespace vfn::ops {

/// Row-wise softmax with max subtraction.
inline Tensor softmax(const Tensor& logits) {
    if (logits.shape().rank() != 2) {
        throw ShapeError("softmax: logits must be (N,C), got " + logits.shape().to_string());
    }
    const std::int64_t n = logits.shape().dim(0);
    const std::int64_t c = logits.shape().dim(1);
    Tensor probs(logits.shape());
    for (std::int64_t i = 0; i < n; ++i) {
        const float* row = logits.data() + i * c;
        float* prow = probs.data() + i * c;
        float mx = row[0];
        for (std::int64_t j = 1; j < c; ++j) mx = std::max(mx, row[j]);
        float denom = 0.0f;
        for (std::int64_t j = 0; j < c; ++j) {
            prow[j] = std::exp(row[j] - mx);
            denom += prow[j];
        }
        const float inv = 1.0f / denom;
        for (std::int64_t j = 0; j < c; ++j) prow[j] *= inv;
    }
    return probs;
}

struct SoftmaxLossCache {
    Tensor probs;
    std::vector<int> labels;
};

/// Mean over the batch of -log softmax(logits)[label].
inline float softmax_loss_forward(const Tensor& logits, const std::vector<int>& labels,
                                  SoftmaxLossCache* cache = nullptr) {
    const std::int64_t n = logits.shape().dim(0);
    const std::int64_t c = logits.shape().dim(1);
    if (static_cast<std::int64_t>(labels.size()) != n) {
        throw DataError("softmax loss: " + std::to_string(labels.size()) + " labels for batch of " +
                        std::to_string(n));
    }
    for (std::int64_t i = 0; i < n; ++i) {
        if (labels[static_cast<std::size_t>(i)] < 0 || labels[static_cast<std::size_t>(i)] >= c) {
            throw DataError("softmax loss: label " + std::to_string(labels[static_cast<std::size_t>(i)]) +
                            " outside [0," + std::to_string(c) + ") at row " + std::to_string(i));
        }
    }
    Tensor probs = softmax(logits);
    double loss = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const float p = probs[i * c + labels[static_cast<std::size_t>(i)]];
        loss += -std::log(static_cast<double>(std::max(p, 1e-38f)));
    }
    if (cache) {
        cache->probs = std::move(probs);
        cache->labels = labels;
    }
    return static_cast<float>(loss / static_cast<double>(n));
}

/// grad = (softmax - onehot) / N.
inline Tensor softmax_loss_backward(const SoftmaxLossCache& cache) {
    if (cache.probs.empty()) throw StateError("softmax loss: backward before forward");
    const std::int64_t n = cache.probs.shape().dim(0);
    const std::int64_t c = cache.probs.shape().dim(1);
    Tensor grad(cache.probs.shape());
    const float inv_n = 1.0f / static_cast<float>(n);
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = 0; j < c; ++j) {
            const float onehot = (j == cache.labels[static_cast<std::size_t>(i)]) ? 1.0f : 0.0f;
            grad[i * c + j] = (cache.probs[i * c + j] - onehot) * inv_n;
        }
    }
    return grad;
}

}  // namespace vfn::ops
