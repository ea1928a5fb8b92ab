#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vfn/graph/network.hpp"
#include "vfn/ops/softmax_loss.hpp"
#include "vfn/rng.hpp"
#include "vfn/train/augment.hpp"
#include "vfn/train/solver.hpp"

namespace vfn::train {

/// In-memory training set: decoded images of one common shape plus labels.
/// `mean` is the per-pixel training mean (may be empty to skip subtraction).
struct TrainData {
    std::vector<Tensor> images;
    std::vector<int> labels;
    Tensor mean;
};

/// Batched SGD over a network whose terminal edge produces logits. Each
/// step draws the next shuffled batch, augments it, runs forward/backward
/// with a softmax loss on the logits, and applies one momentum update.
class Trainer {
public:
    Trainer(graph::Network& net, const TrainData& data, SolverConfig cfg)
        : net_(net), data_(data), cfg_(cfg), rng_(cfg.rng_seed) {
        cfg_.validate();
        if (data_.images.empty()) throw DataError("trainer: empty dataset");
        if (data_.images.size() != data_.labels.size()) {
            throw DataError("trainer: image/label count mismatch");
        }
        const Shape img_shape = data_.images.front().shape();
        for (const auto& img : data_.images) {
            if (img.shape() != img_shape) throw DataError("trainer: images differ in shape");
        }
        if (img_shape.rank() != 3) throw DataError("trainer: images must be (C,H,W)");
        if (cfg_.crop_size > img_shape.dim(1) || cfg_.crop_size > img_shape.dim(2)) {
            throw ConfigError("trainer: crop " + std::to_string(cfg_.crop_size) +
                              " larger than images " + img_shape.to_string());
        }
        const Shape logits = net_.edge_shapes().at(net_.terminal_edge());
        if (logits.rank() != 1) {
            throw DataError("trainer: terminal edge must be flat logits, got " + logits.to_string());
        }
        if (net_.descriptor().layers[net_.order().back()].kind == graph::LayerKind::softmax_loss) {
            throw DataError("trainer: the solver applies its own softmax loss; end the network "
                            "at the logits");
        }
        for (int label : data_.labels) {
            if (label < 0 || label >= logits.dim(0)) {
                throw DataError("trainer: label " + std::to_string(label) + " outside [0," +
                                std::to_string(logits.dim(0)) + ")");
            }
        }
        net_.seed(rng_.next_u64());
        shuffle_rng_ = rng_.split(1);
        augment_rng_ = rng_.split(2);
        state_.bind(net_);
        order_.resize(data_.images.size());
        for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    }

    std::int64_t iteration() const { return state_.iteration; }
    const SolverState& state() const { return state_; }

    /// One forward/backward/update cycle; returns the batch loss.
    float step() {
        if (state_.iteration >= cfg_.max_iter) {
            throw StateError("trainer: max_iter reached");
        }
        const float lr = poly_lr(cfg_, state_.iteration);
        const std::vector<std::size_t> batch = next_batch();
        const std::int64_t crop = cfg_.crop_size;
        const std::int64_t channels = data_.images.front().shape().dim(0);
        Tensor input(Shape{static_cast<std::int64_t>(batch.size()), channels, crop, crop});
        std::vector<int> labels(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            const Tensor sample = augment(data_.images[batch[i]], data_.mean, crop, cfg_.flip_prob,
                                          Mode::train, augment_rng_);
            std::copy(sample.data(), sample.data() + sample.count(),
                      input.data() + static_cast<std::int64_t>(i) * sample.count());
            labels[i] = data_.labels[batch[i]];
        }
        auto edges = net_.forward(input, Mode::train, &labels);
        const Tensor& logits = edges.at(net_.terminal_edge());
        ops::SoftmaxLossCache loss_cache;
        const float loss = ops::softmax_loss_forward(logits, labels, &loss_cache);
        auto grads = net_.backward(net_.terminal_edge(), ops::softmax_loss_backward(loss_cache));
        sgd_step(net_.trainable_parameters(), grads.param_grads, state_, lr, cfg_);
        return loss;
    }

    /// Runs to max_iter, reporting (iter, lr, loss) after every step.
    void run(const std::function<void(std::int64_t, float, float)>& log = nullptr) {
        while (state_.iteration < cfg_.max_iter) {
            const std::int64_t it = state_.iteration;
            const float lr = poly_lr(cfg_, it);
            const float loss = step();
            if (log) log(it, lr, loss);
        }
    }

private:
    std::vector<std::size_t> next_batch() {
        std::vector<std::size_t> batch;
        batch.reserve(static_cast<std::size_t>(cfg_.batch_size));
        while (batch.size() < static_cast<std::size_t>(cfg_.batch_size)) {
            if (cursor_ == 0) shuffle_order();
            batch.push_back(order_[cursor_]);
            cursor_ = (cursor_ + 1) % order_.size();
        }
        return batch;
    }

    void shuffle_order() {
        for (std::size_t i = order_.size(); i > 1; --i) {
            const std::size_t j =
                static_cast<std::size_t>(shuffle_rng_.uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(order_[i - 1], order_[j]);
        }
    }

    graph::Network& net_;
    const TrainData& data_;
    SolverConfig cfg_;
    Rng rng_;
    Rng shuffle_rng_{0};
    Rng augment_rng_{0};
    SolverState state_;
    std::vector<std::size_t> order_;
    std::size_t cursor_ = 0;
};

/// Center-crop test-mode accuracy over a labeled set.
inline double accuracy(graph::Network& net, const TrainData& data, std::int64_t crop) {
    if (data.images.empty()) throw DataError("accuracy: empty dataset");
    Rng unused(0);
    const std::int64_t channels = data.images.front().shape().dim(0);
    std::size_t correct = 0;
    const std::size_t chunk = 64;
    for (std::size_t start = 0; start < data.images.size(); start += chunk) {
        const std::size_t stop = std::min(data.images.size(), start + chunk);
        Tensor input(Shape{static_cast<std::int64_t>(stop - start), channels, crop, crop});
        for (std::size_t i = start; i < stop; ++i) {
            const Tensor sample = augment(data.images[i], data.mean, crop, 0.0f, Mode::test, unused);
            std::copy(sample.data(), sample.data() + sample.count(),
                      input.data() + static_cast<std::int64_t>(i - start) * sample.count());
        }
        auto edges = net.forward(input, Mode::test);
        const Tensor& logits = edges.at(net.terminal_edge());
        const std::int64_t classes = logits.shape().dim(1);
        for (std::size_t i = start; i < stop; ++i) {
            const float* row = logits.data() + static_cast<std::int64_t>(i - start) * classes;
            std::int64_t best = 0;
            for (std::int64_t c = 1; c < classes; ++c)
                if (row[c] > row[best]) best = c;
            if (best == data.labels[i]) ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(data.images.size());
}

}  // namespace vfn::train
