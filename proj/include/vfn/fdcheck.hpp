#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vfn/graph/network.hpp"
#include "vfn/ops/conv.hpp"
#include "vfn/ops/dropout.hpp"
#include "vfn/ops/fc.hpp"
#include "vfn/ops/fnl.hpp"
#include "vfn/ops/pool.hpp"
#include "vfn/ops/relu.hpp"
#include "vfn/ops/softmax_loss.hpp"
#include "vfn/rng.hpp"

namespace vfn::fdcheck {

/// Central-difference check of an analytic gradient against the loss
/// closure, which must re-evaluate the full forward path. Errors are
/// relative to max(1, |analytic|, |numeric|).
template <typename T, typename LossFn>
double fd_max_rel_err(BasicTensor<T>& x, const BasicTensor<T>& analytic, const LossFn& loss, T h) {
    if (x.shape() != analytic.shape()) throw ShapeError("fd check: gradient shape mismatch");
    double worst = 0.0;
    for (std::int64_t i = 0; i < x.count(); ++i) {
        const T orig = x[i];
        x[i] = orig + h;
        const double lp = loss();
        x[i] = orig - h;
        const double lm = loss();
        x[i] = orig;
        const double numeric = (lp - lm) / (2.0 * static_cast<double>(h));
        const double a = static_cast<double>(analytic[i]);
        const double denom = std::max({1.0, std::fabs(a), std::fabs(numeric)});
        worst = std::max(worst, std::fabs(a - numeric) / denom);
    }
    return worst;
}

namespace detail {

template <typename T>
BasicTensor<T> random_tensor(const Shape& s, Rng& rng, double lo = -1.0, double hi = 1.0) {
    BasicTensor<T> t(s);
    for (auto& v : t) v = static_cast<T>(rng.uniform(lo, hi));
    return t;
}

// fixed random weighting turns a tensor-valued op into a scalar loss
template <typename T>
double weighted_sum(const BasicTensor<T>& t, const BasicTensor<T>& w) {
    double s = 0.0;
    for (std::int64_t i = 0; i < t.count(); ++i)
        s += static_cast<double>(t[i]) * static_cast<double>(w[i]);
    return s;
}

}  // namespace detail

constexpr float kH32 = 1e-3f;
constexpr double kH64 = 1e-4;

/// Convolution: input, weight and bias gradients, including a grouped case.
inline double check_conv(Rng& rng) {
    double worst = 0.0;
    struct Case {
        Shape in;
        std::int64_t filters, k, stride, pad, groups;
    };
    const Case cases[] = {
        {Shape{1, 2, 5, 5}, 3, 3, 1, 0, 1},
        {Shape{2, 4, 5, 5}, 4, 3, 2, 1, 2},
    };
    for (const auto& c : cases) {
        ops::ConvParams p;
        p.out_channels = c.filters;
        p.kh = p.kw = c.k;
        p.stride = c.stride;
        p.pad = c.pad;
        p.groups = c.groups;
        p.weights = detail::random_tensor<float>(Shape{c.filters, c.in.dim(1) / c.groups, c.k, c.k}, rng);
        p.bias = detail::random_tensor<float>(Shape{c.filters}, rng);
        Tensor x = detail::random_tensor<float>(c.in, rng);
        ops::ConvCache cache;
        Tensor out = ops::conv_forward(x, p, &cache);
        const Tensor w = detail::random_tensor<float>(out.shape(), rng);
        Tensor grad_out(out.shape());
        for (std::int64_t i = 0; i < w.count(); ++i) grad_out[i] = w[i];
        const auto grads = ops::conv_backward(grad_out, cache, p);
        auto loss = [&] { return detail::weighted_sum(ops::conv_forward(x, p), w); };
        worst = std::max(worst, fd_max_rel_err(x, grads.grad_in, loss, kH32));
        worst = std::max(worst, fd_max_rel_err(p.weights, grads.grad_w, loss, kH32));
        worst = std::max(worst, fd_max_rel_err(p.bias, grads.grad_b, loss, kH32));
    }
    return worst;
}

inline double check_fc(Rng& rng) {
    ops::FcParams p;
    p.weights = detail::random_tensor<float>(Shape{6, 4}, rng);
    p.bias = detail::random_tensor<float>(Shape{4}, rng);
    Tensor x = detail::random_tensor<float>(Shape{2, 6}, rng);
    ops::FcCache cache;
    Tensor out = ops::fc_forward(x, p, &cache);
    const Tensor w = detail::random_tensor<float>(out.shape(), rng);
    const auto grads = ops::fc_backward(w, cache, p);
    auto loss = [&] { return detail::weighted_sum(ops::fc_forward(x, p), w); };
    double worst = fd_max_rel_err(x, grads.grad_in, loss, kH32);
    worst = std::max(worst, fd_max_rel_err(p.weights, grads.grad_w, loss, kH32));
    worst = std::max(worst, fd_max_rel_err(p.bias, grads.grad_b, loss, kH32));
    return worst;
}

/// Max pooling away from window ties; inputs are redrawn until every
/// window's top two values are separated by a safe margin.
inline double check_pool_max(Rng& rng) {
    ops::PoolParams p{ops::PoolParams::Kind::max, 3, 3, 2};
    Tensor x(Shape{1, 1, 5, 5});
    for (int attempt = 0; attempt < 100; ++attempt) {
        x = detail::random_tensor<float>(x.shape(), rng);
        bool tied = false;
        for (std::int64_t oh = 0; oh < 2 && !tied; ++oh) {
            for (std::int64_t ow = 0; ow < 2 && !tied; ++ow) {
                float best = -10.0f;
                float second = -10.0f;
                for (std::int64_t ki = 0; ki < 3; ++ki) {
                    for (std::int64_t kj = 0; kj < 3; ++kj) {
                        const float v = x[(oh * 2 + ki) * 5 + (ow * 2 + kj)];
                        if (v > best) {
                            second = best;
                            best = v;
                        } else if (v > second) {
                            second = v;
                        }
                    }
                }
                tied = (best - second) < 0.05f;
            }
        }
        if (!tied) break;
    }
    ops::PoolCache cache;
    Tensor out = ops::pool_forward(x, p, &cache);
    const Tensor w = detail::random_tensor<float>(out.shape(), rng);
    const Tensor grad_in = ops::pool_backward(w, p, cache);
    auto loss = [&] { return detail::weighted_sum(ops::pool_forward(x, p), w); };
    return fd_max_rel_err(x, grad_in, loss, kH32);
}

inline double check_pool_mean(Rng& rng) {
    ops::PoolParams p{ops::PoolParams::Kind::mean, 2, 2, 2};
    Tensor x = detail::random_tensor<float>(Shape{1, 2, 4, 4}, rng);
    ops::PoolCache cache;
    Tensor out = ops::pool_forward(x, p, &cache);
    const Tensor w = detail::random_tensor<float>(out.shape(), rng);
    const Tensor grad_in = ops::pool_backward(w, p, cache);
    auto loss = [&] { return detail::weighted_sum(ops::pool_forward(x, p), w); };
    return fd_max_rel_err(x, grad_in, loss, kH32);
}

/// ReLU away from the kink at 0.
inline double check_relu(Rng& rng) {
    Tensor x(Shape{3, 7});
    for (auto& v : x) {
        const double u = rng.uniform(0.1, 1.0);
        v = static_cast<float>(rng.uniform() < 0.5 ? -u : u);
    }
    const Tensor w = detail::random_tensor<float>(x.shape(), rng);
    const Tensor grad_in = ops::relu_backward(w, x);
    auto loss = [&] { return detail::weighted_sum(ops::relu_forward(x), w); };
    return fd_max_rel_err(x, grad_in, loss, kH32);
}

/// Dropout with the mask frozen by a fixed seed.
inline double check_dropout(Rng& rng) {
    ops::DropoutParams p{0.5f, Mode::train, 42};
    Tensor x = detail::random_tensor<float>(Shape{4, 8}, rng);
    auto fwd = ops::dropout_forward(x, p);
    const Tensor w = detail::random_tensor<float>(x.shape(), rng);
    const Tensor grad_in = ops::dropout_backward(w, fwd.mask);
    auto loss = [&] { return detail::weighted_sum(ops::dropout_forward(x, p).out, w); };
    return fd_max_rel_err(x, grad_in, loss, kH32);
}

inline double check_softmax_loss(Rng& rng) {
    Tensor logits = detail::random_tensor<float>(Shape{3, 5}, rng);
    std::vector<int> labels;
    for (int i = 0; i < 3; ++i) labels.push_back(static_cast<int>(rng.uniform_int(0, 4)));
    ops::SoftmaxLossCache cache;
    ops::softmax_loss_forward(logits, labels, &cache);
    const Tensor grad = ops::softmax_loss_backward(cache);
    auto loss = [&] { return static_cast<double>(ops::softmax_loss_forward(logits, labels)); };
    return fd_max_rel_err(logits, grad, loss, kH32);
}

/// Fast normalization in the requested precision; covers both the
/// per-node and the channel-pooled layouts. `negate` flips the analytic
/// gradient's sign, a fault-injection hook for harness self-tests.
template <typename T>
double check_fnl(Rng& rng, bool negate = false) {
    const T h = sizeof(T) == 8 ? static_cast<T>(kH64) : static_cast<T>(kH32);
    double worst = 0.0;
    struct Case {
        Shape shape;
        ops::FnlStat stat;
    };
    const Case cases[] = {
        {Shape{8, 4}, ops::FnlStat::per_node},
        {Shape{4, 3, 2, 2}, ops::FnlStat::per_channel},
    };
    for (const auto& c : cases) {
        BasicTensor<T> x = detail::random_tensor<T>(c.shape, rng);
        const BasicTensor<T> w = detail::random_tensor<T>(c.shape, rng);
        ops::BasicFnlState<T> state;
        ops::fnl_forward(x, state, Mode::train, c.stat);
        BasicTensor<T> grad_out(c.shape);
        for (std::int64_t i = 0; i < w.count(); ++i) grad_out[i] = w[i];
        BasicTensor<T> grad_in = ops::fnl_backward(grad_out, state, c.stat);
        if (negate) {
            for (auto& v : grad_in) v = -v;
        }
        auto loss = [&] {
            ops::BasicFnlState<T> fresh;
            return detail::weighted_sum(ops::fnl_forward(x, fresh, Mode::train, c.stat), w);
        };
        worst = std::max(worst, fd_max_rel_err(x, grad_in, loss, h));
    }
    return worst;
}

/// End-to-end check of a two-layer fully-connected network under the
/// softmax loss: every trainable parameter plus the input batch.
inline double check_network(Rng& rng) {
    const char* text =
        "layer data input shape=6 out=data\n"
        "layer fc1 fc outputs=5 act=relu in=data out=h\n"
        "layer fc2 fc outputs=4 in=h out=logits\n";
    graph::Network net{graph::parse_descriptor(text)};
    for (auto& p : net.trainable_parameters()) {
        *p.tensor = detail::random_tensor<float>(p.tensor->shape(), rng, -0.7, 0.7);
    }
    Tensor x = detail::random_tensor<float>(Shape{3, 6}, rng);
    std::vector<int> labels;
    for (int i = 0; i < 3; ++i) labels.push_back(static_cast<int>(rng.uniform_int(0, 3)));

    auto loss = [&] {
        auto edges = net.forward(x, Mode::train);
        return static_cast<double>(
            ops::softmax_loss_forward(edges.at(net.terminal_edge()), labels));
    };
    auto edges = net.forward(x, Mode::train);
    ops::SoftmaxLossCache cache;
    ops::softmax_loss_forward(edges.at(net.terminal_edge()), labels, &cache);
    auto back = net.backward(net.terminal_edge(), ops::softmax_loss_backward(cache));

    double worst = fd_max_rel_err(x, back.input_grad, loss, kH32);
    for (auto& p : net.trainable_parameters()) {
        worst = std::max(worst, fd_max_rel_err(*p.tensor, back.param_grads.at(p.name), loss, kH32));
    }
    return worst;
}

struct OpCheck {
    std::string op;
    double max_rel_err = 0.0;
    double tolerance = 1e-3;
    bool pass = false;
};

/// The full per-op sweep the gradcheck command prints. `negate_fnl`
/// injects a sign fault into the fnl gradient to prove the harness fails.
inline std::vector<OpCheck> run_all(std::uint64_t seed, bool negate_fnl = false) {
    std::vector<OpCheck> out;
    auto add = [&out](std::string op, double err, double tol) {
        out.push_back({std::move(op), err, tol, err < tol});
    };
    {
        Rng rng(seed);
        add("conv", check_conv(rng), 1e-3);
    }
    {
        Rng rng(seed + 1);
        add("fc", check_fc(rng), 1e-3);
    }
    {
        Rng rng(seed + 2);
        add("pool_max", check_pool_max(rng), 1e-3);
    }
    {
        Rng rng(seed + 3);
        add("pool_mean", check_pool_mean(rng), 1e-3);
    }
    {
        Rng rng(seed + 4);
        add("relu", check_relu(rng), 1e-3);
    }
    {
        Rng rng(seed + 5);
        add("dropout", check_dropout(rng), 1e-3);
    }
    {
        Rng rng(seed + 6);
        add("softmax_loss", check_softmax_loss(rng), 1e-3);
    }
    {
        Rng rng(seed + 7);
        add("fnl", check_fnl<float>(rng, negate_fnl), 1e-3);
    }
    {
        Rng rng(seed + 8);
        add("fnl_f64", check_fnl<double>(rng, negate_fnl), 1e-4);
    }
    {
        Rng rng(seed + 9);
        add("network", check_network(rng), 1e-3);
    }
    return out;
}

}  // namespace vfn::fdcheck
