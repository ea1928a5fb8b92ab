#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vfn/graph/descriptor.hpp"
#include "vfn/ops/conv.hpp"
#include "vfn/ops/dropout.hpp"
#include "vfn/ops/fc.hpp"
#include "vfn/ops/fnl.hpp"
#include "vfn/ops/lrn.hpp"
#include "vfn/ops/pool.hpp"
#include "vfn/ops/relu.hpp"
#include "vfn/ops/softmax_loss.hpp"
#include "vfn/rng.hpp"

namespace vfn::graph {

/// A descriptor bound to weights and normalization state, executable
/// forward and backward. Train-mode forwards cache per-layer intermediates
/// for the following backward; test-mode execution is read-only apart from
/// the dropout identity.
class Network {
public:
    explicit Network(NetworkDescriptor desc) : desc_(std::move(desc)), rng_(0) {
        shapes_ = validate(desc_);
        order_ = topo_order(desc_);
        state_.resize(desc_.layers.size());
        for (std::size_t i = 0; i < desc_.layers.size(); ++i) allocate(i);
    }

    const NetworkDescriptor& descriptor() const { return desc_; }
    const std::vector<std::size_t>& order() const { return order_; }
    const std::map<std::string, Shape>& edge_shapes() const { return shapes_; }

    /// Output edge of the last layer in topological order.
    const std::string& terminal_edge() const { return desc_.layers[order_.back()].out_edge(); }

    void seed(std::uint64_t s) { rng_ = Rng(s); }

    struct ParamRef {
        std::string name;
        Tensor* tensor;
    };

    /// Conv/fc weights and biases, in declaration order; what SGD updates.
    std::vector<ParamRef> trainable_parameters() {
        std::vector<ParamRef> out;
        for (auto& [idx, l] : indexed_layers()) {
            auto& rt = state_[idx];
            if (l->kind == LayerKind::conv) {
                out.push_back({l->name + ".w", &rt.conv.weights});
                out.push_back({l->name + ".b", &rt.conv.bias});
            } else if (l->kind == LayerKind::fc) {
                out.push_back({l->name + ".w", &rt.fc.weights});
                out.push_back({l->name + ".b", &rt.fc.bias});
            }
        }
        return out;
    }

    /// Blocks of the model file's weight section: trainable parameters
    /// plus the input layer's mean image when one is bound.
    std::vector<ParamRef> weight_blocks() {
        std::vector<ParamRef> out;
        for (auto& [idx, l] : indexed_layers()) {
            auto& rt = state_[idx];
            if (l->kind == LayerKind::input && std::get<InputDef>(l->params).has_mean) {
                out.push_back({l->name + ".mean", &rt.input_mean});
            } else if (l->kind == LayerKind::conv) {
                out.push_back({l->name + ".w", &rt.conv.weights});
                out.push_back({l->name + ".b", &rt.conv.bias});
            } else if (l->kind == LayerKind::fc) {
                out.push_back({l->name + ".w", &rt.fc.weights});
                out.push_back({l->name + ".b", &rt.fc.bias});
            }
        }
        return out;
    }

    /// Running statistics of every normalization stage, fused or standalone.
    std::vector<ParamRef> fnl_blocks() {
        std::vector<ParamRef> out;
        for (auto& [idx, l] : indexed_layers()) {
            auto& rt = state_[idx];
            if (has_fnl(*l)) {
                out.push_back({l->name + ".mean", &rt.fnl.running_mean});
                out.push_back({l->name + ".var", &rt.fnl.running_var});
            }
        }
        return out;
    }

    ops::FnlState& fnl_state(const std::string& layer_name) {
        return state_[layer_index(layer_name)].fnl;
    }

    bool has_input_mean() const {
        return std::get<InputDef>(desc_.input_layer().params).has_mean;
    }

    const Tensor& input_mean() const {
        for (std::size_t i = 0; i < desc_.layers.size(); ++i)
            if (desc_.layers[i].kind == LayerKind::input) return state_[i].input_mean;
        throw StateError("network: no input layer");
    }

    /// Attaches a training-mean image; it is saved with the model and
    /// subtracted by the preprocessing pipeline, not by forward().
    void set_input_mean(const Tensor& mean) {
        for (std::size_t i = 0; i < desc_.layers.size(); ++i) {
            if (desc_.layers[i].kind != LayerKind::input) continue;
            auto& p = std::get<InputDef>(desc_.layers[i].params);
            validate_mean_shape(mean.shape(), p.shape);
            state_[i].input_mean = mean;
            p.has_mean = true;
            return;
        }
    }

    using EdgeMap = std::map<std::string, Tensor>;

    /// Runs the layers in topological order over a batched input
    /// (N, per-sample dims) and returns every edge's tensor. `labels` is
    /// only consulted by softmax_loss layers.
    EdgeMap forward(const Tensor& input, Mode mode, const std::vector<int>* labels = nullptr) {
        check_input(input);
        EdgeMap edges;
        last_mode_ = mode;
        forward_ran_ = true;
        preacts_.clear();
        const std::int64_t batch = input.shape().dim(0);
        for (std::size_t idx : order_) {
            const LayerDef& l = desc_.layers[idx];
            try {
                const Tensor* in = nullptr;
                if (l.kind != LayerKind::input) in = &edges.at(l.in_edge());
                edges[l.out_edge()] = run_layer(idx, l, in ? *in : input, mode, batch, labels);
            } catch (const Error& e) {
                throw ShapeError("layer '" + l.name + "': " + e.what());
            }
        }
        return edges;
    }

    struct BackwardResult {
        std::map<std::string, Tensor> param_grads;  // layer.w / layer.b
        Tensor input_grad;
    };

    BackwardResult backward(const Tensor& grad) { return backward(terminal_edge(), grad); }

    BackwardResult backward(const std::string& edge, const Tensor& grad) {
        return backward(std::map<std::string, Tensor>{{edge, grad}});
    }

    /// Reverse topological traversal seeded with d(loss)/d(edge) for one
    /// or more edges. Gradients sum where an edge fans out to several
    /// consumers.
    BackwardResult backward(std::map<std::string, Tensor> seed_grads) {
        if (!forward_ran_ || last_mode_ != Mode::train) {
            throw StateError("network: backward requires a preceding train-mode forward");
        }
        for (const auto& [edge, grad] : seed_grads) {
            (void)grad;
            if (!shapes_.count(edge)) throw StateError("network: unknown edge '" + edge + "'");
        }
        BackwardResult result;
        for (const auto& p : trainable_parameters()) {
            result.param_grads.emplace(p.name, Tensor(p.tensor->shape()));
        }
        std::map<std::string, Tensor> edge_grads = std::move(seed_grads);
        for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
            const LayerDef& l = desc_.layers[*it];
            const auto git = edge_grads.find(l.out_edge());
            if (git == edge_grads.end()) continue;  // edge not on the loss path
            Tensor g = std::move(git->second);
            edge_grads.erase(git);
            backward_layer(*it, l, std::move(g), edge_grads, result);
        }
        return result;
    }

    /// Requests a copy of `layer`'s output before its fused activation on
    /// the next forward; read it back with preact().
    void capture_preact(const std::string& layer_name) { preact_taps_.insert(layer_name); }

    const Tensor& preact(const std::string& layer_name) const {
        const auto it = preacts_.find(layer_name);
        if (it == preacts_.end()) {
            throw StateError("network: no captured pre-activation for '" + layer_name + "'");
        }
        return it->second;
    }

private:
    struct LayerRuntime {
        ops::ConvParams conv;
        ops::FcParams fc;
        ops::FnlState fnl;
        Tensor input_mean;
        // train caches
        ops::ConvCache conv_cache;
        ops::FcCache fc_cache;
        ops::PoolCache pool_cache;
        ops::SoftmaxLossCache loss_cache;
        Tensor relu_in;
        Tensor dropout_mask;
        Shape flatten_in;
        ops::FnlStat fnl_stat = ops::FnlStat::per_node;
    };

    std::vector<std::pair<std::size_t, const LayerDef*>> indexed_layers() const {
        std::vector<std::pair<std::size_t, const LayerDef*>> out;
        out.reserve(desc_.layers.size());
        for (std::size_t i = 0; i < desc_.layers.size(); ++i) out.emplace_back(i, &desc_.layers[i]);
        return out;
    }

    static bool has_fnl(const LayerDef& l) {
        if (l.kind == LayerKind::fnl) return true;
        if (l.kind == LayerKind::conv) return std::get<ConvDef>(l.params).norm == NormKind::fnl;
        if (l.kind == LayerKind::fc) return std::get<FcDef>(l.params).norm == NormKind::fnl;
        return false;
    }

    std::size_t layer_index(const std::string& name) const {
        for (std::size_t i = 0; i < desc_.layers.size(); ++i)
            if (desc_.layers[i].name == name) return i;
        throw StateError("network: unknown layer '" + name + "'");
    }

    static void validate_mean_shape(const Shape& mean, const Shape& input) {
        if (mean.rank() != input.rank()) {
            throw ShapeError("mean image rank " + mean.to_string() + " does not match input " +
                             input.to_string());
        }
        if (mean.rank() == 3 &&
            (mean.dim(0) != input.dim(0) || mean.dim(1) < input.dim(1) || mean.dim(2) < input.dim(2))) {
            throw ShapeError("mean image " + mean.to_string() + " incompatible with input " +
                             input.to_string());
        }
        if (mean.rank() != 3 && mean != input) {
            throw ShapeError("mean image " + mean.to_string() + " does not match input " +
                             input.to_string());
        }
    }

    void allocate(std::size_t idx) {
        const LayerDef& l = desc_.layers[idx];
        LayerRuntime& rt = state_[idx];
        const Shape in_shape = l.kind == LayerKind::input ? Shape{} : shapes_.at(l.in_edge());
        switch (l.kind) {
            case LayerKind::conv: {
                const auto& p = std::get<ConvDef>(l.params);
                rt.conv.out_channels = p.filters;
                rt.conv.kh = p.kh;
                rt.conv.kw = p.kw;
                rt.conv.stride = p.stride;
                rt.conv.pad = p.pad;
                rt.conv.groups = p.group;
                rt.conv.weights = Tensor(Shape{p.filters, in_shape.dim(0) / p.group, p.kh, p.kw});
                rt.conv.bias = Tensor(Shape{p.filters});
                if (p.norm == NormKind::fnl) {
                    rt.fnl.init(p.filters);
                    rt.fnl.momentum = p.fnl_momentum;
                    rt.fnl.epsilon = p.fnl_eps;
                    rt.fnl_stat = ops::FnlStat::per_channel;
                }
                break;
            }
            case LayerKind::fc: {
                const auto& p = std::get<FcDef>(l.params);
                rt.fc.weights = Tensor(Shape{in_shape.count(), p.outputs});
                rt.fc.bias = Tensor(Shape{p.outputs});
                if (p.norm == NormKind::fnl) {
                    rt.fnl.init(p.outputs);
                    rt.fnl.momentum = p.fnl_momentum;
                    rt.fnl.epsilon = p.fnl_eps;
                    rt.fnl_stat = ops::FnlStat::per_node;
                }
                break;
            }
            case LayerKind::fnl: {
                const auto& p = std::get<FnlDef>(l.params);
                rt.fnl_stat = resolve_fnl_stat(p.stat, in_shape);
                const std::int64_t nodes =
                    rt.fnl_stat == ops::FnlStat::per_channel ? in_shape.dim(0) : in_shape.count();
                rt.fnl.init(nodes);
                rt.fnl.momentum = p.momentum;
                rt.fnl.epsilon = p.eps;
                break;
            }
            case LayerKind::input: {
                const auto& p = std::get<InputDef>(l.params);
                if (p.has_mean) rt.input_mean = Tensor(p.shape);
                break;
            }
            default:
                break;
        }
    }

    void check_input(const Tensor& input) const {
        const Shape want = desc_.input_shape();
        const Shape& got = input.shape();
        bool ok = got.rank() == want.rank() + 1 && got.dim(0) >= 1;
        if (ok) {
            for (int i = 0; i < want.rank(); ++i) ok = ok && got.dim(i + 1) == want.dim(i);
        }
        if (!ok) {
            throw ShapeError("layer '" + desc_.input_layer().name + "': input " + got.to_string() +
                             " does not match declared shape (N," +
                             want.to_string().substr(1));
        }
    }

    // Batched (N, C, H, W) view of a per-sample rank-3 edge.
    static Tensor as_4d(const Tensor& t) {
        if (t.shape().rank() == 4) return t;
        throw ShapeError("expected a (N,C,H,W) tensor, got " + t.shape().to_string());
    }

    Tensor run_layer(std::size_t idx, const LayerDef& l, const Tensor& in, Mode mode,
                     std::int64_t batch, const std::vector<int>* labels) {
        LayerRuntime& rt = state_[idx];
        const bool train = mode == Mode::train;
        switch (l.kind) {
            case LayerKind::input:
                return in;
            case LayerKind::conv: {
                const auto& p = std::get<ConvDef>(l.params);
                Tensor t = ops::conv_forward(as_4d(in), rt.conv, train ? &rt.conv_cache : nullptr);
                return finish_weight_layer(l.name, rt, std::move(t), p.norm, p.act, mode);
            }
            case LayerKind::fc: {
                const auto& p = std::get<FcDef>(l.params);
                Tensor t = ops::fc_forward(in, rt.fc, train ? &rt.fc_cache : nullptr);
                return finish_weight_layer(l.name, rt, std::move(t), p.norm, p.act, mode);
            }
            case LayerKind::relu: {
                if (train) rt.relu_in = in;
                return ops::relu_forward(in);
            }
            case LayerKind::pool_max:
            case LayerKind::pool_mean: {
                const auto& p = std::get<PoolDef>(l.params);
                ops::PoolParams pp{l.kind == LayerKind::pool_max ? ops::PoolParams::Kind::max
                                                                 : ops::PoolParams::Kind::mean,
                                   p.kh, p.kw, p.stride};
                return ops::pool_forward(as_4d(in), pp, train ? &rt.pool_cache : nullptr);
            }
            case LayerKind::lrn: {
                const auto& p = std::get<LrnDef>(l.params);
                return ops::lrn_forward(as_4d(in), ops::LrnParams{p.size, p.alpha, p.beta, p.k, p.region});
            }
            case LayerKind::dropout: {
                const auto& p = std::get<DropoutDef>(l.params);
                ops::DropoutParams dp{p.ratio, mode, rng_.next_u64()};
                auto r = ops::dropout_forward(in, dp);
                if (train) rt.dropout_mask = std::move(r.mask);
                return std::move(r.out);
            }
            case LayerKind::fnl:
                return ops::fnl_forward(in, rt.fnl, mode, rt.fnl_stat);
            case LayerKind::flatten: {
                rt.flatten_in = in.shape();
                return in.reshaped(Shape{batch, in.count() / batch});
            }
            case LayerKind::softmax_loss: {
                if (!labels) throw StateError("softmax_loss layer needs labels");
                const float loss =
                    ops::softmax_loss_forward(in, *labels, train ? &rt.loss_cache : nullptr);
                return Tensor(Shape{1}, {loss});
            }
        }
        throw StateError("unhandled layer kind");
    }

    Tensor finish_weight_layer(const std::string& name, LayerRuntime& rt, Tensor t, NormKind norm,
                               Activation act, Mode mode) {
        if (norm == NormKind::fnl) t = ops::fnl_forward(t, rt.fnl, mode, rt.fnl_stat);
        if (preact_taps_.count(name)) preacts_[name] = t;
        if (act == Activation::relu) {
            if (mode == Mode::train) rt.relu_in = t;
            return ops::relu_forward(t);
        }
        return t;
    }

    void backward_layer(std::size_t idx, const LayerDef& l, Tensor g,
                        std::map<std::string, Tensor>& edge_grads, BackwardResult& result) {
        LayerRuntime& rt = state_[idx];
        auto add_edge_grad = [&edge_grads](const std::string& edge, Tensor t) {
            auto it = edge_grads.find(edge);
            if (it == edge_grads.end()) {
                edge_grads.emplace(edge, std::move(t));
            } else {
                Tensor& acc = it->second;
                for (std::int64_t i = 0; i < acc.count(); ++i) acc[i] += t[i];
            }
        };
        switch (l.kind) {
            case LayerKind::input:
                if (result.input_grad.empty()) {
                    result.input_grad = std::move(g);
                } else {
                    for (std::int64_t i = 0; i < g.count(); ++i) result.input_grad[i] += g[i];
                }
                return;
            case LayerKind::conv: {
                const auto& p = std::get<ConvDef>(l.params);
                if (p.act == Activation::relu) g = ops::relu_backward(g, rt.relu_in);
                if (p.norm == NormKind::fnl) g = ops::fnl_backward(g, rt.fnl, rt.fnl_stat);
                auto grads = ops::conv_backward(g, rt.conv_cache, rt.conv);
                result.param_grads.at(l.name + ".w") = std::move(grads.grad_w);
                result.param_grads.at(l.name + ".b") = std::move(grads.grad_b);
                add_edge_grad(l.in_edge(), std::move(grads.grad_in));
                return;
            }
            case LayerKind::fc: {
                const auto& p = std::get<FcDef>(l.params);
                if (p.act == Activation::relu) g = ops::relu_backward(g, rt.relu_in);
                if (p.norm == NormKind::fnl) g = ops::fnl_backward(g, rt.fnl, rt.fnl_stat);
                auto grads = ops::fc_backward(g, rt.fc_cache, rt.fc);
                result.param_grads.at(l.name + ".w") = std::move(grads.grad_w);
                result.param_grads.at(l.name + ".b") = std::move(grads.grad_b);
                add_edge_grad(l.in_edge(), std::move(grads.grad_in));
                return;
            }
            case LayerKind::relu:
                add_edge_grad(l.in_edge(), ops::relu_backward(g, rt.relu_in));
                return;
            case LayerKind::pool_max:
            case LayerKind::pool_mean: {
                const auto& p = std::get<PoolDef>(l.params);
                ops::PoolParams pp{l.kind == LayerKind::pool_max ? ops::PoolParams::Kind::max
                                                                 : ops::PoolParams::Kind::mean,
                                   p.kh, p.kw, p.stride};
                add_edge_grad(l.in_edge(), ops::pool_backward(g, pp, rt.pool_cache));
                return;
            }
            case LayerKind::lrn:
                throw StateError("layer '" + l.name + "': lrn has no backward implementation");
            case LayerKind::dropout:
                add_edge_grad(l.in_edge(), ops::dropout_backward(g, rt.dropout_mask));
                return;
            case LayerKind::fnl:
                add_edge_grad(l.in_edge(), ops::fnl_backward(g, rt.fnl, rt.fnl_stat));
                return;
            case LayerKind::flatten:
                add_edge_grad(l.in_edge(), g.reshaped(rt.flatten_in));
                return;
            case LayerKind::softmax_loss: {
                Tensor gl = ops::softmax_loss_backward(rt.loss_cache);
                const float scale = g[0];
                for (auto& v : gl) v *= scale;
                add_edge_grad(l.in_edge(), std::move(gl));
                return;
            }
        }
    }

    NetworkDescriptor desc_;
    std::map<std::string, Shape> shapes_;
    std::vector<std::size_t> order_;
    std::vector<LayerRuntime> state_;
    Rng rng_;
    Mode last_mode_ = Mode::test;
    bool forward_ran_ = false;
    std::set<std::string> preact_taps_;
    std::map<std::string, Tensor> preacts_;
};

}  // namespace vfn::graph
