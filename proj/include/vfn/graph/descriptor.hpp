#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "vfn/im2col.hpp"
#include "vfn/ops/fnl.hpp"
#include "vfn/ops/lrn.hpp"
#include "vfn/shape.hpp"

namespace vfn::graph {

enum class LayerKind {
    input,
    conv,
    relu,
    lrn,
    pool_max,
    pool_mean,
    fc,
    dropout,
    fnl,
    softmax_loss,
    flatten,
};

inline const char* kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::input: return "input";
        case LayerKind::conv: return "conv";
        case LayerKind::relu: return "relu";
        case LayerKind::lrn: return "lrn";
        case LayerKind::pool_max: return "pool_max";
        case LayerKind::pool_mean: return "pool_mean";
        case LayerKind::fc: return "fc";
        case LayerKind::dropout: return "dropout";
        case LayerKind::fnl: return "fnl";
        case LayerKind::softmax_loss: return "softmax_loss";
        case LayerKind::flatten: return "flatten";
    }
    return "?";
}

inline std::optional<LayerKind> kind_from_name(const std::string& s) {
    static const std::map<std::string, LayerKind> table = {
        {"input", LayerKind::input},       {"conv", LayerKind::conv},
        {"relu", LayerKind::relu},         {"lrn", LayerKind::lrn},
        {"pool_max", LayerKind::pool_max}, {"pool_mean", LayerKind::pool_mean},
        {"fc", LayerKind::fc},             {"dropout", LayerKind::dropout},
        {"fnl", LayerKind::fnl},           {"softmax_loss", LayerKind::softmax_loss},
        {"flatten", LayerKind::flatten},
    };
    const auto it = table.find(s);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

enum class Activation { none, relu };
enum class NormKind { none, fnl };
enum class FnlStatChoice { auto_select, channel, node };

struct InputDef {
    Shape shape;
    bool has_mean = false;  // a mean-image block travels with the model
    bool operator==(const InputDef&) const = default;
};

/// A conv layer is a pipeline of commands: convolution, then an optional
/// fast-normalization stage, then an optional ReLU.
struct ConvDef {
    std::int64_t filters = 0;
    std::int64_t kh = 0;
    std::int64_t kw = 0;
    std::int64_t stride = 1;
    std::int64_t pad = 0;
    std::int64_t group = 1;
    Activation act = Activation::none;
    NormKind norm = NormKind::none;
    float fnl_momentum = 0.99f;
    float fnl_eps = 1e-5f;
    bool operator==(const ConvDef&) const = default;
};

struct PoolDef {
    std::int64_t kh = 0;
    std::int64_t kw = 0;
    std::int64_t stride = 1;
    bool operator==(const PoolDef&) const = default;
};

struct FcDef {
    std::int64_t outputs = 0;
    Activation act = Activation::none;
    NormKind norm = NormKind::none;
    float fnl_momentum = 0.99f;
    float fnl_eps = 1e-5f;
    bool operator==(const FcDef&) const = default;
};

struct DropoutDef {
    float ratio = 0.5f;
    bool operator==(const DropoutDef&) const = default;
};

struct FnlDef {
    float momentum = 0.99f;
    float eps = 1e-5f;
    FnlStatChoice stat = FnlStatChoice::auto_select;
    bool operator==(const FnlDef&) const = default;
};

struct LrnDef {
    std::int64_t size = 5;
    float alpha = 1e-4f;
    float beta = 0.75f;
    float k = 1.0f;
    ops::LrnParams::Region region = ops::LrnParams::Region::within_channel;
    bool operator==(const LrnDef&) const = default;
};

struct EmptyDef {
    bool operator==(const EmptyDef&) const = default;
};

using LayerParams =
    std::variant<InputDef, ConvDef, PoolDef, FcDef, DropoutDef, FnlDef, LrnDef, EmptyDef>;

struct LayerDef {
    std::string name;
    LayerKind kind = LayerKind::input;
    LayerParams params = EmptyDef{};
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    bool operator==(const LayerDef&) const = default;

    const std::string& in_edge() const { return inputs.at(0); }
    const std::string& out_edge() const { return outputs.at(0); }
};

struct NetworkDescriptor {
    std::vector<LayerDef> layers;
    std::string feature_edge;
    bool operator==(const NetworkDescriptor&) const = default;

    const LayerDef* find_layer(const std::string& name) const {
        for (const auto& l : layers)
            if (l.name == name) return &l;
        return nullptr;
    }

    const LayerDef& input_layer() const {
        for (const auto& l : layers)
            if (l.kind == LayerKind::input) return l;
        throw DataError("descriptor: no input layer");
    }

    Shape input_shape() const { return std::get<InputDef>(input_layer().params).shape; }
};

/// Effective statistic granularity of a standalone fnl layer for a given
/// per-sample input shape.
inline ops::FnlStat resolve_fnl_stat(FnlStatChoice choice, const Shape& per_sample_in) {
    switch (choice) {
        case FnlStatChoice::channel: return ops::FnlStat::per_channel;
        case FnlStatChoice::node: return ops::FnlStat::per_node;
        case FnlStatChoice::auto_select:
            return per_sample_in.rank() == 3 ? ops::FnlStat::per_channel : ops::FnlStat::per_node;
    }
    return ops::FnlStat::per_node;
}

// ---------------------------------------------------------------------------
// Topological ordering
// ---------------------------------------------------------------------------

/// Kahn's algorithm with ties broken by declaration order. Throws on
/// unproduced edges, duplicate producers, and cycles (naming the layers
/// still stuck on the cycle).
inline std::vector<std::size_t> topo_order(const NetworkDescriptor& d) {
    std::map<std::string, std::size_t> producer;
    for (std::size_t i = 0; i < d.layers.size(); ++i) {
        for (const auto& e : d.layers[i].outputs) {
            if (!producer.emplace(e, i).second) {
                throw ParseError("descriptor: edge '" + e + "' produced more than once");
            }
        }
    }
    std::vector<std::size_t> indegree(d.layers.size(), 0);
    std::vector<std::vector<std::size_t>> consumers(d.layers.size());
    for (std::size_t i = 0; i < d.layers.size(); ++i) {
        for (const auto& e : d.layers[i].inputs) {
            const auto it = producer.find(e);
            if (it == producer.end()) {
                throw ParseError("descriptor: layer '" + d.layers[i].name + "' consumes edge '" +
                                 e + "' that no layer produces");
            }
            consumers[it->second].push_back(i);
            ++indegree[i];
        }
    }
    std::set<std::size_t> ready;
    for (std::size_t i = 0; i < d.layers.size(); ++i)
        if (indegree[i] == 0) ready.insert(i);
    std::vector<std::size_t> order;
    order.reserve(d.layers.size());
    while (!ready.empty()) {
        const std::size_t i = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(i);
        for (std::size_t c : consumers[i]) {
            if (--indegree[c] == 0) ready.insert(c);
        }
    }
    if (order.size() != d.layers.size()) {
        std::string names;
        for (std::size_t i = 0; i < d.layers.size(); ++i) {
            if (indegree[i] > 0) {
                if (!names.empty()) names += ", ";
                names += d.layers[i].name;
            }
        }
        throw ParseError("descriptor: cycle detected through layers: " + names);
    }
    return order;
}

// ---------------------------------------------------------------------------
// Shape propagation (per-sample shapes, batch dimension excluded)
// ---------------------------------------------------------------------------

inline Shape layer_output_shape(const LayerDef& l, const Shape& in) {
    switch (l.kind) {
        case LayerKind::input:
            return std::get<InputDef>(l.params).shape;
        case LayerKind::conv: {
            const auto& p = std::get<ConvDef>(l.params);
            if (in.rank() != 3) {
                throw ShapeError("conv needs a (C,H,W) input, got " + in.to_string());
            }
            if (p.filters < 1 || p.kh < 1 || p.kw < 1) throw ConfigError("conv: bad kernel spec");
            if (p.stride < 1 || p.pad < 0 || p.group < 1) throw ConfigError("conv: bad geometry");
            if (in.dim(0) % p.group != 0 || p.filters % p.group != 0) {
                throw ShapeError("conv: group " + std::to_string(p.group) +
                                 " must divide channels " + std::to_string(in.dim(0)) + " and " +
                                 std::to_string(p.filters));
            }
            const std::int64_t ho = conv_out_extent(in.dim(1), p.kh, p.stride, p.pad, "height");
            const std::int64_t wo = conv_out_extent(in.dim(2), p.kw, p.stride, p.pad, "width");
            return Shape{p.filters, ho, wo};
        }
        case LayerKind::pool_max:
        case LayerKind::pool_mean: {
            const auto& p = std::get<PoolDef>(l.params);
            if (in.rank() != 3) {
                throw ShapeError("pool needs a (C,H,W) input, got " + in.to_string());
            }
            if (p.kh < 1 || p.kw < 1 || p.stride < 1) throw ConfigError("pool: bad geometry");
            const std::int64_t ho = conv_out_extent(in.dim(1), p.kh, p.stride, 0, "height");
            const std::int64_t wo = conv_out_extent(in.dim(2), p.kw, p.stride, 0, "width");
            return Shape{in.dim(0), ho, wo};
        }
        case LayerKind::lrn:
            if (in.rank() != 3) throw ShapeError("lrn needs a (C,H,W) input, got " + in.to_string());
            return in;
        case LayerKind::relu:
        case LayerKind::dropout:
        case LayerKind::fnl:
            return in;
        case LayerKind::flatten:
            return Shape{in.count()};
        case LayerKind::fc: {
            const auto& p = std::get<FcDef>(l.params);
            if (p.outputs < 1) throw ConfigError("fc: outputs must be >= 1");
            return Shape{p.outputs};
        }
        case LayerKind::softmax_loss:
            if (in.rank() != 1) {
                throw ShapeError("softmax_loss needs a flat logit input, got " + in.to_string());
            }
            return Shape{1};
    }
    throw StateError("unhandled layer kind");
}

/// Walks the graph in topological order and returns every edge's
/// per-sample shape. Errors are tagged with the failing layer's name.
inline std::map<std::string, Shape> propagate_shapes(const NetworkDescriptor& d) {
    const auto order = topo_order(d);
    std::map<std::string, Shape> shapes;
    for (std::size_t idx : order) {
        const LayerDef& l = d.layers[idx];
        try {
            Shape in;
            if (l.kind != LayerKind::input) {
                if (l.inputs.size() != 1) {
                    throw ShapeError("expects exactly one input edge, got " +
                                     std::to_string(l.inputs.size()));
                }
                in = shapes.at(l.in_edge());
            } else if (!l.inputs.empty()) {
                throw ShapeError("input layer cannot consume edges");
            }
            if (l.outputs.size() != 1) {
                throw ShapeError("expects exactly one output edge, got " +
                                 std::to_string(l.outputs.size()));
            }
            shapes[l.out_edge()] = layer_output_shape(l, in);
        } catch (const Error& e) {
            throw ShapeError("layer '" + l.name + "': " + e.what());
        }
    }
    return shapes;
}

/// Structural and shape validation of a descriptor; returns the
/// propagated shapes so callers can reuse them.
inline std::map<std::string, Shape> validate(const NetworkDescriptor& d) {
    if (d.layers.empty()) throw ParseError("descriptor: no layers");
    std::set<std::string> names;
    std::size_t input_count = 0;
    for (const auto& l : d.layers) {
        if (l.name.empty()) throw ParseError("descriptor: empty layer name");
        if (!names.insert(l.name).second) {
            throw ParseError("descriptor: duplicate layer name '" + l.name + "'");
        }
        if (l.kind == LayerKind::input) ++input_count;
    }
    if (input_count != 1) {
        throw ParseError("descriptor: expected exactly one input layer, found " +
                         std::to_string(input_count));
    }
    auto shapes = propagate_shapes(d);
    if (!d.feature_edge.empty() && !shapes.count(d.feature_edge)) {
        throw ParseError("descriptor: feature edge '" + d.feature_edge + "' is not produced");
    }
    return shapes;
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------
//
//   # comment
//   layer <name> <kind> key=value... in=<edge>[,<edge>...] out=<edge>
//   feature <edge>
//
// Unknown kinds and keys are fatal, with the offending line number.

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

struct LineError {
    int line;
    std::string msg;
};

inline std::int64_t parse_int(const std::string& v, int line, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw LineError{line, "invalid integer '" + v + "' for " + key};
    }
}

inline float parse_float(const std::string& v, int line, const std::string& key) {
    try {
        std::size_t pos = 0;
        const float x = std::stof(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw LineError{line, "invalid number '" + v + "' for " + key};
    }
}

// kernel=3 or kernel=3x5
inline std::pair<std::int64_t, std::int64_t> parse_kernel(const std::string& v, int line) {
    const auto x = v.find('x');
    if (x == std::string::npos) {
        const std::int64_t k = parse_int(v, line, "kernel");
        return {k, k};
    }
    return {parse_int(v.substr(0, x), line, "kernel"), parse_int(v.substr(x + 1), line, "kernel")};
}

inline std::string fmt_float(float v) {
    std::ostringstream os;
    os.precision(9);  // round-trips binary32 exactly
    os << v;
    return os.str();
}

}  // namespace detail

inline NetworkDescriptor parse_descriptor(const std::string& text) {
    NetworkDescriptor d;
    std::istringstream is(text);
    std::string raw;
    int line_no = 0;
    try {
        while (std::getline(is, raw)) {
            ++line_no;
            const auto hash = raw.find('#');
            const std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
            const auto toks = detail::split_ws(line);
            if (toks.empty()) continue;

            if (toks[0] == "feature") {
                if (toks.size() != 2) throw detail::LineError{line_no, "feature expects one edge"};
                if (!d.feature_edge.empty()) {
                    throw detail::LineError{line_no, "feature edge declared twice"};
                }
                d.feature_edge = toks[1];
                continue;
            }
            if (toks[0] != "layer") {
                throw detail::LineError{line_no, "expected 'layer' or 'feature', got '" + toks[0] + "'"};
            }
            if (toks.size() < 3) {
                throw detail::LineError{line_no, "layer needs a name and a kind"};
            }
            LayerDef l;
            l.name = toks[1];
            const auto kind = kind_from_name(toks[2]);
            if (!kind) throw detail::LineError{line_no, "unknown layer kind '" + toks[2] + "'"};
            l.kind = *kind;
            for (const auto& existing : d.layers) {
                if (existing.name == l.name) {
                    throw detail::LineError{line_no, "duplicate layer name '" + l.name + "'"};
                }
            }

            std::map<std::string, std::string> kv;
            for (std::size_t t = 3; t < toks.size(); ++t) {
                const auto eq = toks[t].find('=');
                if (eq == std::string::npos || eq == 0) {
                    throw detail::LineError{line_no, "expected key=value, got '" + toks[t] + "'"};
                }
                const std::string key = toks[t].substr(0, eq);
                const std::string val = toks[t].substr(eq + 1);
                if (!kv.emplace(key, val).second) {
                    throw detail::LineError{line_no, "key '" + key + "' given twice"};
                }
            }
            auto take = [&](const char* key) -> std::optional<std::string> {
                auto it = kv.find(key);
                if (it == kv.end()) return std::nullopt;
                std::string v = it->second;
                kv.erase(it);
                return v;
            };

            if (auto v = take("in")) l.inputs = detail::split_list(*v);
            if (auto v = take("out")) {
                l.outputs = detail::split_list(*v);
            } else {
                l.outputs = {l.name};
            }

            auto parse_act = [&](const std::string& v) {
                if (v == "none") return Activation::none;
                if (v == "relu") return Activation::relu;
                throw detail::LineError{line_no, "unknown activation '" + v + "'"};
            };
            auto parse_norm = [&](const std::string& v) {
                if (v == "none") return NormKind::none;
                if (v == "fnl") return NormKind::fnl;
                throw detail::LineError{line_no, "unknown norm '" + v + "'"};
            };

            switch (l.kind) {
                case LayerKind::input: {
                    InputDef p;
                    auto shape = take("shape");
                    if (!shape) throw detail::LineError{line_no, "input needs shape=C,H,W"};
                    std::vector<std::int64_t> dims;
                    for (const auto& part : detail::split_list(*shape))
                        dims.push_back(detail::parse_int(part, line_no, "shape"));
                    try {
                        p.shape = Shape(dims);
                    } catch (const Error& e) {
                        throw detail::LineError{line_no, e.what()};
                    }
                    if (auto v = take("mean")) p.has_mean = detail::parse_int(*v, line_no, "mean") != 0;
                    l.params = p;
                    break;
                }
                case LayerKind::conv: {
                    ConvDef p;
                    auto filters = take("filters");
                    auto kernel = take("kernel");
                    if (!filters || !kernel) {
                        throw detail::LineError{line_no, "conv needs filters= and kernel="};
                    }
                    p.filters = detail::parse_int(*filters, line_no, "filters");
                    std::tie(p.kh, p.kw) = detail::parse_kernel(*kernel, line_no);
                    if (auto v = take("stride")) p.stride = detail::parse_int(*v, line_no, "stride");
                    if (auto v = take("pad")) p.pad = detail::parse_int(*v, line_no, "pad");
                    if (auto v = take("group")) p.group = detail::parse_int(*v, line_no, "group");
                    if (auto v = take("act")) p.act = parse_act(*v);
                    if (auto v = take("norm")) p.norm = parse_norm(*v);
                    if (auto v = take("fnl_momentum")) p.fnl_momentum = detail::parse_float(*v, line_no, "fnl_momentum");
                    if (auto v = take("fnl_eps")) p.fnl_eps = detail::parse_float(*v, line_no, "fnl_eps");
                    l.params = p;
                    break;
                }
                case LayerKind::pool_max:
                case LayerKind::pool_mean: {
                    PoolDef p;
                    auto kernel = take("kernel");
                    if (!kernel) throw detail::LineError{line_no, "pool needs kernel="};
                    std::tie(p.kh, p.kw) = detail::parse_kernel(*kernel, line_no);
                    if (auto v = take("stride")) p.stride = detail::parse_int(*v, line_no, "stride");
                    l.params = p;
                    break;
                }
                case LayerKind::fc: {
                    FcDef p;
                    auto outputs = take("outputs");
                    if (!outputs) throw detail::LineError{line_no, "fc needs outputs="};
                    p.outputs = detail::parse_int(*outputs, line_no, "outputs");
                    if (auto v = take("act")) p.act = parse_act(*v);
                    if (auto v = take("norm")) p.norm = parse_norm(*v);
                    if (auto v = take("fnl_momentum")) p.fnl_momentum = detail::parse_float(*v, line_no, "fnl_momentum");
                    if (auto v = take("fnl_eps")) p.fnl_eps = detail::parse_float(*v, line_no, "fnl_eps");
                    l.params = p;
                    break;
                }
                case LayerKind::dropout: {
                    DropoutDef p;
                    if (auto v = take("ratio")) p.ratio = detail::parse_float(*v, line_no, "ratio");
                    if (!(p.ratio >= 0.0f) || p.ratio >= 1.0f) {
                        throw detail::LineError{line_no, "dropout ratio must lie in [0,1)"};
                    }
                    l.params = p;
                    break;
                }
                case LayerKind::fnl: {
                    FnlDef p;
                    if (auto v = take("momentum")) p.momentum = detail::parse_float(*v, line_no, "momentum");
                    if (auto v = take("eps")) p.eps = detail::parse_float(*v, line_no, "eps");
                    if (auto v = take("stat")) {
                        if (*v == "auto") p.stat = FnlStatChoice::auto_select;
                        else if (*v == "channel") p.stat = FnlStatChoice::channel;
                        else if (*v == "node") p.stat = FnlStatChoice::node;
                        else throw detail::LineError{line_no, "unknown stat '" + *v + "'"};
                    }
                    if (!(p.momentum > 0.0f && p.momentum < 1.0f)) {
                        throw detail::LineError{line_no, "fnl momentum must lie in (0,1)"};
                    }
                    l.params = p;
                    break;
                }
                case LayerKind::lrn: {
                    LrnDef p;
                    if (auto v = take("size")) p.size = detail::parse_int(*v, line_no, "size");
                    if (auto v = take("alpha")) p.alpha = detail::parse_float(*v, line_no, "alpha");
                    if (auto v = take("beta")) p.beta = detail::parse_float(*v, line_no, "beta");
                    if (auto v = take("k")) p.k = detail::parse_float(*v, line_no, "k");
                    if (auto v = take("region")) {
                        if (*v == "within") p.region = ops::LrnParams::Region::within_channel;
                        else if (*v == "across") p.region = ops::LrnParams::Region::across_channels;
                        else throw detail::LineError{line_no, "unknown region '" + *v + "'"};
                    }
                    l.params = p;
                    break;
                }
                case LayerKind::relu:
                case LayerKind::softmax_loss:
                case LayerKind::flatten:
                    l.params = EmptyDef{};
                    break;
            }
            if (!kv.empty()) {
                throw detail::LineError{line_no, "unknown key '" + kv.begin()->first + "' for kind " +
                                                     kind_name(l.kind)};
            }
            if (l.kind == LayerKind::input && !l.inputs.empty()) {
                throw detail::LineError{line_no, "input layer cannot take in="};
            }
            if (l.kind != LayerKind::input && l.inputs.empty()) {
                throw detail::LineError{line_no, "layer '" + l.name + "' needs in="};
            }
            d.layers.push_back(std::move(l));
        }
    } catch (const detail::LineError& e) {
        throw ParseError("line " + std::to_string(e.line) + ": " + e.msg);
    }
    validate(d);
    return d;
}

inline std::string serialize_descriptor(const NetworkDescriptor& d) {
    std::ostringstream os;
    for (const auto& l : d.layers) {
        os << "layer " << l.name << ' ' << kind_name(l.kind);
        switch (l.kind) {
            case LayerKind::input: {
                const auto& p = std::get<InputDef>(l.params);
                os << " shape=";
                for (int i = 0; i < p.shape.rank(); ++i) {
                    if (i) os << ',';
                    os << p.shape.dim(i);
                }
                if (p.has_mean) os << " mean=1";
                break;
            }
            case LayerKind::conv: {
                const auto& p = std::get<ConvDef>(l.params);
                os << " filters=" << p.filters << " kernel=" << p.kh << 'x' << p.kw
                   << " stride=" << p.stride << " pad=" << p.pad << " group=" << p.group;
                if (p.act == Activation::relu) os << " act=relu";
                if (p.norm == NormKind::fnl) {
                    os << " norm=fnl fnl_momentum=" << detail::fmt_float(p.fnl_momentum)
                       << " fnl_eps=" << detail::fmt_float(p.fnl_eps);
                }
                break;
            }
            case LayerKind::pool_max:
            case LayerKind::pool_mean: {
                const auto& p = std::get<PoolDef>(l.params);
                os << " kernel=" << p.kh << 'x' << p.kw << " stride=" << p.stride;
                break;
            }
            case LayerKind::fc: {
                const auto& p = std::get<FcDef>(l.params);
                os << " outputs=" << p.outputs;
                if (p.act == Activation::relu) os << " act=relu";
                if (p.norm == NormKind::fnl) {
                    os << " norm=fnl fnl_momentum=" << detail::fmt_float(p.fnl_momentum)
                       << " fnl_eps=" << detail::fmt_float(p.fnl_eps);
                }
                break;
            }
            case LayerKind::dropout: {
                os << " ratio=" << detail::fmt_float(std::get<DropoutDef>(l.params).ratio);
                break;
            }
            case LayerKind::fnl: {
                const auto& p = std::get<FnlDef>(l.params);
                os << " momentum=" << detail::fmt_float(p.momentum)
                   << " eps=" << detail::fmt_float(p.eps) << " stat=";
                switch (p.stat) {
                    case FnlStatChoice::auto_select: os << "auto"; break;
                    case FnlStatChoice::channel: os << "channel"; break;
                    case FnlStatChoice::node: os << "node"; break;
                }
                break;
            }
            case LayerKind::lrn: {
                const auto& p = std::get<LrnDef>(l.params);
                os << " size=" << p.size << " alpha=" << detail::fmt_float(p.alpha)
                   << " beta=" << detail::fmt_float(p.beta) << " k=" << detail::fmt_float(p.k)
                   << " region="
                   << (p.region == ops::LrnParams::Region::within_channel ? "within" : "across");
                break;
            }
            case LayerKind::relu:
            case LayerKind::softmax_loss:
            case LayerKind::flatten:
                break;
        }
        if (!l.inputs.empty()) {
            os << " in=";
            for (std::size_t i = 0; i < l.inputs.size(); ++i) {
                if (i) os << ',';
                os << l.inputs[i];
            }
        }
        os << " out=";
        for (std::size_t i = 0; i < l.outputs.size(); ++i) {
            if (i) os << ',';
            os << l.outputs[i];
        }
        os << '\n';
    }
    if (!d.feature_edge.empty()) os << "feature " << d.feature_edge << '\n';
    return os.str();
}

}  // namespace vfn::graph
