#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vfn/graph/descriptor.hpp"

namespace vfn::graph {

/// Per-layer cost sheet. Multiply-accumulate counts are exact integers;
/// only conv and fc layers contribute to the headline total. Other layers
/// report their elementwise operation count separately.
struct LayerCost {
    std::string name;
    LayerKind kind = LayerKind::input;
    Shape out_shape;         // per sample
    std::int64_t macs = 0;   // conv/fc only
    std::int64_t aux_ops = 0;
    std::int64_t params = 0;
    bool headline = false;
};

struct FlopReport {
    std::vector<LayerCost> layers;
    std::int64_t total_macs = 0;  // sum over headline layers
};

/// Costs of `d` evaluated at `input_shape` (which may differ from the
/// descriptor's declared shape, e.g. for crop sweeps).
inline FlopReport count_flops(const NetworkDescriptor& d, const Shape& input_shape) {
    NetworkDescriptor scaled = d;
    for (auto& l : scaled.layers) {
        if (l.kind == LayerKind::input) std::get<InputDef>(l.params).shape = input_shape;
    }
    const auto shapes = propagate_shapes(scaled);

    FlopReport report;
    for (const auto& l : scaled.layers) {
        LayerCost cost;
        cost.name = l.name;
        cost.kind = l.kind;
        cost.out_shape = shapes.at(l.out_edge());
        const Shape in =
            l.kind == LayerKind::input ? Shape{} : shapes.at(l.in_edge());
        switch (l.kind) {
            case LayerKind::conv: {
                const auto& p = std::get<ConvDef>(l.params);
                const std::int64_t per_output = (in.dim(0) / p.group) * p.kh * p.kw;
                cost.macs = p.filters * per_output * cost.out_shape.dim(1) * cost.out_shape.dim(2);
                cost.params = p.filters * per_output + p.filters;
                cost.headline = true;
                break;
            }
            case LayerKind::fc: {
                const auto& p = std::get<FcDef>(l.params);
                cost.macs = in.count() * p.outputs;
                cost.params = in.count() * p.outputs + p.outputs;
                cost.headline = true;
                break;
            }
            case LayerKind::pool_max:
            case LayerKind::pool_mean: {
                const auto& p = std::get<PoolDef>(l.params);
                cost.aux_ops = cost.out_shape.count() * p.kh * p.kw;
                break;
            }
            case LayerKind::lrn: {
                const auto& p = std::get<LrnDef>(l.params);
                const std::int64_t window =
                    p.region == ops::LrnParams::Region::within_channel ? p.size * p.size : p.size;
                cost.aux_ops = cost.out_shape.count() * window;
                break;
            }
            case LayerKind::relu:
            case LayerKind::dropout:
                cost.aux_ops = cost.out_shape.count();
                break;
            case LayerKind::fnl:
                cost.aux_ops = 2 * cost.out_shape.count();
                break;
            case LayerKind::softmax_loss:
                cost.aux_ops = in.count();
                break;
            case LayerKind::input:
            case LayerKind::flatten:
                break;
        }
        if (cost.headline) report.total_macs += cost.macs;
        report.layers.push_back(std::move(cost));
    }
    return report;
}

}  // namespace vfn::graph
