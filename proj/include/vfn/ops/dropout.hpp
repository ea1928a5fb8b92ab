#pragma once

#include <cstdint>
#include <utility>

#include "vfn/rng.hpp"
#include "vfn/tensor.hpp"

namespace vfn::ops {

struct DropoutParams {
    float ratio = 0.5f;
    Mode mode = Mode::train;
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (!(ratio >= 0.0f) || ratio >= 1.0f) {
            throw ConfigError("dropout: ratio must lie in [0,1), got " + std::to_string(ratio));
        }
    }
};

struct DropoutResult {
    Tensor out;
    Tensor mask;  // per element: 0 (dropped) or 1/(1-ratio) (kept)
};

/// Inverted dropout: survivors are scaled by 1/(1-ratio) at train time so
/// test mode is an exact identity.
inline DropoutResult dropout_forward(const Tensor& in, const DropoutParams& p) {
    p.validate();
    if (p.mode == Mode::test || p.ratio == 0.0f) {
        Tensor mask(in.shape(), 1.0f);
        return {in, std::move(mask)};
    }
    Rng rng(p.rng_seed);
    const float keep_scale = 1.0f / (1.0f - p.ratio);
    Tensor out(in.shape());
    Tensor mask(in.shape());
    for (std::int64_t i = 0; i < in.count(); ++i) {
        const bool drop = rng.uniform() < static_cast<double>(p.ratio);
        mask[i] = drop ? 0.0f : keep_scale;
        out[i] = in[i] * mask[i];
    }
    return {std::move(out), std::move(mask)};
}

inline Tensor dropout_backward(const Tensor& grad_out, const Tensor& mask) {
    if (grad_out.shape() != mask.shape()) {
        throw ShapeError("dropout: grad shape " + grad_out.shape().to_string() +
                         " does not match mask " + mask.shape().to_string());
    }
    Tensor out(grad_out.shape());
    for (std::int64_t i = 0; i < grad_out.count(); ++i) out[i] = grad_out[i] * mask[i];
    return out;
}

}  // namespace vfn::ops
