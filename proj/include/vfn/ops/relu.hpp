#pragma once

#include "vfn/tensor.hpp"

namespace vfn::ops {

inline Tensor relu_forward(const Tensor& in) {
    Tensor out(in.shape());
    for (std::int64_t i = 0; i < in.count(); ++i) out[i] = in[i] > 0.0f ? in[i] : 0.0f;
    return out;
}

/// Gradient gate: passes grad where the cached input was > 0 (0 at x == 0).
inline Tensor relu_backward(const Tensor& grad_out, const Tensor& cached_in) {
    if (grad_out.shape() != cached_in.shape()) {
        throw ShapeError("relu: grad shape " + grad_out.shape().to_string() +
                         " does not match input " + cached_in.shape().to_string());
    }
    Tensor out(grad_out.shape());
    for (std::int64_t i = 0; i < grad_out.count(); ++i)
        out[i] = cached_in[i] > 0.0f ? grad_out[i] : 0.0f;
    return out;
}

}  // namespace vfn::ops
