#pragma once

#include <cstdint>

#include "vfn/im2col.hpp"
#include "vfn/tensor.hpp"

namespace vfn::ops {

struct PoolParams {
    enum class Kind { max, mean };
    Kind kind = Kind::max;
    std::int64_t kh = 0;
    std::int64_t kw = 0;
    std::int64_t stride = 1;

    void validate() const {
        if (kh < 1 || kw < 1) throw ConfigError("pool: kernel must be >= 1");
        if (stride < 1) throw ConfigError("pool: stride must be >= 1");
    }
};

inline Shape pool_shape(const Shape& in, const PoolParams& p) {
    if (in.rank() != 3) throw ShapeError("pool: input must be (C,H,W), got " + in.to_string());
    const std::int64_t ho = conv_out_extent(in.dim(1), p.kh, p.stride, 0, "height");
    const std::int64_t wo = conv_out_extent(in.dim(2), p.kw, p.stride, 0, "width");
    return Shape{in.dim(0), ho, wo};
}

struct PoolCache {
    Shape in_shape;
    BasicTensor<std::int64_t> argmax;  // flat index into the input, max pooling only
};

/// Windows always lie fully inside the input (pad 0, floor arithmetic).
/// Max ties go to the first element in row-major window order.
inline Tensor pool_forward(const Tensor& in, const PoolParams& p, PoolCache* cache = nullptr) {
    if (in.shape().rank() != 4) {
        throw ShapeError("pool: input must be (N,C,H,W), got " + in.shape().to_string());
    }
    p.validate();
    const std::int64_t n = in.shape().dim(0);
    const std::int64_t c = in.shape().dim(1);
    const std::int64_t h = in.shape().dim(2);
    const std::int64_t w = in.shape().dim(3);
    const Shape per_sample = pool_shape(Shape{c, h, w}, p);
    const std::int64_t ho = per_sample.dim(1);
    const std::int64_t wo = per_sample.dim(2);

    Tensor out(Shape{n, c, ho, wo});
    BasicTensor<std::int64_t> argmax;
    const bool is_max = p.kind == PoolParams::Kind::max;
    if (is_max && cache) argmax = BasicTensor<std::int64_t>(out.shape());
    const float inv_area = 1.0f / static_cast<float>(p.kh * p.kw);

    std::int64_t o = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t ch = 0; ch < c; ++ch) {
            const float* plane = in.data() + (i * c + ch) * h * w;
            const std::int64_t plane_ofs = (i * c + ch) * h * w;
            for (std::int64_t oh = 0; oh < ho; ++oh) {
                for (std::int64_t ow = 0; ow < wo; ++ow, ++o) {
                    const std::int64_t h0 = oh * p.stride;
                    const std::int64_t w0 = ow * p.stride;
                    if (is_max) {
                        float best = plane[h0 * w + w0];
                        std::int64_t best_idx = h0 * w + w0;
                        for (std::int64_t ki = 0; ki < p.kh; ++ki) {
                            for (std::int64_t kj = 0; kj < p.kw; ++kj) {
                                const std::int64_t idx = (h0 + ki) * w + (w0 + kj);
                                if (plane[idx] > best) {
                                    best = plane[idx];
                                    best_idx = idx;
                                }
                            }
                        }
                        out[o] = best;
                        if (cache) argmax[o] = plane_ofs + best_idx;
                    } else {
                        float s = 0.0f;
                        for (std::int64_t ki = 0; ki < p.kh; ++ki)
                            for (std::int64_t kj = 0; kj < p.kw; ++kj)
                                s += plane[(h0 + ki) * w + (w0 + kj)];
                        out[o] = s * inv_area;
                    }
                }
            }
        }
    }
    if (cache) {
        cache->in_shape = in.shape();
        cache->argmax = std::move(argmax);
    }
    return out;
}

/// Max routes each output gradient to its recorded argmax; mean spreads
/// grad/(kh*kw) uniformly over the window.
inline Tensor pool_backward(const Tensor& grad_out, const PoolParams& p, const PoolCache& cache) {
    if (cache.in_shape.empty()) throw StateError("pool: backward before forward");
    Tensor grad_in(cache.in_shape);
    const std::int64_t n = cache.in_shape.dim(0);
    const std::int64_t c = cache.in_shape.dim(1);
    const std::int64_t h = cache.in_shape.dim(2);
    const std::int64_t w = cache.in_shape.dim(3);
    const Shape per_sample = pool_shape(Shape{c, h, w}, p);
    const std::int64_t ho = per_sample.dim(1);
    const std::int64_t wo = per_sample.dim(2);
    if (grad_out.shape() != Shape{n, c, ho, wo}) {
        throw ShapeError("pool: grad shape " + grad_out.shape().to_string() + " does not match " +
                         Shape{n, c, ho, wo}.to_string());
    }

    if (p.kind == PoolParams::Kind::max) {
        if (cache.argmax.shape() != grad_out.shape()) {
            throw StateError("pool: argmax cache missing or stale");
        }
        for (std::int64_t o = 0; o < grad_out.count(); ++o) grad_in[cache.argmax[o]] += grad_out[o];
        return grad_in;
    }

    const float inv_area = 1.0f / static_cast<float>(p.kh * p.kw);
    std::int64_t o = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t ch = 0; ch < c; ++ch) {
            float* plane = grad_in.data() + (i * c + ch) * h * w;
            for (std::int64_t oh = 0; oh < ho; ++oh) {
                for (std::int64_t ow = 0; ow < wo; ++ow, ++o) {
                    const float g = grad_out[o] * inv_area;
                    for (std::int64_t ki = 0; ki < p.kh; ++ki)
                        for (std::int64_t kj = 0; kj < p.kw; ++kj)
                            plane[(oh * p.stride + ki) * w + (ow * p.stride + kj)] += g;
                }
            }
        }
    }
    return grad_in;
}

}  // namespace vfn::ops
