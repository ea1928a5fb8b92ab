#pragma once

#include <cstdint>

#include "vfn/gemm.hpp"
#include "vfn/im2col.hpp"
#include "vfn/tensor.hpp"

namespace vfn::ops {

/// Cross-correlation parameters plus bound filters. Weights are laid out
/// (out_channels, in_channels/groups, kh, kw); group g consumes input
/// channels [g*Cin/G, (g+1)*Cin/G) and produces the matching output slice.
struct ConvParams {
    std::int64_t out_channels = 0;
    std::int64_t kh = 0;
    std::int64_t kw = 0;
    std::int64_t stride = 1;
    std::int64_t pad = 0;
    std::int64_t groups = 1;
    Tensor weights;
    Tensor bias;

    std::int64_t in_channels() const { return weights.shape().dim(1) * groups; }

    void validate(std::int64_t input_channels) const {
        if (stride < 1) throw ConfigError("conv: stride must be >= 1");
        if (pad < 0) throw ConfigError("conv: pad must be >= 0");
        if (groups < 1) throw ConfigError("conv: groups must be >= 1");
        if (out_channels % groups != 0 || input_channels % groups != 0) {
            throw ShapeError("conv: groups=" + std::to_string(groups) +
                             " must divide in/out channels (" + std::to_string(input_channels) +
                             "/" + std::to_string(out_channels) + ")");
        }
        const Shape expect{out_channels, input_channels / groups, kh, kw};
        if (weights.shape() != expect) {
            throw ShapeError("conv: weight shape " + weights.shape().to_string() +
                             " does not match " + expect.to_string());
        }
        if (bias.shape() != Shape{out_channels}) {
            throw ShapeError("conv: bias shape " + bias.shape().to_string() + " does not match (" +
                             std::to_string(out_channels) + ")");
        }
    }
};

/// Output shape for a (C,H,W) input.
inline Shape conv_shape(const Shape& in, const ConvParams& p) {
    if (in.rank() != 3) throw ShapeError("conv: input must be (C,H,W), got " + in.to_string());
    const std::int64_t ho = conv_out_extent(in.dim(1), p.kh, p.stride, p.pad, "height");
    const std::int64_t wo = conv_out_extent(in.dim(2), p.kw, p.stride, p.pad, "width");
    return Shape{p.out_channels, ho, wo};
}

struct ConvCache {
    Tensor input;  // (N,C,H,W) as seen by forward
};

/// Cross-correlation with per-channel bias over a (N,C,H,W) batch,
/// realized as im2col + gemm per sample and group.
inline Tensor conv_forward(const Tensor& in, const ConvParams& p, ConvCache* cache = nullptr) {
    if (in.shape().rank() != 4) {
        throw ShapeError("conv: input must be (N,C,H,W), got " + in.shape().to_string());
    }
    const std::int64_t n = in.shape().dim(0);
    const std::int64_t c = in.shape().dim(1);
    const std::int64_t h = in.shape().dim(2);
    const std::int64_t w = in.shape().dim(3);
    p.validate(c);
    const Shape per_sample = conv_shape(Shape{c, h, w}, p);
    const std::int64_t ho = per_sample.dim(1);
    const std::int64_t wo = per_sample.dim(2);
    const std::int64_t cols = ho * wo;
    const std::int64_t cg = c / p.groups;             // input channels per group
    const std::int64_t og = p.out_channels / p.groups;  // output channels per group
    const std::int64_t krows = cg * p.kh * p.kw;

    Tensor out(Shape{n, p.out_channels, ho, wo});
    Tensor col(Shape{krows, cols});
    // weight matrix per group: (og, krows), contiguous slices of p.weights
    for (std::int64_t i = 0; i < n; ++i) {
        const float* img = in.data() + i * c * h * w;
        for (std::int64_t g = 0; g < p.groups; ++g) {
            vfn::detail::im2col_slice(img, h, w, g * cg, (g + 1) * cg, p.kh, p.kw, p.stride, p.pad, ho,
                                 wo, col.data());
            Tensor wmat(Shape{og, krows},
                        std::vector<float>(p.weights.data() + g * og * krows,
                                           p.weights.data() + (g + 1) * og * krows));
            Tensor omat(Shape{og, cols});
            gemm(false, false, 1.0f, wmat, col, 0.0f, omat);
            float* dst = out.data() + (i * p.out_channels + g * og) * cols;
            for (std::int64_t oc = 0; oc < og; ++oc) {
                const float bv = p.bias[g * og + oc];
                const float* src = omat.data() + oc * cols;
                for (std::int64_t j = 0; j < cols; ++j) dst[oc * cols + j] = src[j] + bv;
            }
        }
    }
    if (cache) cache->input = in;
    return out;
}

struct ConvGrads {
    Tensor grad_in;
    Tensor grad_w;
    Tensor grad_b;
};

inline ConvGrads conv_backward(const Tensor& grad_out, const ConvCache& cache,
                               const ConvParams& p) {
    if (cache.input.empty()) throw StateError("conv: backward before forward");
    const Tensor& in = cache.input;
    const std::int64_t n = in.shape().dim(0);
    const std::int64_t c = in.shape().dim(1);
    const std::int64_t h = in.shape().dim(2);
    const std::int64_t w = in.shape().dim(3);
    const Shape per_sample = conv_shape(Shape{c, h, w}, p);
    const std::int64_t ho = per_sample.dim(1);
    const std::int64_t wo = per_sample.dim(2);
    if (grad_out.shape() != Shape{n, p.out_channels, ho, wo}) {
        throw ShapeError("conv: grad shape " + grad_out.shape().to_string() + " does not match " +
                         Shape{n, p.out_channels, ho, wo}.to_string());
    }
    const std::int64_t cols = ho * wo;
    const std::int64_t cg = c / p.groups;
    const std::int64_t og = p.out_channels / p.groups;
    const std::int64_t krows = cg * p.kh * p.kw;

    ConvGrads grads{Tensor(in.shape()), Tensor(p.weights.shape()), Tensor(p.bias.shape())};
    Tensor col(Shape{krows, cols});
    Tensor colgrad(Shape{krows, cols});
    for (std::int64_t i = 0; i < n; ++i) {
        const float* img = in.data() + i * c * h * w;
        float* gimg = grads.grad_in.data() + i * c * h * w;
        for (std::int64_t g = 0; g < p.groups; ++g) {
            const std::int64_t wofs = g * og * krows;
            Tensor gmat(Shape{og, cols},
                        std::vector<float>(grad_out.data() + (i * p.out_channels + g * og) * cols,
                                           grad_out.data() + (i * p.out_channels + (g + 1) * og) * cols));
            // bias: sum over spatial positions and batch
            for (std::int64_t oc = 0; oc < og; ++oc) {
                float s = 0.0f;
                const float* src = gmat.data() + oc * cols;
                for (std::int64_t j = 0; j < cols; ++j) s += src[j];
                grads.grad_b[g * og + oc] += s;
            }
            // weights: dW += gmat * col^T
            vfn::detail::im2col_slice(img, h, w, g * cg, (g + 1) * cg, p.kh, p.kw, p.stride, p.pad, ho,
                                 wo, col.data());
            Tensor gw(Shape{og, krows},
                      std::vector<float>(grads.grad_w.data() + wofs, grads.grad_w.data() + wofs + og * krows));
            gemm(false, true, 1.0f, gmat, col, 1.0f, gw);
            std::copy(gw.data(), gw.data() + og * krows, grads.grad_w.data() + wofs);
            // input: col grad = W^T * gmat, scattered back
            Tensor wmat(Shape{og, krows},
                        std::vector<float>(p.weights.data() + wofs, p.weights.data() + wofs + og * krows));
            gemm(true, false, 1.0f, wmat, gmat, 0.0f, colgrad);
            vfn::detail::col2im_slice_add(colgrad.data(), h, w, g * cg, (g + 1) * cg, p.kh, p.kw,
                                     p.stride, p.pad, ho, wo, gimg);
        }
    }
    return grads;
}

}  // namespace vfn::ops
