#pragma once

#include <cstdint>
#include <string>

#include "vfn/tensor.hpp"

namespace vfn {

/// floor((extent + 2*pad - kernel) / stride) + 1, rejected when < 1.
inline std::int64_t conv_out_extent(std::int64_t extent, std::int64_t kernel, std::int64_t stride,
                                    std::int64_t pad, const char* axis) {
    const std::int64_t numer = extent + 2 * pad - kernel;
    const std::int64_t out = (numer < 0) ? 0 : numer / stride + 1;
    if (out < 1) {
        throw ShapeError(std::string("conv: non-positive output extent on ") + axis + " (in=" +
                         std::to_string(extent) + " kernel=" + std::to_string(kernel) +
                         " stride=" + std::to_string(stride) + " pad=" + std::to_string(pad) + ")");
    }
    return out;
}

namespace detail {

// Unrolls the channel slice [c0, c1) of a (C,H,W) image into columns,
// writing rows [(c-c0)*kh*kw, ...) of `out`. Row order is (channel, ki, kj),
// column j is output position oh*wout+ow; padded taps contribute 0.
inline void im2col_slice(const float* img, std::int64_t h, std::int64_t w, std::int64_t c0,
                         std::int64_t c1, std::int64_t kh, std::int64_t kw, std::int64_t stride,
                         std::int64_t pad, std::int64_t hout, std::int64_t wout, float* out) {
    const std::int64_t cols = hout * wout;
    std::int64_t row = 0;
    for (std::int64_t c = c0; c < c1; ++c) {
        const float* plane = img + c * h * w;
        for (std::int64_t ki = 0; ki < kh; ++ki) {
            for (std::int64_t kj = 0; kj < kw; ++kj, ++row) {
                float* dst = out + row * cols;
                for (std::int64_t oh = 0; oh < hout; ++oh) {
                    const std::int64_t ih = oh * stride - pad + ki;
                    if (ih < 0 || ih >= h) {
                        for (std::int64_t ow = 0; ow < wout; ++ow) dst[oh * wout + ow] = 0.0f;
                        continue;
                    }
                    const float* src = plane + ih * w;
                    for (std::int64_t ow = 0; ow < wout; ++ow) {
                        const std::int64_t iw = ow * stride - pad + kj;
                        dst[oh * wout + ow] = (iw < 0 || iw >= w) ? 0.0f : src[iw];
                    }
                }
            }
        }
    }
}

// Scatter-add inverse of im2col_slice, used by the convolution backward pass.
inline void col2im_slice_add(const float* cols_data, std::int64_t h, std::int64_t w,
                             std::int64_t c0, std::int64_t c1, std::int64_t kh, std::int64_t kw,
                             std::int64_t stride, std::int64_t pad, std::int64_t hout,
                             std::int64_t wout, float* img) {
    const std::int64_t cols = hout * wout;
    std::int64_t row = 0;
    for (std::int64_t c = c0; c < c1; ++c) {
        float* plane = img + c * h * w;
        for (std::int64_t ki = 0; ki < kh; ++ki) {
            for (std::int64_t kj = 0; kj < kw; ++kj, ++row) {
                const float* src = cols_data + row * cols;
                for (std::int64_t oh = 0; oh < hout; ++oh) {
                    const std::int64_t ih = oh * stride - pad + ki;
                    if (ih < 0 || ih >= h) continue;
                    for (std::int64_t ow = 0; ow < wout; ++ow) {
                        const std::int64_t iw = ow * stride - pad + kj;
                        if (iw < 0 || iw >= w) continue;
                        plane[ih * w + iw] += src[oh * wout + ow];
                    }
                }
            }
        }
    }
}

}  // namespace detail

/// Lowers a (C,H,W) image to the (C*kh*kw) x (Hout*Wout) matrix whose
/// column j is the receptive field of output position j.
inline Tensor im2col(const Tensor& input, std::int64_t kh, std::int64_t kw, std::int64_t stride,
                     std::int64_t pad) {
    if (input.shape().rank() != 3) {
        throw ShapeError("im2col: input must be (C,H,W), got " + input.shape().to_string());
    }
    const std::int64_t c = input.shape().dim(0);
    const std::int64_t h = input.shape().dim(1);
    const std::int64_t w = input.shape().dim(2);
    const std::int64_t hout = conv_out_extent(h, kh, stride, pad, "height");
    const std::int64_t wout = conv_out_extent(w, kw, stride, pad, "width");
    Tensor out(Shape{c * kh * kw, hout * wout});
    detail::im2col_slice(input.data(), h, w, 0, c, kh, kw, stride, pad, hout, wout, out.data());
    return out;
}

}  // namespace vfn
