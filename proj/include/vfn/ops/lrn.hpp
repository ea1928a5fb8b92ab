#pragma once

#include <cmath>
#include <cstdint>

#include "vfn/tensor.hpp"

namespace vfn::ops {

/// Local response normalization, kept only so the AlexNet baseline
/// descriptor loads and runs forward. out = x / (k + alpha/area * S)^beta
/// where S sums x^2 over a centered size x size window, zero padded.
struct LrnParams {
    enum class Region { within_channel, across_channels };
    std::int64_t size = 5;
    float alpha = 1e-4f;
    float beta = 0.75f;
    float k = 1.0f;
    Region region = Region::within_channel;

    void validate() const {
        if (size < 1 || size % 2 == 0) throw ConfigError("lrn: size must be odd and >= 1");
    }
};

inline Tensor lrn_forward(const Tensor& in, const LrnParams& p) {
    if (in.shape().rank() != 4) {
        throw ShapeError("lrn: input must be (N,C,H,W), got " + in.shape().to_string());
    }
    p.validate();
    const std::int64_t n = in.shape().dim(0);
    const std::int64_t c = in.shape().dim(1);
    const std::int64_t h = in.shape().dim(2);
    const std::int64_t w = in.shape().dim(3);
    const std::int64_t half = p.size / 2;
    Tensor out(in.shape());

    if (p.region == LrnParams::Region::within_channel) {
        const float scale = p.alpha / static_cast<float>(p.size * p.size);
        for (std::int64_t i = 0; i < n; ++i) {
            for (std::int64_t ch = 0; ch < c; ++ch) {
                const float* plane = in.data() + (i * c + ch) * h * w;
                float* dst = out.data() + (i * c + ch) * h * w;
                for (std::int64_t y = 0; y < h; ++y) {
                    for (std::int64_t x = 0; x < w; ++x) {
                        float s = 0.0f;
                        for (std::int64_t dy = -half; dy <= half; ++dy) {
                            const std::int64_t yy = y + dy;
                            if (yy < 0 || yy >= h) continue;
                            for (std::int64_t dx = -half; dx <= half; ++dx) {
                                const std::int64_t xx = x + dx;
                                if (xx < 0 || xx >= w) continue;
                                const float v = plane[yy * w + xx];
                                s += v * v;
                            }
                        }
                        dst[y * w + x] = plane[y * w + x] / std::pow(p.k + scale * s, p.beta);
                    }
                }
            }
        }
        return out;
    }

    const float scale = p.alpha / static_cast<float>(p.size);
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t y = 0; y < h; ++y) {
            for (std::int64_t x = 0; x < w; ++x) {
                for (std::int64_t ch = 0; ch < c; ++ch) {
                    float s = 0.0f;
                    for (std::int64_t dc = -half; dc <= half; ++dc) {
                        const std::int64_t cc = ch + dc;
                        if (cc < 0 || cc >= c) continue;
                        const float v = in[((i * c + cc) * h + y) * w + x];
                        s += v * v;
                    }
                    const std::int64_t idx = ((i * c + ch) * h + y) * w + x;
                    out[idx] = in[idx] / std::pow(p.k + scale * s, p.beta);
                }
            }
        }
    }
    return out;
}

}  // namespace vfn::ops
