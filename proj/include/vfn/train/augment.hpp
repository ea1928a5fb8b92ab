#pragma once

#include <cstdint>

#include "vfn/rng.hpp"
#include "vfn/tensor.hpp"

namespace vfn::train {

/// Training-time preprocessing: subtract the mean image (when given),
/// take a crop x crop window (uniformly random in train mode, centered in
/// test mode) and mirror horizontally with flip_prob in train mode.
/// The rng is consumed in a fixed order (row, column, flip) so streams
/// replay exactly.
inline Tensor augment(const Tensor& image, const Tensor& mean_image, std::int64_t crop,
                      float flip_prob, Mode mode, Rng& rng) {
    if (image.shape().rank() != 3) {
        throw ShapeError("augment: image must be (C,H,W), got " + image.shape().to_string());
    }
    const std::int64_t c = image.shape().dim(0);
    const std::int64_t h = image.shape().dim(1);
    const std::int64_t w = image.shape().dim(2);
    if (crop > h || crop > w) {
        throw ConfigError("augment: crop " + std::to_string(crop) + " larger than source " +
                          image.shape().to_string());
    }
    if (!mean_image.empty() && mean_image.shape() != image.shape()) {
        throw ShapeError("augment: mean image " + mean_image.shape().to_string() +
                         " does not match source " + image.shape().to_string());
    }

    std::int64_t oy;
    std::int64_t ox;
    bool flip = false;
    if (mode == Mode::train) {
        oy = rng.uniform_int(0, h - crop);
        ox = rng.uniform_int(0, w - crop);
        flip = rng.uniform() < static_cast<double>(flip_prob);
    } else {
        oy = (h - crop) / 2;
        ox = (w - crop) / 2;
    }

    Tensor out(Shape{c, crop, crop});
    const bool subtract = !mean_image.empty();
    for (std::int64_t ch = 0; ch < c; ++ch) {
        const float* src = image.data() + ch * h * w;
        const float* mean = subtract ? mean_image.data() + ch * h * w : nullptr;
        float* dst = out.data() + ch * crop * crop;
        for (std::int64_t y = 0; y < crop; ++y) {
            for (std::int64_t x = 0; x < crop; ++x) {
                const std::int64_t sx = ox + (flip ? crop - 1 - x : x);
                const std::int64_t si = (oy + y) * w + sx;
                float v = src[si];
                if (subtract) v -= mean[si];
                dst[y * crop + x] = v;
            }
        }
    }
    return out;
}

}  // namespace vfn::train
