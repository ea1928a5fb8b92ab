#pragma once

#include <cmath>
#include <cstdint>

#include "vfn/graph/network.hpp"
#include "vfn/rng.hpp"
#include "vfn/tensor.hpp"

namespace vfn::train {

/// MSRA filler: zero-mean Gaussian with Var[w] = 2/fan_in.
inline Tensor msra_init(const Shape& shape, std::int64_t fan_in, Rng& rng) {
    if (fan_in < 1) throw ConfigError("msra init: fan-in must be >= 1");
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    Tensor out(shape);
    for (auto& v : out) v = static_cast<float>(rng.gaussian() * stddev);
    return out;
}

/// Fills every conv/fc weight tensor with the MSRA filler and zeroes the
/// biases. Normalization statistics keep their 0/1 start values.
inline void initialize_network(graph::Network& net, Rng& rng) {
    for (auto& p : net.trainable_parameters()) {
        Tensor& t = *p.tensor;
        if (p.name.size() >= 2 && p.name.substr(p.name.size() - 2) == ".b") {
            t.fill(0.0f);
            continue;
        }
        // conv weights (F, C, kh, kw): fan-in = C*kh*kw; fc weights (n, m): fan-in = n
        std::int64_t fan_in = 1;
        for (int i = 1; i < t.shape().rank(); ++i) fan_in *= t.shape().dim(i);
        if (t.shape().rank() == 2) fan_in = t.shape().dim(0);
        t = msra_init(t.shape(), fan_in, rng);
    }
}

}  // namespace vfn::train
