#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "vfn/errors.hpp"

namespace vfn::eval {

/// a.b / (|a||b|), accumulated in double.
inline float cosine(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) {
        throw ShapeError("cosine: vector lengths differ (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
    }
    if (a.empty()) throw ShapeError("cosine: empty vectors");
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        throw NumericError("cosine: similarity undefined for a zero vector");
    }
    return static_cast<float>(dot / (std::sqrt(na) * std::sqrt(nb)));
}

inline float cosine(const std::vector<float>& a, const std::vector<float>& b) {
    return cosine(std::span<const float>(a), std::span<const float>(b));
}

}  // namespace vfn::eval
