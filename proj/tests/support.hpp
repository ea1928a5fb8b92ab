#pragma once

// Shared helpers for the test suites: independent brute-force oracles and
// small utilities. Everything here stays free of the library's optimized
// code paths so the comparisons mean something.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "vfn/rng.hpp"
#include "vfn/tensor.hpp"

namespace support {

inline vfn::Tensor random_tensor(const vfn::Shape& s, vfn::Rng& rng, double lo = -1.0,
                                 double hi = 1.0) {
    vfn::Tensor t(s);
    for (auto& v : t) v = static_cast<float>(rng.uniform(lo, hi));
    return t;
}

// Reference gemm: plain dot products, k ascending, float accumulation.
inline vfn::Tensor naive_gemm(const vfn::Tensor& a, const vfn::Tensor& b) {
    const std::int64_t m = a.shape().dim(0);
    const std::int64_t k = a.shape().dim(1);
    const std::int64_t n = b.shape().dim(1);
    vfn::Tensor c(vfn::Shape{m, n});
    for (std::int64_t i = 0; i < m; ++i) {
        for (std::int64_t j = 0; j < n; ++j) {
            float acc = 0.0f;
            for (std::int64_t p = 0; p < k; ++p) acc += a[i * k + p] * b[p * n + j];
            c[i * n + j] = acc;
        }
    }
    return c;
}

// Direct cross-correlation with channel groups, nested loops only.
// Accumulates over (channel, ki, kj) in the same order as the im2col
// lowering so float rounding stays comparable.
inline vfn::Tensor naive_conv(const vfn::Tensor& in, const vfn::Tensor& weights,
                              const vfn::Tensor& bias, std::int64_t stride, std::int64_t pad,
                              std::int64_t groups) {
    const std::int64_t n = in.shape().dim(0);
    const std::int64_t c = in.shape().dim(1);
    const std::int64_t h = in.shape().dim(2);
    const std::int64_t w = in.shape().dim(3);
    const std::int64_t oc = weights.shape().dim(0);
    const std::int64_t cg = weights.shape().dim(1);
    const std::int64_t kh = weights.shape().dim(2);
    const std::int64_t kw = weights.shape().dim(3);
    const std::int64_t ho = (h + 2 * pad - kh) / stride + 1;
    const std::int64_t wo = (w + 2 * pad - kw) / stride + 1;
    const std::int64_t og = oc / groups;
    vfn::Tensor out(vfn::Shape{n, oc, ho, wo});
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t o = 0; o < oc; ++o) {
            const std::int64_t g = o / og;
            for (std::int64_t oh = 0; oh < ho; ++oh) {
                for (std::int64_t ow = 0; ow < wo; ++ow) {
                    float acc = 0.0f;
                    for (std::int64_t ci = 0; ci < cg; ++ci) {
                        const std::int64_t src_c = g * cg + ci;
                        for (std::int64_t ki = 0; ki < kh; ++ki) {
                            const std::int64_t ih = oh * stride - pad + ki;
                            if (ih < 0 || ih >= h) continue;
                            for (std::int64_t kj = 0; kj < kw; ++kj) {
                                const std::int64_t iw = ow * stride - pad + kj;
                                if (iw < 0 || iw >= w) continue;
                                acc += in[((i * c + src_c) * h + ih) * w + iw] *
                                       weights[((o * cg + ci) * kh + ki) * kw + kj];
                            }
                        }
                    }
                    out[((i * oc + o) * ho + oh) * wo + ow] = acc + bias[o];
                }
            }
        }
    }
    return out;
}

inline double max_abs_diff(const vfn::Tensor& a, const vfn::Tensor& b) {
    double worst = 0.0;
    for (std::int64_t i = 0; i < a.count(); ++i) {
        worst = std::max(worst, std::fabs(static_cast<double>(a[i]) - b[i]));
    }
    return worst;
}

// Scratch directory, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path = std::filesystem::temp_directory_path() /
               (tag + "-" + std::to_string(rd()) + "-" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace support
