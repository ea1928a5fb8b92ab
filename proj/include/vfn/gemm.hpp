#pragma once

#include <cstdint>
#include <vector>

#include "vfn/runtime.hpp"
#include "vfn/tensor.hpp"

namespace vfn {

namespace detail {

// C(M,N) = alpha * A(M,K) * B(K,N) + beta * C, row-major, no transposes.
// Every C element accumulates its K terms in ascending k order into a
// per-row scratch buffer, so results are bitwise identical for any thread
// count. The j loop is the vectorization axis.
inline void gemm_nn(std::int64_t m, std::int64_t n, std::int64_t k, float alpha, const float* a,
                    const float* b, float beta, float* c) {
    runtime::parallel_for(0, m, [&](std::int64_t i) {
        std::vector<float> acc(static_cast<std::size_t>(n), 0.0f);
        const float* arow = a + i * k;
        for (std::int64_t p = 0; p < k; ++p) {
            const float av = arow[p];
            const float* brow = b + p * n;
            float* accp = acc.data();
            for (std::int64_t j = 0; j < n; ++j) accp[j] += av * brow[j];
        }
        float* crow = c + i * n;
        if (beta == 0.0f) {
            for (std::int64_t j = 0; j < n; ++j) crow[j] = alpha * acc[static_cast<std::size_t>(j)];
        } else {
            for (std::int64_t j = 0; j < n; ++j)
                crow[j] = alpha * acc[static_cast<std::size_t>(j)] + beta * crow[j];
        }
    });
}

inline std::vector<float> transpose_copy(const float* src, std::int64_t rows, std::int64_t cols) {
    std::vector<float> out(static_cast<std::size_t>(rows * cols));
    for (std::int64_t r = 0; r < rows; ++r)
        for (std::int64_t c = 0; c < cols; ++c)
            out[static_cast<std::size_t>(c * rows + r)] = src[r * cols + c];
    return out;
}

}  // namespace detail

/// c = alpha * op(a) * op(b) + beta * c with op = transpose when flagged.
/// a, b, c must be rank-2; inner dimensions must agree after transposition.
inline void gemm(bool trans_a, bool trans_b, float alpha, const Tensor& a, const Tensor& b,
                 float beta, Tensor& c) {
    if (a.shape().rank() != 2 || b.shape().rank() != 2 || c.shape().rank() != 2) {
        throw ShapeError("gemm: operands must be rank-2, got " + a.shape().to_string() + ", " +
                         b.shape().to_string() + ", " + c.shape().to_string());
    }
    const std::int64_t m = trans_a ? a.shape().dim(1) : a.shape().dim(0);
    const std::int64_t ka = trans_a ? a.shape().dim(0) : a.shape().dim(1);
    const std::int64_t kb = trans_b ? b.shape().dim(1) : b.shape().dim(0);
    const std::int64_t n = trans_b ? b.shape().dim(0) : b.shape().dim(1);
    if (ka != kb) {
        throw ShapeError("gemm: inner dimensions disagree, op(a)=" + std::to_string(m) + "x" +
                         std::to_string(ka) + " op(b)=" + std::to_string(kb) + "x" +
                         std::to_string(n));
    }
    if (c.shape().dim(0) != m || c.shape().dim(1) != n) {
        throw ShapeError("gemm: output shape " + c.shape().to_string() + " does not match " +
                         std::to_string(m) + "x" + std::to_string(n));
    }

    const float* ap = a.data();
    const float* bp = b.data();
    std::vector<float> a_packed;
    std::vector<float> b_packed;
    if (trans_a) {
        a_packed = detail::transpose_copy(a.data(), a.shape().dim(0), a.shape().dim(1));
        ap = a_packed.data();
    }
    if (trans_b) {
        b_packed = detail::transpose_copy(b.data(), b.shape().dim(0), b.shape().dim(1));
        bp = b_packed.data();
    }
    detail::gemm_nn(m, n, ka, alpha, ap, bp, beta, c.data());
}

}  // namespace vfn
