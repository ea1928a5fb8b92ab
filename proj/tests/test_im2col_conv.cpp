#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"
#include "vfn/im2col.hpp"
#include "vfn/ops/conv.hpp"

using vfn::Shape;
using vfn::ShapeError;
using vfn::Tensor;

TEST_CASE("im2col single receptive field", "[tensor]") {
    const Tensor in(Shape{1, 2, 2}, {1, 2, 3, 4});
    const Tensor cols = vfn::im2col(in, 2, 2, 1, 0);
    CHECK(cols.shape() == Shape{4, 1});
    CHECK(cols[0] == 1.0f);
    CHECK(cols[1] == 2.0f);
    CHECK(cols[2] == 3.0f);
    CHECK(cols[3] == 4.0f);
}

TEST_CASE("im2col 1x1 kernel is the identity lowering", "[tensor]") {
    vfn::Rng rng(3);
    const Tensor in = support::random_tensor(Shape{3, 4, 5}, rng);
    const Tensor cols = vfn::im2col(in, 1, 1, 1, 0);
    CHECK(cols.shape() == Shape{3, 20});
    for (std::int64_t i = 0; i < in.count(); ++i) CHECK(cols[i] == in[i]);
}

TEST_CASE("im2col of a ones image is all ones", "[tensor]") {
    const Tensor in(Shape{1, 3, 3}, 1.0f);
    const Tensor cols = vfn::im2col(in, 2, 2, 1, 0);
    CHECK(cols.shape() == Shape{4, 4});
    for (std::int64_t i = 0; i < cols.count(); ++i) CHECK(cols[i] == 1.0f);
}

TEST_CASE("im2col rejects non-positive output extents", "[tensor]") {
    const Tensor in(Shape{1, 3, 3}, 1.0f);
    CHECK_THROWS_AS(vfn::im2col(in, 5, 5, 1, 0), ShapeError);
}

TEST_CASE("conv_shape follows the floor formula", "[ops]") {
    vfn::ops::ConvParams p;
    p.out_channels = 48;
    p.kh = p.kw = 9;
    p.stride = 4;
    p.pad = 0;
    CHECK(vfn::ops::conv_shape(Shape{3, 227, 227}, p) == Shape{48, 55, 55});

    p.out_channels = 128;
    p.kh = p.kw = 3;
    p.stride = 1;
    p.pad = 1;
    CHECK(vfn::ops::conv_shape(Shape{48, 27, 27}, p) == Shape{128, 27, 27});

    p.out_channels = 7;
    p.kh = p.kw = 1;
    p.pad = 0;
    CHECK(vfn::ops::conv_shape(Shape{48, 13, 13}, p) == Shape{7, 13, 13});
}

TEST_CASE("conv forward counting and identity cases", "[ops]") {
    // all-ones 3x3 image, single all-ones 2x2 kernel -> every output is 4
    vfn::ops::ConvParams p;
    p.out_channels = 1;
    p.kh = p.kw = 2;
    p.weights = Tensor(Shape{1, 1, 2, 2}, 1.0f);
    p.bias = Tensor(Shape{1});
    const Tensor in(Shape{1, 1, 3, 3}, 1.0f);
    const Tensor out = vfn::ops::conv_forward(in, p);
    CHECK(out.shape() == Shape{1, 1, 2, 2});
    for (std::int64_t i = 0; i < out.count(); ++i) CHECK(out[i] == 4.0f);

    // 1x1 kernel with weight 1 is the identity
    vfn::ops::ConvParams id;
    id.out_channels = 1;
    id.kh = id.kw = 1;
    id.weights = Tensor(Shape{1, 1, 1, 1}, 1.0f);
    id.bias = Tensor(Shape{1});
    vfn::Rng rng(5);
    const Tensor x = support::random_tensor(Shape{2, 1, 4, 4}, rng);
    const Tensor y = vfn::ops::conv_forward(x, id);
    CHECK(y == x.reshaped(y.shape()));
}

TEST_CASE("conv rejects channel mismatches", "[ops]") {
    vfn::ops::ConvParams p;
    p.out_channels = 2;
    p.kh = p.kw = 3;
    p.weights = Tensor(Shape{2, 3, 3, 3});
    p.bias = Tensor(Shape{2});
    const Tensor in(Shape{1, 2, 5, 5});  // 2 channels, weights expect 3
    CHECK_THROWS_AS(vfn::ops::conv_forward(in, p), ShapeError);
}

TEST_CASE("im2col+gemm convolution equals the nested-loop oracle", "[ops][conv-oracle]") {
    vfn::Rng rng(41);
    int cases = 0;
    while (cases < 40) {
        const std::int64_t c = rng.uniform_int(1, 4);
        const std::int64_t h = rng.uniform_int(1, 9);
        const std::int64_t w = rng.uniform_int(1, 9);
        const std::int64_t kh = rng.uniform_int(1, 5);
        const std::int64_t kw = rng.uniform_int(1, 5);
        const std::int64_t stride = rng.uniform_int(1, 4);
        const std::int64_t pad = rng.uniform_int(0, 2);
        if (h + 2 * pad < kh || w + 2 * pad < kw) continue;
        const std::int64_t oc = rng.uniform_int(1, 4);
        ++cases;

        vfn::ops::ConvParams p;
        p.out_channels = oc;
        p.kh = kh;
        p.kw = kw;
        p.stride = stride;
        p.pad = pad;
        p.weights = support::random_tensor(Shape{oc, c, kh, kw}, rng);
        p.bias = support::random_tensor(Shape{oc}, rng);
        const Tensor in = support::random_tensor(Shape{2, c, h, w}, rng);
        const Tensor got = vfn::ops::conv_forward(in, p);
        const Tensor want = support::naive_conv(in, p.weights, p.bias, stride, pad, 1);
        REQUIRE(got.shape() == want.shape());
        CHECK(support::max_abs_diff(got, want) < 1e-6);
    }
}

TEST_CASE("grouped convolution splits channels", "[ops]") {
    vfn::Rng rng(43);
    vfn::ops::ConvParams p;
    p.out_channels = 4;
    p.kh = p.kw = 3;
    p.stride = 1;
    p.pad = 1;
    p.groups = 2;
    p.weights = support::random_tensor(Shape{4, 2, 3, 3}, rng);
    p.bias = support::random_tensor(Shape{4}, rng);
    const Tensor in = support::random_tensor(Shape{1, 4, 6, 6}, rng);
    const Tensor got = vfn::ops::conv_forward(in, p);
    const Tensor want = support::naive_conv(in, p.weights, p.bias, 1, 1, 2);
    CHECK(support::max_abs_diff(got, want) < 1e-6);
}
