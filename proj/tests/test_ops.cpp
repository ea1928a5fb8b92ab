#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"
#include "vfn/fdcheck.hpp"
#include "vfn/ops/dropout.hpp"
#include "vfn/ops/fc.hpp"
#include "vfn/ops/lrn.hpp"
#include "vfn/ops/pool.hpp"
#include "vfn/ops/relu.hpp"
#include "vfn/ops/softmax_loss.hpp"

using vfn::Mode;
using vfn::Shape;
using vfn::Tensor;
namespace ops = vfn::ops;

TEST_CASE("relu forward and gating backward", "[ops]") {
    const Tensor in(Shape{3}, {-1.0f, 0.0f, 2.0f});
    const Tensor out = ops::relu_forward(in);
    CHECK(out[0] == 0.0f);
    CHECK(out[1] == 0.0f);
    CHECK(out[2] == 2.0f);

    vfn::Rng rng(1);
    Tensor pos = support::random_tensor(Shape{4, 4}, rng, 0.1, 1.0);
    CHECK(ops::relu_forward(pos) == pos);

    const Tensor x(Shape{2}, {-1.0f, 2.0f});
    const Tensor g(Shape{2}, {5.0f, 7.0f});
    const Tensor gi = ops::relu_backward(g, x);
    CHECK(gi[0] == 0.0f);
    CHECK(gi[1] == 7.0f);
}

TEST_CASE("pooling trivial windows", "[ops]") {
    const Tensor in(Shape{1, 1, 2, 2}, {1, 2, 3, 4});
    ops::PoolParams mx{ops::PoolParams::Kind::max, 2, 2, 2};
    const Tensor mo = ops::pool_forward(in, mx);
    CHECK(mo.shape() == Shape{1, 1, 1, 1});
    CHECK(mo[0] == 4.0f);

    ops::PoolParams mean{ops::PoolParams::Kind::mean, 2, 2, 2};
    const Tensor ao = ops::pool_forward(in, mean);
    CHECK(ao[0] == 2.5f);
}

TEST_CASE("max pool ties route to the first window position", "[ops]") {
    const Tensor in(Shape{1, 1, 2, 2}, {7, 7, 7, 7});
    ops::PoolParams mx{ops::PoolParams::Kind::max, 2, 2, 2};
    ops::PoolCache cache;
    ops::pool_forward(in, mx, &cache);
    CHECK(cache.argmax[0] == 0);
    const Tensor g(Shape{1, 1, 1, 1}, {3.0f});
    const Tensor gi = ops::pool_backward(g, mx, cache);
    CHECK(gi[0] == 3.0f);
    CHECK(gi[1] == 0.0f);
}

TEST_CASE("pool rejects windows larger than the input", "[ops]") {
    const Tensor in(Shape{1, 1, 2, 2});
    ops::PoolParams p{ops::PoolParams::Kind::max, 3, 3, 1};
    CHECK_THROWS_AS(ops::pool_forward(in, p), vfn::ShapeError);
}

TEST_CASE("fc identity and hand product", "[ops]") {
    ops::FcParams id;
    id.weights = Tensor(Shape{3, 3});
    for (int i = 0; i < 3; ++i) id.weights[i * 3 + i] = 1.0f;
    id.bias = Tensor(Shape{3});
    vfn::Rng rng(2);
    const Tensor x = support::random_tensor(Shape{2, 3}, rng);
    CHECK(ops::fc_forward(x, id) == x);

    ops::FcParams p;
    p.weights = Tensor(Shape{2, 2}, {1, 2, 3, 4});
    p.bias = Tensor(Shape{2}, {0.5f, -0.5f});
    const Tensor ones(Shape{1, 2}, {1, 1});
    const Tensor out = ops::fc_forward(ones, p);
    CHECK(out[0] == 4.5f);
    CHECK(out[1] == 5.5f);
}

TEST_CASE("fc rejects length mismatches", "[ops]") {
    ops::FcParams p;
    p.weights = Tensor(Shape{4, 2});
    p.bias = Tensor(Shape{2});
    const Tensor x(Shape{1, 5});
    CHECK_THROWS_AS(ops::fc_forward(x, p), vfn::ShapeError);
}

TEST_CASE("dropout is the identity in test mode and at ratio 0", "[ops]") {
    vfn::Rng rng(3);
    const Tensor x = support::random_tensor(Shape{5, 5}, rng);
    auto test_mode = ops::dropout_forward(x, {0.7f, Mode::test, 9});
    CHECK(test_mode.out == x);

    auto zero_ratio = ops::dropout_forward(x, {0.0f, Mode::train, 9});
    CHECK(zero_ratio.out == x);
    for (std::int64_t i = 0; i < zero_ratio.mask.count(); ++i) CHECK(zero_ratio.mask[i] == 1.0f);
}

TEST_CASE("dropout preserves the mean with inverted scaling", "[ops]") {
    const Tensor x(Shape{100000}, 1.0f);
    auto r = ops::dropout_forward(x, {0.5f, Mode::train, 1234});
    double mean = 0.0;
    for (std::int64_t i = 0; i < r.out.count(); ++i) mean += r.out[i];
    mean /= static_cast<double>(r.out.count());
    CHECK(mean > 0.97);
    CHECK(mean < 1.03);
}

TEST_CASE("dropout rejects ratio >= 1", "[ops]") {
    const Tensor x(Shape{2});
    CHECK_THROWS_AS(ops::dropout_forward(x, {1.0f, Mode::train, 0}), vfn::ConfigError);
}

TEST_CASE("softmax loss on uniform and saturated logits", "[ops]") {
    const Tensor uniform(Shape{2, 4}, 0.25f);
    const float loss = ops::softmax_loss_forward(uniform, {0, 3});
    CHECK(loss == Catch::Approx(std::log(4.0)).margin(1e-6));

    Tensor saturated(Shape{1, 4});
    saturated[2] = 1000.0f;
    CHECK(ops::softmax_loss_forward(saturated, {2}) < 1e-6f);
}

TEST_CASE("softmax probabilities sum to 1 per row", "[ops]") {
    vfn::Rng rng(4);
    const Tensor logits = support::random_tensor(Shape{6, 9}, rng, -5.0, 5.0);
    const Tensor probs = ops::softmax(logits);
    for (int i = 0; i < 6; ++i) {
        double s = 0.0;
        for (int j = 0; j < 9; ++j) s += probs[i * 9 + j];
        CHECK(std::fabs(s - 1.0) < 1e-6);
    }
}

TEST_CASE("softmax loss rejects out-of-range labels", "[ops]") {
    const Tensor logits(Shape{2, 3});
    CHECK_THROWS_AS(ops::softmax_loss_forward(logits, {0, 3}), vfn::DataError);
    CHECK_THROWS_AS(ops::softmax_loss_forward(logits, {-1, 0}), vfn::DataError);
}

TEST_CASE("lrn keeps shape and normalizes downward", "[ops]") {
    vfn::Rng rng(5);
    const Tensor x = support::random_tensor(Shape{1, 2, 6, 6}, rng, 0.5, 1.0);
    ops::LrnParams p;
    const Tensor y = ops::lrn_forward(x, p);
    CHECK(y.shape() == x.shape());
    for (std::int64_t i = 0; i < y.count(); ++i) {
        CHECK(y[i] > 0.0f);
        CHECK(y[i] <= x[i]);  // denominator >= 1 with k=1
    }
}

TEST_CASE("backward ops pass finite-difference checks", "[ops][gradcheck]") {
    vfn::Rng rng(99);
    CHECK(vfn::fdcheck::check_conv(rng) < 1e-3);
    CHECK(vfn::fdcheck::check_fc(rng) < 1e-3);
    CHECK(vfn::fdcheck::check_pool_max(rng) < 1e-3);
    CHECK(vfn::fdcheck::check_pool_mean(rng) < 1e-3);
    CHECK(vfn::fdcheck::check_relu(rng) < 1e-3);
    CHECK(vfn::fdcheck::check_dropout(rng) < 1e-3);
    CHECK(vfn::fdcheck::check_softmax_loss(rng) < 1e-3);
}
