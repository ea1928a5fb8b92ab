#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"
#include "synthetic.hpp"
#include "vfn/train/augment.hpp"
#include "vfn/train/init.hpp"
#include "vfn/train/trainer.hpp"

using vfn::Mode;
using vfn::Shape;
using vfn::Tensor;
namespace train = vfn::train;

TEST_CASE("degenerate crop with no flip is mean subtraction only", "[train]") {
    vfn::Rng data_rng(1);
    const Tensor img = support::random_tensor(Shape{2, 6, 6}, data_rng, 0.0, 255.0);
    const Tensor mean = support::random_tensor(Shape{2, 6, 6}, data_rng, 0.0, 255.0);
    vfn::Rng rng(2);
    const Tensor out = train::augment(img, mean, 6, 0.0f, Mode::train, rng);
    REQUIRE(out.shape() == img.shape());
    for (std::int64_t i = 0; i < out.count(); ++i) {
        CHECK(out[i] == Catch::Approx(img[i] - mean[i]).margin(1e-6));
    }
}

TEST_CASE("flip probability 1 mirrors columns", "[train]") {
    const Tensor img(Shape{1, 2, 3}, {1, 2, 3, 4, 5, 6});
    vfn::Rng rng(3);
    const Tensor none;
    const Tensor out = train::augment(img, none, 2, 1.0f, Mode::train, rng);
    // 2x2 crop of a 2x3 image: offsets in [0,1]; columns reversed
    REQUIRE(out.shape() == Shape{1, 2, 2});
    CHECK(out[0] > out[1]);  // row values decrease left-to-right after the mirror
    CHECK(out[2] > out[3]);
}

TEST_CASE("test-mode augmentation is a deterministic center crop", "[train]") {
    vfn::Rng data_rng(4);
    const Tensor img = support::random_tensor(Shape{1, 5, 5}, data_rng);
    vfn::Rng rng(5);
    const Tensor none;
    const Tensor a = train::augment(img, none, 3, 0.5f, Mode::test, rng);
    const Tensor b = train::augment(img, none, 3, 0.5f, Mode::test, rng);
    CHECK(a == b);
    CHECK(a[0] == img.at({0, 1, 1}));  // centered window
}

TEST_CASE("flip fraction tracks the configured probability", "[train]") {
    // 2x2 source, full-size crop: a flip is visible as out[0] == 2
    const Tensor sq(Shape{1, 2, 2}, {1.0f, 2.0f, 3.0f, 4.0f});
    const Tensor none;
    vfn::Rng rng(9);
    int flipped = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        const Tensor out = train::augment(sq, none, 2, 0.5f, Mode::train, rng);
        if (out[0] == 2.0f) ++flipped;
    }
    const double fraction = static_cast<double>(flipped) / trials;
    CHECK(fraction > 0.47);
    CHECK(fraction < 0.53);
}

TEST_CASE("crop larger than the source is a config error", "[train]") {
    const Tensor img(Shape{1, 4, 4});
    const Tensor none;
    vfn::Rng rng(10);
    CHECK_THROWS_AS(train::augment(img, none, 5, 0.0f, Mode::train, rng), vfn::ConfigError);
}

TEST_CASE("zero learning rate leaves parameters untouched", "[train]") {
    auto data = synthetic::make_task(42, 4);
    vfn::graph::Network net{vfn::graph::parse_descriptor(synthetic::kPlainNetText)};
    vfn::Rng rng(11);
    train::initialize_network(net, rng);
    std::vector<Tensor> before;
    for (auto& p : net.trainable_parameters()) before.push_back(*p.tensor);

    train::SolverConfig cfg;
    cfg.base_lr = 0.0f;
    cfg.weight_decay = 0.0f;
    cfg.max_iter = 10;
    cfg.batch_size = 8;
    cfg.crop_size = 8;
    cfg.flip_prob = 0.0f;
    train::Trainer trainer(net, data, cfg);
    trainer.run();
    auto params = net.trainable_parameters();
    for (std::size_t i = 0; i < params.size(); ++i) CHECK(*params[i].tensor == before[i]);
}

TEST_CASE("identical seeds give bitwise-identical parameters", "[train]") {
    auto data = synthetic::make_task(43, 6);
    train::SolverConfig cfg;
    cfg.base_lr = 0.01f;
    cfg.max_iter = 100;
    cfg.batch_size = 8;
    cfg.crop_size = 8;
    cfg.rng_seed = 2718;

    auto run_once = [&]() {
        vfn::graph::Network net{vfn::graph::parse_descriptor(synthetic::kFnlNetText)};
        vfn::Rng rng(cfg.rng_seed);
        train::initialize_network(net, rng);
        train::Trainer trainer(net, data, cfg);
        std::vector<float> losses;
        trainer.run([&](std::int64_t, float, float loss) { losses.push_back(loss); });
        std::vector<Tensor> params;
        for (auto& p : net.trainable_parameters()) params.push_back(*p.tensor);
        return std::make_pair(losses, params);
    };
    const auto [losses1, params1] = run_once();
    const auto [losses2, params2] = run_once();
    CHECK(losses1 == losses2);
    REQUIRE(params1.size() == params2.size());
    for (std::size_t i = 0; i < params1.size(); ++i) CHECK(params1[i] == params2[i]);
}

TEST_CASE("training errors", "[train]") {
    auto data = synthetic::make_task(44, 2);
    train::SolverConfig cfg;
    cfg.max_iter = 1;
    cfg.batch_size = 4;
    cfg.crop_size = 8;

    // empty dataset
    train::TrainData empty;
    vfn::graph::Network net{vfn::graph::parse_descriptor(synthetic::kPlainNetText)};
    CHECK_THROWS_AS(train::Trainer(net, empty, cfg), vfn::DataError);

    // label outside the logit width
    auto bad = synthetic::make_task(45, 2);
    bad.labels[0] = 12;
    vfn::graph::Network net2{vfn::graph::parse_descriptor(synthetic::kPlainNetText)};
    CHECK_THROWS_AS(train::Trainer(net2, bad, cfg), vfn::DataError);
}

TEST_CASE("fnl net reaches 95% train accuracy within 500 iterations", "[train][convergence]") {
    auto data = synthetic::make_task(46);
    vfn::graph::Network net{vfn::graph::parse_descriptor(synthetic::kFnlNetText)};
    vfn::Rng rng(12);
    train::initialize_network(net, rng);
    train::SolverConfig cfg;
    cfg.base_lr = 0.04f;
    cfg.max_iter = 500;
    cfg.batch_size = 32;
    cfg.crop_size = 8;
    cfg.flip_prob = 0.0f;
    cfg.rng_seed = 314;
    const auto iters = synthetic::iterations_to_accuracy(net, data, cfg, 0.95);
    CHECK(iters < 500);
}

TEST_CASE("windowed training loss trends downward on the separable task", "[train][convergence]") {
    auto data = synthetic::make_task(47);
    vfn::graph::Network net{vfn::graph::parse_descriptor(synthetic::kFnlNetText)};
    vfn::Rng rng(13);
    train::initialize_network(net, rng);
    train::SolverConfig cfg;
    cfg.base_lr = 0.04f;
    cfg.max_iter = 200;
    cfg.batch_size = 32;
    cfg.crop_size = 8;
    cfg.flip_prob = 0.0f;
    cfg.rng_seed = 159;
    train::Trainer trainer(net, data, cfg);
    std::vector<float> losses;
    trainer.run([&](std::int64_t, float, float loss) { losses.push_back(loss); });
    // mean over consecutive 50-iteration windows is non-increasing
    double prev = 1e30;
    for (std::size_t start = 0; start + 50 <= losses.size(); start += 50) {
        double mean = 0.0;
        for (std::size_t i = start; i < start + 50; ++i) mean += losses[i];
        mean /= 50.0;
        CHECK(mean <= prev + 1e-6);
        prev = mean;
    }
}
