#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "support.hpp"
#include "vfn/dataio/dataset.hpp"
#include "vfn/dataio/image.hpp"
#include "vfn/dataio/manifest.hpp"

namespace dataio = vfn::dataio;
using vfn::DataError;
using vfn::Shape;
using vfn::Tensor;

TEST_CASE("pgm decoding maps bytes to floats", "[dataio]") {
    const std::string header = "P5\n2 2\n255\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    for (int v : {0, 255, 128, 64}) bytes.push_back(static_cast<std::uint8_t>(v));
    const Tensor img = dataio::decode_image(bytes);
    REQUIRE(img.shape() == Shape{1, 2, 2});
    CHECK(img[0] == 0.0f);
    CHECK(img[1] == 255.0f);
    CHECK(img[2] == 128.0f);
    CHECK(img[3] == 64.0f);
}

TEST_CASE("ppm decoding is channel-planar", "[dataio]") {
    const std::string header = "P6\n1 1\n255\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    for (int v : {10, 20, 30}) bytes.push_back(static_cast<std::uint8_t>(v));
    const Tensor img = dataio::decode_image(bytes);
    REQUIRE(img.shape() == Shape{3, 1, 1});
    CHECK(img[0] == 10.0f);
    CHECK(img[1] == 20.0f);
    CHECK(img[2] == 30.0f);
}

TEST_CASE("unsupported magics and malformed headers are data errors", "[dataio]") {
    const std::string p4 = "P4\n2 2\n";
    CHECK_THROWS_AS(dataio::decode_image(std::vector<std::uint8_t>(p4.begin(), p4.end())),
                    DataError);
    const std::string bad_maxval = "P5\n2 2\n65535\n";
    CHECK_THROWS_AS(
        dataio::decode_image(std::vector<std::uint8_t>(bad_maxval.begin(), bad_maxval.end())),
        DataError);
    const std::string truncated = "P5\n4 4\n255\nab";
    CHECK_THROWS_AS(
        dataio::decode_image(std::vector<std::uint8_t>(truncated.begin(), truncated.end())),
        DataError);
}

TEST_CASE("pnm headers accept comments and whitespace", "[dataio]") {
    const std::string header = "P5 # grayscale\n# full line comment\n  2\t1 \n255\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    bytes.push_back(7);
    bytes.push_back(9);
    const Tensor img = dataio::decode_image(bytes);
    REQUIRE(img.shape() == Shape{1, 1, 2});
    CHECK(img[0] == 7.0f);
}

TEST_CASE("encode-decode round trip is lossless on pixel bytes", "[dataio]") {
    vfn::Rng rng(7);
    for (int channels : {1, 3}) {
        Tensor img(Shape{channels, 5, 4});
        for (auto& v : img) v = static_cast<float>(rng.uniform_int(0, 255));
        const auto bytes = dataio::encode_image(img);
        const Tensor back = dataio::decode_image(bytes);
        CHECK(back == img);
    }
}

TEST_CASE("manifest parsing and label contiguity", "[dataio]") {
    const auto m = dataio::read_manifest("a.pgm,0\nb.pgm,1\n");
    CHECK(m.label_count == 2);
    CHECK(m.entries.size() == 2);

    try {
        dataio::read_manifest("a.pgm,0\nb.pgm,2\n");
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
    CHECK_THROWS_AS(dataio::read_manifest(""), DataError);
    CHECK_THROWS_AS(dataio::read_manifest("a.pgm,0\na.pgm,0\n"), DataError);
    CHECK_THROWS_AS(dataio::read_manifest("a.pgm,-3\n"), DataError);
}

TEST_CASE("mean image arithmetic", "[dataio]") {
    const Tensor one(Shape{1, 2, 2}, 1.0f);
    const Tensor two(Shape{1, 2, 2}, 2.0f);
    const Tensor three(Shape{1, 2, 2}, 3.0f);
    CHECK(dataio::mean_image({one}) == one);

    Tensor neg = one;
    for (auto& v : neg) v = -v;
    const Tensor zero = dataio::mean_image({one, neg});
    for (std::int64_t i = 0; i < zero.count(); ++i) CHECK(zero[i] == 0.0f);

    const Tensor m = dataio::mean_image({one, two, three});
    for (std::int64_t i = 0; i < m.count(); ++i) CHECK(m[i] == 2.0f);
}

TEST_CASE("mean image is permutation invariant for byte images", "[dataio]") {
    vfn::Rng rng(8);
    std::vector<Tensor> images;
    for (int k = 0; k < 7; ++k) {
        Tensor img(Shape{1, 3, 3});
        for (auto& v : img) v = static_cast<float>(rng.uniform_int(0, 255));
        images.push_back(std::move(img));
    }
    const Tensor forward_order = dataio::mean_image(images);
    std::reverse(images.begin(), images.end());
    const Tensor reverse_order = dataio::mean_image(images);
    CHECK(forward_order == reverse_order);
}

TEST_CASE("mean image names the offending path on shape mismatch", "[dataio]") {
    std::vector<Tensor> images{Tensor(Shape{1, 2, 2}), Tensor(Shape{1, 3, 3})};
    std::vector<std::string> paths{"ok.pgm", "bad.pgm"};
    try {
        dataio::mean_image(images, &paths);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("bad.pgm") != std::string::npos);
    }
}

TEST_CASE("dataset loading enforces the configured side", "[dataio]") {
    support::TempDir tmp("vfn-data");
    vfn::Rng rng(9);
    Tensor img(Shape{1, 4, 4});
    for (auto& v : img) v = static_cast<float>(rng.uniform_int(0, 255));
    dataio::write_image_file(tmp.file("a.pgm"), img);
    dataio::write_image_file(tmp.file("b.pgm"), img);
    const auto manifest = dataio::read_manifest("a.pgm,0\nb.pgm,1\n");
    const auto ds = dataio::load_dataset(manifest, tmp.path.string());
    CHECK(ds.images.size() == 2);
    CHECK(ds.images[0] == img);
    CHECK_THROWS_AS(dataio::load_dataset(manifest, tmp.path.string(), 256), DataError);
    CHECK_NOTHROW(dataio::load_dataset(manifest, tmp.path.string(), 4));
    // missing file names the path
    const auto ghost = dataio::read_manifest("ghost.pgm,0\n");
    try {
        dataio::load_dataset(ghost, tmp.path.string());
        FAIL("expected IoError");
    } catch (const vfn::IoError& e) {
        CHECK(std::string(e.what()).find("ghost.pgm") != std::string::npos);
    }
}
