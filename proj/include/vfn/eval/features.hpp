#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "vfn/graph/network.hpp"

namespace vfn::eval {

/// Which point of the feature layer to read: its output (after the fused
/// ReLU) or the value just before the activation.
enum class FeatureTap { post_activation, pre_activation };

struct FeatureProducer {
    std::string layer_name;
    bool fused_act = false;
};

inline FeatureProducer find_feature_producer(const graph::NetworkDescriptor& desc) {
    for (const auto& l : desc.layers) {
        for (const auto& e : l.outputs) {
            if (e != desc.feature_edge) continue;
            FeatureProducer p;
            p.layer_name = l.name;
            if (l.kind == graph::LayerKind::conv) {
                p.fused_act = std::get<graph::ConvDef>(l.params).act == graph::Activation::relu;
            } else if (l.kind == graph::LayerKind::fc) {
                p.fused_act = std::get<graph::FcDef>(l.params).act == graph::Activation::relu;
            }
            return p;
        }
    }
    throw DataError("descriptor lacks the declared feature edge '" + desc.feature_edge + "'");
}

/// Runs one image through the network in test mode and returns the
/// declared feature edge, flattened. The image must already be
/// preprocessed (mean-subtracted, cropped to the input shape).
inline std::vector<float> extract_feature(graph::Network& net, const Tensor& image,
                                          FeatureTap tap = FeatureTap::post_activation) {
    const auto& desc = net.descriptor();
    if (desc.feature_edge.empty()) {
        throw DataError("network descriptor declares no feature edge");
    }
    Tensor batched = image.reshaped([&] {
        std::vector<std::int64_t> dims{1};
        for (int i = 0; i < image.shape().rank(); ++i) dims.push_back(image.shape().dim(i));
        return Shape(dims);
    }());
    const FeatureProducer producer = find_feature_producer(desc);
    if (tap == FeatureTap::pre_activation && producer.fused_act) {
        net.capture_preact(producer.layer_name);
        net.forward(batched, Mode::test);
        const Tensor& t = net.preact(producer.layer_name);
        return std::vector<float>(t.data(), t.data() + t.count());
    }
    auto edges = net.forward(batched, Mode::test);
    const Tensor& t = edges.at(desc.feature_edge);
    return std::vector<float>(t.data(), t.data() + t.count());
}

// ---------------------------------------------------------------------------
// Feature file: a run of blocks in the model container's framing,
// [u32 name_len][name][u32 rank][u64 dims...][f32 data], until EOF.
// ---------------------------------------------------------------------------

struct FeatureFile {
    std::vector<std::string> names;             // file order
    std::vector<std::vector<float>> vectors;
    std::map<std::string, std::size_t> index;

    const std::vector<float>& lookup(const std::string& name) const {
        const auto it = index.find(name);
        if (it == index.end()) throw DataError("no feature for sample '" + name + "'");
        return vectors[it->second];
    }
};

inline void write_features(const std::string& path, const std::vector<std::string>& names,
                           const std::vector<std::vector<float>>& vectors) {
    if (names.size() != vectors.size()) throw DataError("feature writer: name/vector count mismatch");
    namespace fs = std::filesystem;
    const fs::path tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open '" + tmp.string() + "' for writing");
        auto put_u32 = [&os](std::uint32_t v) {
            unsigned char b[4];
            for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
            os.write(reinterpret_cast<const char*>(b), 4);
        };
        auto put_u64 = [&os](std::uint64_t v) {
            unsigned char b[8];
            for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
            os.write(reinterpret_cast<const char*>(b), 8);
        };
        for (std::size_t i = 0; i < names.size(); ++i) {
            put_u32(static_cast<std::uint32_t>(names[i].size()));
            os.write(names[i].data(), static_cast<std::streamsize>(names[i].size()));
            put_u32(1);
            put_u64(vectors[i].size());
            for (float v : vectors[i]) {
                std::uint32_t bits;
                std::memcpy(&bits, &v, 4);
                unsigned char b[4];
                for (int k = 0; k < 4; ++k) b[k] = static_cast<unsigned char>(bits >> (8 * k));
                os.write(reinterpret_cast<const char*>(b), 4);
            }
        }
        os.flush();
        if (!os) {
            os.close();
            fs::remove(tmp);
            throw IoError("failed writing features to '" + tmp.string() + "'");
        }
    }
    fs::rename(tmp, path);
}

inline FeatureFile read_features(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open feature file '" + path + "'");
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());
    FeatureFile f;
    std::size_t pos = 0;
    auto need = [&](std::size_t n) {
        if (buf.size() - pos < n) throw DataError("feature file '" + path + "': truncated record");
    };
    auto get_u32 = [&] {
        need(4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | buf[pos + static_cast<std::size_t>(i)];
        pos += 4;
        return v;
    };
    auto get_u64 = [&] {
        need(8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | buf[pos + static_cast<std::size_t>(i)];
        pos += 8;
        return v;
    };
    while (pos < buf.size()) {
        const std::uint32_t name_len = get_u32();
        need(name_len);
        std::string name(reinterpret_cast<const char*>(buf.data() + pos), name_len);
        pos += name_len;
        const std::uint32_t rank = get_u32();
        if (rank < 1 || rank > 8) throw DataError("feature file '" + path + "': implausible rank");
        std::uint64_t count = 1;
        for (std::uint32_t i = 0; i < rank; ++i) count *= get_u64();
        need(static_cast<std::size_t>(count) * 4);
        std::vector<float> vec(static_cast<std::size_t>(count));
        for (std::uint64_t i = 0; i < count; ++i) {
            std::uint32_t bits = 0;
            for (int k = 3; k >= 0; --k) bits = (bits << 8) | buf[pos + static_cast<std::size_t>(i) * 4 + static_cast<std::size_t>(k)];
            std::memcpy(&vec[static_cast<std::size_t>(i)], &bits, 4);
        }
        pos += static_cast<std::size_t>(count) * 4;
        if (f.index.count(name)) throw DataError("feature file '" + path + "': duplicate record '" + name + "'");
        f.index.emplace(name, f.names.size());
        f.names.push_back(std::move(name));
        f.vectors.push_back(std::move(vec));
    }
    return f;
}

}  // namespace vfn::eval
