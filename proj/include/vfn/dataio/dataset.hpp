#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vfn/dataio/image.hpp"
#include "vfn/dataio/manifest.hpp"
#include "vfn/tensor.hpp"

namespace vfn::dataio {

struct Dataset {
    std::vector<std::string> paths;
    std::vector<Tensor> images;
    std::vector<int> labels;
    int label_count = 0;
};

/// Decodes every manifest entry. When `require_side` is set, images must
/// be exactly (C, side, side), the pre-aligned contract; the loader never
/// resizes.
inline Dataset load_dataset(const Manifest& m, const std::string& base_dir,
                            std::optional<std::int64_t> require_side = std::nullopt) {
    Dataset d;
    d.label_count = m.label_count;
    for (const auto& [rel, label] : m.entries) {
        const std::filesystem::path p = base_dir.empty()
                                            ? std::filesystem::path(rel)
                                            : std::filesystem::path(base_dir) / rel;
        Tensor img = read_image_file(p.string());
        if (require_side &&
            (img.shape().dim(1) != *require_side || img.shape().dim(2) != *require_side)) {
            throw DataError(p.string() + ": expected " + std::to_string(*require_side) + "x" +
                            std::to_string(*require_side) + " image, got " +
                            img.shape().to_string());
        }
        d.paths.push_back(p.string());
        d.images.push_back(std::move(img));
        d.labels.push_back(label);
    }
    return d;
}

/// Elementwise arithmetic mean. Accumulation is double-precision, which
/// makes the result exact (hence order-independent) for byte-valued images.
inline Tensor mean_image(const std::vector<Tensor>& images,
                         const std::vector<std::string>* paths = nullptr) {
    if (images.empty()) throw DataError("mean image: empty dataset");
    const Shape shape = images.front().shape();
    std::vector<double> acc(static_cast<std::size_t>(shape.count()), 0.0);
    for (std::size_t k = 0; k < images.size(); ++k) {
        if (images[k].shape() != shape) {
            const std::string who = paths && k < paths->size() ? (*paths)[k] : ("image " + std::to_string(k));
            throw DataError("mean image: " + who + " has shape " + images[k].shape().to_string() +
                            ", expected " + shape.to_string());
        }
        for (std::int64_t i = 0; i < images[k].count(); ++i) acc[static_cast<std::size_t>(i)] += images[k][i];
    }
    Tensor out(shape);
    const double inv = 1.0 / static_cast<double>(images.size());
    for (std::int64_t i = 0; i < out.count(); ++i)
        out[i] = static_cast<float>(acc[static_cast<std::size_t>(i)] * inv);
    return out;
}

}  // namespace vfn::dataio
