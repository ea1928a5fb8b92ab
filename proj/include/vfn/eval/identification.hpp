#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "vfn/eval/features.hpp"
#include "vfn/eval/metrics.hpp"

namespace vfn::eval {

struct LabeledFeature {
    std::string name;
    int identity = -1;
    std::vector<float> vec;
};

/// Closed/open-set identification split. Unknown probes carry identities
/// absent from the gallery; the constructor validates that disjointness.
struct GalleryProbeSplit {
    std::vector<LabeledFeature> gallery;
    std::vector<LabeledFeature> known_probes;
    std::vector<LabeledFeature> unknown_probes;

    void validate() const {
        if (gallery.empty()) throw DataError("identification: empty gallery");
        std::set<int> ids;
        for (const auto& g : gallery) ids.insert(g.identity);
        for (const auto& p : known_probes) {
            if (!ids.count(p.identity)) {
                throw DataError("identification: known probe '" + p.name +
                                "' has identity absent from gallery");
            }
        }
        for (const auto& p : unknown_probes) {
            if (ids.count(p.identity)) {
                throw DataError("identification: unknown probe '" + p.name +
                                "' shares an identity with the gallery");
            }
        }
    }
};

/// Splits a probe list into known/unknown against the gallery identities.
inline GalleryProbeSplit build_split(const std::vector<std::pair<std::string, int>>& gallery,
                                     const std::vector<std::pair<std::string, int>>& probes,
                                     const FeatureFile& features) {
    GalleryProbeSplit split;
    std::set<int> gallery_ids;
    for (const auto& [name, id] : gallery) {
        split.gallery.push_back({name, id, features.lookup(name)});
        gallery_ids.insert(id);
    }
    for (const auto& [name, id] : probes) {
        LabeledFeature f{name, id, features.lookup(name)};
        if (gallery_ids.count(id)) {
            split.known_probes.push_back(std::move(f));
        } else {
            split.unknown_probes.push_back(std::move(f));
        }
    }
    split.validate();
    return split;
}

namespace detail {

struct BestMatch {
    std::size_t gallery_index = 0;
    float score = 0.0f;
};

// argmax over the gallery; ties keep the earliest gallery entry
inline BestMatch best_match(const GalleryProbeSplit& split, const LabeledFeature& probe) {
    BestMatch best;
    best.score = -2.0f;  // below any cosine
    for (std::size_t g = 0; g < split.gallery.size(); ++g) {
        const float s = cosine(probe.vec, split.gallery[g].vec);
        if (s > best.score) {
            best.score = s;
            best.gallery_index = g;
        }
    }
    return best;
}

}  // namespace detail

/// Rank-1 rate: fraction of known probes whose highest-cosine gallery
/// entry carries the probe's identity.
inline double identify_closed(const GalleryProbeSplit& split) {
    split.validate();
    if (split.known_probes.empty()) throw DataError("identification: no known probes");
    std::size_t correct = 0;
    for (const auto& probe : split.known_probes) {
        const auto best = detail::best_match(split, probe);
        if (split.gallery[best.gallery_index].identity == probe.identity) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(split.known_probes.size());
}

struct OpenSetResult {
    double dir = 0.0;      // detection and identification rate
    double threshold = 0.0;
};

/// DIR at the requested false-alarm rate. The threshold is the smallest
/// value for which the fraction of unknown probes whose best gallery
/// score exceeds it stays <= far; DIR counts known probes whose best
/// match is correct and exceeds that threshold.
inline OpenSetResult identify_open(const GalleryProbeSplit& split, double far) {
    split.validate();
    if (!(far > 0.0 && far < 1.0)) {
        throw UsageError("identification: far must lie in (0,1), got " + std::to_string(far));
    }
    if (split.unknown_probes.empty()) {
        throw DataError("identification: cannot calibrate FAR without unknown probes");
    }
    if (split.known_probes.empty()) throw DataError("identification: no known probes");

    std::vector<float> unknown_scores;
    unknown_scores.reserve(split.unknown_probes.size());
    for (const auto& probe : split.unknown_probes) {
        unknown_scores.push_back(detail::best_match(split, probe).score);
    }
    std::sort(unknown_scores.begin(), unknown_scores.end());
    const double total = static_cast<double>(unknown_scores.size());
    float threshold = unknown_scores.back();  // accepts none of the unknowns
    for (float candidate : unknown_scores) {
        const auto above = unknown_scores.end() -
                           std::upper_bound(unknown_scores.begin(), unknown_scores.end(), candidate);
        if (static_cast<double>(above) / total <= far) {
            threshold = candidate;
            break;
        }
    }

    std::size_t detected = 0;
    for (const auto& probe : split.known_probes) {
        const auto best = detail::best_match(split, probe);
        if (best.score > threshold &&
            split.gallery[best.gallery_index].identity == probe.identity) {
            ++detected;
        }
    }
    OpenSetResult r;
    r.dir = static_cast<double>(detected) / static_cast<double>(split.known_probes.size());
    r.threshold = threshold;
    return r;
}

}  // namespace vfn::eval
