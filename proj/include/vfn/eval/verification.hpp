#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "vfn/eval/metrics.hpp"

namespace vfn::eval {

struct VerifyPair {
    std::string a;
    std::string b;
    bool same = false;
};

/// K-fold pair protocol. The standard configuration is 10 folds of 300
/// intra-class and 300 inter-class pairs, but the harness accepts any
/// fold count >= 2 and any per-fold mix.
struct PairFolds {
    std::vector<std::vector<VerifyPair>> folds;
};

/// Text lines `fold_idx,sample_a,sample_b,same_flag`; fold indices must
/// cover [0, nfolds).
inline PairFolds parse_pair_file(const std::string& text) {
    PairFolds pf;
    std::istringstream is(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        // strip comments and surrounding space
        const auto hash = raw.find('#');
        std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> parts;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        parts.push_back(cur);
        if (parts.size() != 4) {
            throw DataError("pair file line " + std::to_string(line_no) +
                            ": expected fold,sample_a,sample_b,same_flag");
        }
        int fold;
        int flag;
        try {
            fold = std::stoi(parts[0]);
            flag = std::stoi(parts[3]);
            if (fold < 0 || (flag != 0 && flag != 1)) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw DataError("pair file line " + std::to_string(line_no) + ": bad fold or flag");
        }
        if (static_cast<std::size_t>(fold) >= pf.folds.size()) {
            pf.folds.resize(static_cast<std::size_t>(fold) + 1);
        }
        pf.folds[static_cast<std::size_t>(fold)].push_back({parts[1], parts[2], flag == 1});
    }
    for (std::size_t f = 0; f < pf.folds.size(); ++f) {
        if (pf.folds[f].empty()) {
            throw DataError("pair file: fold " + std::to_string(f) + " has no pairs");
        }
    }
    if (pf.folds.size() < 2) throw DataError("pair file: need at least 2 folds");
    return pf;
}

struct VerifyReport {
    std::vector<double> fold_accuracy;
    std::vector<double> thresholds;
    double mean_accuracy = 0.0;
    double stddev_accuracy = 0.0;
};

namespace detail {

// decision rule: predict "same" iff similarity >= threshold
inline double accuracy_at(const std::vector<float>& intra, const std::vector<float>& inter,
                          float threshold) {
    // arrays are sorted ascending
    const auto intra_below = std::lower_bound(intra.begin(), intra.end(), threshold) - intra.begin();
    const auto inter_below = std::lower_bound(inter.begin(), inter.end(), threshold) - inter.begin();
    const double correct = static_cast<double>(intra.size() - static_cast<std::size_t>(intra_below)) +
                           static_cast<double>(inter_below);
    return correct / static_cast<double>(intra.size() + inter.size());
}

}  // namespace detail

/// For each held-out fold, the threshold maximizing accuracy over the
/// other folds (ties -> lowest) is applied to the held-out pairs.
/// `similarity` maps a pair of sample names to a score; the cosine-backed
/// overload below is the usual entry point.
inline VerifyReport verify_kfold(const PairFolds& pf,
                                 const std::function<float(const std::string&, const std::string&)>& similarity) {
    const std::size_t nfolds = pf.folds.size();
    std::vector<std::vector<float>> intra_sims(nfolds);
    std::vector<std::vector<float>> inter_sims(nfolds);
    for (std::size_t f = 0; f < nfolds; ++f) {
        for (const auto& pair : pf.folds[f]) {
            (pair.same ? intra_sims[f] : inter_sims[f]).push_back(similarity(pair.a, pair.b));
        }
    }

    VerifyReport report;
    for (std::size_t held = 0; held < nfolds; ++held) {
        std::vector<float> train_intra;
        std::vector<float> train_inter;
        for (std::size_t f = 0; f < nfolds; ++f) {
            if (f == held) continue;
            train_intra.insert(train_intra.end(), intra_sims[f].begin(), intra_sims[f].end());
            train_inter.insert(train_inter.end(), inter_sims[f].begin(), inter_sims[f].end());
        }
        std::sort(train_intra.begin(), train_intra.end());
        std::sort(train_inter.begin(), train_inter.end());

        // candidate thresholds: every training similarity plus one above the max
        std::vector<float> candidates;
        candidates.reserve(train_intra.size() + train_inter.size() + 1);
        candidates.insert(candidates.end(), train_intra.begin(), train_intra.end());
        candidates.insert(candidates.end(), train_inter.begin(), train_inter.end());
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
        if (candidates.empty()) throw DataError("verify: no training pairs for fold " + std::to_string(held));
        candidates.push_back(std::nextafter(candidates.back(), std::numeric_limits<float>::infinity()));

        float best_threshold = candidates.front();
        double best_acc = -1.0;
        for (float t : candidates) {
            const double acc = detail::accuracy_at(train_intra, train_inter, t);
            if (acc > best_acc) {  // strict: ties keep the lowest threshold
                best_acc = acc;
                best_threshold = t;
            }
        }

        std::vector<float> held_intra = intra_sims[held];
        std::vector<float> held_inter = inter_sims[held];
        std::sort(held_intra.begin(), held_intra.end());
        std::sort(held_inter.begin(), held_inter.end());
        report.fold_accuracy.push_back(detail::accuracy_at(held_intra, held_inter, best_threshold));
        report.thresholds.push_back(best_threshold);
    }

    double sum = 0.0;
    for (double a : report.fold_accuracy) sum += a;
    report.mean_accuracy = sum / static_cast<double>(nfolds);
    double sq = 0.0;
    for (double a : report.fold_accuracy) sq += (a - report.mean_accuracy) * (a - report.mean_accuracy);
    report.stddev_accuracy = nfolds > 1 ? std::sqrt(sq / static_cast<double>(nfolds - 1)) : 0.0;
    return report;
}

}  // namespace vfn::eval
