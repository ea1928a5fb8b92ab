#pragma once

#include <cstdio>
#include <string>

#include "vfn/eval/identification.hpp"
#include "vfn/eval/verification.hpp"

namespace vfn::eval {

namespace detail {

inline std::string fmt(double v, const char* spec = "%.4f") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

}  // namespace detail

/// Key-value report for the pair-verification protocol.
inline std::string verification_report(const VerifyReport& r) {
    std::string out;
    out += "mean_accuracy " + detail::fmt(r.mean_accuracy) + "\n";
    out += "stddev_accuracy " + detail::fmt(r.stddev_accuracy) + "\n";
    for (std::size_t f = 0; f < r.fold_accuracy.size(); ++f) {
        out += "fold_" + std::to_string(f) + "_accuracy " + detail::fmt(r.fold_accuracy[f]) + "\n";
    }
    for (std::size_t f = 0; f < r.thresholds.size(); ++f) {
        out += "threshold_" + std::to_string(f) + " " + detail::fmt(r.thresholds[f], "%.6f") + "\n";
    }
    return out;
}

/// Key-value report for closed- plus open-set identification.
inline std::string identification_report(double rank1, const OpenSetResult& open, double far) {
    std::string out;
    out += "rank1 " + detail::fmt(rank1) + "\n";
    out += "dir_at_far " + detail::fmt(open.dir) + "\n";
    out += "far " + detail::fmt(far) + "\n";
    out += "open_threshold " + detail::fmt(open.threshold, "%.6f") + "\n";
    return out;
}

}  // namespace vfn::eval
