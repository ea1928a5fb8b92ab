#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vfn/errors.hpp"

namespace vfn::dataio {

/// `path,label` lines. Labels must form the contiguous range
/// [0, label_count); paths must be unique.
struct Manifest {
    std::vector<std::pair<std::string, int>> entries;
    int label_count = 0;
};

namespace detail {

inline std::string strip(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    return s.substr(a, b - a);
}

}  // namespace detail

/// Relaxed `name,label` list: labels are any non-negative integers.
/// Used for gallery/probe identity files.
inline std::vector<std::pair<std::string, int>> read_labeled_list(const std::string& text) {
    std::vector<std::pair<std::string, int>> out;
    std::istringstream is(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const std::string line = detail::strip(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.rfind(',');
        if (comma == std::string::npos || comma == 0) {
            throw DataError("line " + std::to_string(line_no) + ": expected 'path,label', got '" +
                            line + "'");
        }
        const std::string path = detail::strip(line.substr(0, comma));
        const std::string label_str = detail::strip(line.substr(comma + 1));
        int label;
        try {
            std::size_t pos = 0;
            label = std::stoi(label_str, &pos);
            if (pos != label_str.size() || label < 0) throw std::invalid_argument(label_str);
        } catch (const std::exception&) {
            throw DataError("line " + std::to_string(line_no) + ": invalid label '" + label_str + "'");
        }
        out.emplace_back(path, label);
    }
    return out;
}

inline Manifest read_manifest(const std::string& text) {
    Manifest m;
    m.entries = read_labeled_list(text);
    if (m.entries.empty()) throw DataError("manifest: no entries");
    std::set<std::string> paths;
    std::set<int> labels;
    int max_label = 0;
    for (const auto& [path, label] : m.entries) {
        if (!paths.insert(path).second) throw DataError("manifest: duplicate path '" + path + "'");
        labels.insert(label);
        max_label = std::max(max_label, label);
    }
    std::string missing;
    for (int l = 0; l <= max_label; ++l) {
        if (!labels.count(l)) missing += (missing.empty() ? "" : ", ") + std::to_string(l);
    }
    if (!missing.empty()) {
        throw DataError("manifest: label range has gaps, missing: " + missing);
    }
    m.label_count = max_label + 1;
    return m;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path + "'");
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace vfn::dataio
