#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "vfn/tensor.hpp"

namespace vfn::dataio {

// Binary netpbm decoding: P5 (grayscale) and P6 (RGB), maxval 255 only.
// Pixels come out as floats in [0,255], channel-planar (C,H,W).

namespace detail {

struct PnmHeader {
    int channels = 0;
    std::int64_t width = 0;
    std::int64_t height = 0;
    std::size_t data_offset = 0;
};

inline PnmHeader parse_pnm_header(const std::vector<std::uint8_t>& bytes) {
    std::size_t pos = 0;
    const auto at_end = [&] { return pos >= bytes.size(); };
    auto next_token = [&]() -> std::string {
        // whitespace and '#' comments separate header tokens
        while (!at_end()) {
            const char c = static_cast<char>(bytes[pos]);
            if (c == '#') {
                while (!at_end() && bytes[pos] != '\n') ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos;
            } else {
                break;
            }
        }
        std::string tok;
        while (!at_end()) {
            const char c = static_cast<char>(bytes[pos]);
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '#') break;
            tok += c;
            ++pos;
        }
        if (tok.empty()) throw DataError("image: truncated header");
        return tok;
    };

    PnmHeader h;
    const std::string magic = next_token();
    if (magic == "P5") {
        h.channels = 1;
    } else if (magic == "P6") {
        h.channels = 3;
    } else {
        throw DataError("image: unsupported format '" + magic + "' (need binary P5 or P6)");
    }
    auto parse_dim = [&](const char* what) {
        const std::string tok = next_token();
        try {
            const long long v = std::stoll(tok);
            if (v < 1) throw std::invalid_argument(tok);
            return static_cast<std::int64_t>(v);
        } catch (const std::exception&) {
            throw DataError(std::string("image: invalid ") + what + " '" + tok + "'");
        }
    };
    h.width = parse_dim("width");
    h.height = parse_dim("height");
    const std::string maxval = next_token();
    if (maxval != "255") {
        throw DataError("image: maxval must be 255, got '" + maxval + "'");
    }
    if (at_end()) throw DataError("image: truncated after header");
    ++pos;  // single whitespace byte before the raster
    h.data_offset = pos;
    return h;
}

}  // namespace detail

/// Decodes a binary PGM/PPM byte buffer into a (C,H,W) tensor.
inline Tensor decode_image(const std::vector<std::uint8_t>& bytes) {
    const auto h = detail::parse_pnm_header(bytes);
    const std::int64_t pixels = h.width * h.height;
    const std::size_t need = static_cast<std::size_t>(pixels) * h.channels;
    if (bytes.size() - h.data_offset < need) {
        throw DataError("image: truncated pixel data (" +
                        std::to_string(bytes.size() - h.data_offset) + " of " +
                        std::to_string(need) + " bytes)");
    }
    Tensor out(Shape{h.channels, h.height, h.width});
    const std::uint8_t* src = bytes.data() + h.data_offset;
    if (h.channels == 1) {
        for (std::int64_t i = 0; i < pixels; ++i) out[i] = static_cast<float>(src[i]);
    } else {
        // interleaved RGB -> planar
        for (std::int64_t i = 0; i < pixels; ++i) {
            out[i] = static_cast<float>(src[i * 3]);
            out[pixels + i] = static_cast<float>(src[i * 3 + 1]);
            out[2 * pixels + i] = static_cast<float>(src[i * 3 + 2]);
        }
    }
    return out;
}

/// Encodes a (1,H,W) or (3,H,W) tensor of [0,255] values back to bytes.
inline std::vector<std::uint8_t> encode_image(const Tensor& img) {
    if (img.shape().rank() != 3 || (img.shape().dim(0) != 1 && img.shape().dim(0) != 3)) {
        throw DataError("image: encode expects (1,H,W) or (3,H,W), got " + img.shape().to_string());
    }
    const std::int64_t c = img.shape().dim(0);
    const std::int64_t hh = img.shape().dim(1);
    const std::int64_t ww = img.shape().dim(2);
    std::string header = (c == 1 ? "P5\n" : "P6\n") + std::to_string(ww) + " " +
                         std::to_string(hh) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    const std::int64_t pixels = hh * ww;
    auto clamp_byte = [](float v) {
        const long r = std::lround(v);
        return static_cast<std::uint8_t>(r < 0 ? 0 : (r > 255 ? 255 : r));
    };
    if (c == 1) {
        for (std::int64_t i = 0; i < pixels; ++i) out.push_back(clamp_byte(img[i]));
    } else {
        for (std::int64_t i = 0; i < pixels; ++i) {
            out.push_back(clamp_byte(img[i]));
            out.push_back(clamp_byte(img[pixels + i]));
            out.push_back(clamp_byte(img[2 * pixels + i]));
        }
    }
    return out;
}

inline Tensor read_image_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open image '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                    std::istreambuf_iterator<char>());
    try {
        return decode_image(bytes);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

inline void write_image_file(const std::string& path, const Tensor& img) {
    const auto bytes = encode_image(img);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw IoError("failed writing image '" + path + "'");
}

}  // namespace vfn::dataio
