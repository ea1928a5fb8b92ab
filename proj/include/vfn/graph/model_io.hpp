#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "vfn/graph/network.hpp"

namespace vfn::graph {

// Model container, all integers little-endian:
//   magic "VFNM", u32 version
//   u64 descriptor length, descriptor text
//   blocks: u32 name_len, name, u32 rank, u64 dims..., f32 data
//     (weight blocks first, then running-statistic blocks)
//   u64 FNV-1a checksum of every preceding byte

inline constexpr char kModelMagic[4] = {'V', 'F', 'N', 'M'};
inline constexpr std::uint32_t kModelVersion = 1;

namespace detail {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline void fnv_update(std::uint64_t& h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
}

class ChecksumWriter {
public:
    explicit ChecksumWriter(std::ostream& os) : os_(os) {}

    void bytes(const void* data, std::size_t n) {
        os_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
        fnv_update(hash_, data, n);
    }

    void u32(std::uint32_t v) {
        unsigned char b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        bytes(b, 4);
    }

    void u64(std::uint64_t v) {
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        bytes(b, 8);
    }

    void f32_array(const float* data, std::int64_t n) {
        std::vector<unsigned char> buf;
        const std::int64_t chunk = 1 << 18;
        for (std::int64_t start = 0; start < n; start += chunk) {
            const std::int64_t stop = std::min(n, start + chunk);
            buf.resize(static_cast<std::size_t>(stop - start) * 4);
            for (std::int64_t i = start; i < stop; ++i) {
                std::uint32_t bits;
                static_assert(sizeof(bits) == sizeof(float));
                std::memcpy(&bits, &data[i], 4);
                unsigned char* dst = buf.data() + (i - start) * 4;
                for (int k = 0; k < 4; ++k) dst[k] = static_cast<unsigned char>(bits >> (8 * k));
            }
            bytes(buf.data(), buf.size());
        }
    }

    /// Appends the checksum itself (excluded from the hash).
    void finish() {
        const std::uint64_t h = hash_;
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(h >> (8 * i));
        os_.write(reinterpret_cast<const char*>(b), 8);
    }

private:
    std::ostream& os_;
    std::uint64_t hash_ = kFnvOffset;
};

class BufferReader {
public:
    BufferReader(const unsigned char* data, std::size_t size) : data_(data), size_(size) {}

    std::size_t remaining() const { return size_ - pos_; }
    std::size_t position() const { return pos_; }

    const unsigned char* take(std::size_t n) {
        if (remaining() < n) throw DataError("model file: unexpected end of data");
        const unsigned char* p = data_ + pos_;
        pos_ += n;
        return p;
    }

    std::uint32_t u32() {
        const unsigned char* b = take(4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }

    std::uint64_t u64() {
        const unsigned char* b = take(8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }

    void f32_array(float* out, std::int64_t n) {
        const unsigned char* b = take(static_cast<std::size_t>(n) * 4);
        for (std::int64_t i = 0; i < n; ++i) {
            std::uint32_t bits = 0;
            for (int k = 3; k >= 0; --k) bits = (bits << 8) | b[i * 4 + k];
            std::memcpy(&out[i], &bits, 4);
        }
    }

private:
    const unsigned char* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

inline void write_block(ChecksumWriter& w, const std::string& name, const Tensor& t) {
    w.u32(static_cast<std::uint32_t>(name.size()));
    w.bytes(name.data(), name.size());
    w.u32(static_cast<std::uint32_t>(t.shape().rank()));
    for (int i = 0; i < t.shape().rank(); ++i) w.u64(static_cast<std::uint64_t>(t.shape().dim(i)));
    w.f32_array(t.data(), t.count());
}

struct Block {
    std::string name;
    Shape shape;
};

inline Block read_block_header(BufferReader& r) {
    Block b;
    const std::uint32_t name_len = r.u32();
    if (name_len == 0 || name_len > 4096) throw DataError("model file: implausible block name length");
    const unsigned char* nm = r.take(name_len);
    b.name.assign(reinterpret_cast<const char*>(nm), name_len);
    const std::uint32_t rank = r.u32();
    if (rank == 0 || rank > 8) throw DataError("model file: implausible block rank");
    std::vector<std::int64_t> dims;
    for (std::uint32_t i = 0; i < rank; ++i) {
        const std::uint64_t d = r.u64();
        if (d == 0 || d > (1ull << 32)) throw DataError("model file: implausible block extent");
        dims.push_back(static_cast<std::int64_t>(d));
    }
    b.shape = Shape(dims);
    return b;
}

}  // namespace detail

/// Serializes descriptor, weights and normalization statistics into a
/// single artifact. The write is atomic: a sibling temp file is renamed
/// over `path` only after the full payload and checksum are on disk.
inline void save_model(Network& net, const std::string& path) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open '" + tmp.string() + "' for writing");
        detail::ChecksumWriter w(os);
        w.bytes(kModelMagic, 4);
        w.u32(kModelVersion);
        const std::string desc = serialize_descriptor(net.descriptor());
        w.u64(desc.size());
        w.bytes(desc.data(), desc.size());
        for (const auto& blk : net.weight_blocks()) detail::write_block(w, blk.name, *blk.tensor);
        for (const auto& blk : net.fnl_blocks()) detail::write_block(w, blk.name, *blk.tensor);
        w.finish();
        os.flush();
        if (!os) {
            os.close();
            fs::remove(tmp);
            throw IoError("failed writing model to '" + tmp.string() + "'");
        }
    }
    fs::rename(tmp, target);
}

inline Network load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open model file '" + path + "'");
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());
    if (buf.size() < 4 + 4 + 8 + 8) throw DataError("model file '" + path + "': truncated");

    // trailing checksum covers everything before it
    std::uint64_t stored = 0;
    for (int i = 7; i >= 0; --i) stored = (stored << 8) | buf[buf.size() - 8 + i];
    std::uint64_t actual = detail::kFnvOffset;
    detail::fnv_update(actual, buf.data(), buf.size() - 8);
    if (stored != actual) {
        throw DataError("model file '" + path + "': checksum mismatch (file damaged or truncated)");
    }

    detail::BufferReader r(buf.data(), buf.size() - 8);
    const unsigned char* magic = r.take(4);
    if (std::memcmp(magic, kModelMagic, 4) != 0) {
        throw DataError("model file '" + path + "': bad magic");
    }
    const std::uint32_t version = r.u32();
    if (version != kModelVersion) {
        throw DataError("model file '" + path + "': format version " + std::to_string(version) +
                        ", this build reads version " + std::to_string(kModelVersion));
    }
    const std::uint64_t desc_len = r.u64();
    if (desc_len > r.remaining()) throw DataError("model file '" + path + "': truncated descriptor");
    const unsigned char* dp = r.take(desc_len);
    const std::string desc_text(reinterpret_cast<const char*>(dp), desc_len);

    Network net{parse_descriptor(desc_text)};
    auto read_into = [&](Network::ParamRef ref, bool shape_from_block) {
        const detail::Block blk = detail::read_block_header(r);
        if (blk.name != ref.name) {
            throw DataError("model file: expected block '" + ref.name + "', found '" + blk.name + "'");
        }
        if (shape_from_block) {
            *ref.tensor = Tensor(blk.shape);
        } else if (blk.shape != ref.tensor->shape()) {
            throw DataError("model file: block '" + blk.name + "' has shape " +
                            blk.shape.to_string() + ", descriptor requires " +
                            ref.tensor->shape().to_string());
        }
        r.f32_array(ref.tensor->data(), ref.tensor->count());
    };
    for (const auto& blk : net.weight_blocks()) {
        // the input mean keeps its source resolution; consistency is
        // checked against the declared input below
        const bool is_mean = blk.name.size() > 5 && blk.name.substr(blk.name.size() - 5) == ".mean";
        read_into(blk, is_mean);
    }
    if (net.has_input_mean()) {
        const Shape in = net.descriptor().input_shape();
        const Shape& m = net.input_mean().shape();
        if (m.rank() != in.rank() || m.dim(0) != in.dim(0) ||
            (in.rank() == 3 && (m.dim(1) < in.dim(1) || m.dim(2) < in.dim(2)))) {
            throw DataError("model file: mean image " + m.to_string() +
                            " incompatible with input " + in.to_string());
        }
    }
    for (const auto& blk : net.fnl_blocks()) read_into(blk, false);
    if (r.remaining() != 0) {
        throw DataError("model file '" + path + "': " + std::to_string(r.remaining()) +
                        " unexpected trailing bytes");
    }
    return net;
}

}  // namespace vfn::graph
