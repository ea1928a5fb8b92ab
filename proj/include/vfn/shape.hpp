#pragma once

#include <cstdint>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "vfn/errors.hpp"

namespace vfn {

/// Extents of a dense row-major tensor. Rank >= 1, every extent >= 1.
class Shape {
public:
    Shape() = default;  // empty placeholder; validated shapes come from the ctors below

    Shape(std::initializer_list<std::int64_t> dims) : dims_(dims) { validate(); }

    explicit Shape(std::vector<std::int64_t> dims) : dims_(std::move(dims)) { validate(); }

    int rank() const { return static_cast<int>(dims_.size()); }

    std::int64_t dim(int axis) const {
        if (axis < 0 || axis >= rank()) {
            throw IndexError("shape: axis " + std::to_string(axis) + " out of range for rank " +
                             std::to_string(rank()));
        }
        return dims_[static_cast<std::size_t>(axis)];
    }

    const std::vector<std::int64_t>& dims() const { return dims_; }

    std::int64_t count() const {
        std::int64_t n = dims_.empty() ? 0 : 1;
        for (std::int64_t d : dims_) n *= d;
        return n;
    }

    bool empty() const { return dims_.empty(); }

    bool operator==(const Shape& other) const { return dims_ == other.dims_; }
    bool operator!=(const Shape& other) const { return dims_ != other.dims_; }

    std::string to_string() const {
        std::ostringstream os;
        os << '(';
        for (std::size_t i = 0; i < dims_.size(); ++i) {
            if (i) os << ',';
            os << dims_[i];
        }
        os << ')';
        return os.str();
    }

private:
    void validate() const {
        if (dims_.empty()) throw ShapeError("shape: rank must be >= 1");
        for (std::size_t i = 0; i < dims_.size(); ++i) {
            if (dims_[i] < 1) {
                throw ShapeError("shape: extent of axis " + std::to_string(i) +
                                 " must be >= 1, got " + std::to_string(dims_[i]));
            }
        }
    }

    std::vector<std::int64_t> dims_;
};

/// Row-major offset of `coords` within `shape` (last dimension fastest).
inline std::int64_t linear_index(const Shape& shape, const std::vector<std::int64_t>& coords) {
    if (static_cast<int>(coords.size()) != shape.rank()) {
        throw IndexError("linear_index: coordinate rank " + std::to_string(coords.size()) +
                         " does not match shape rank " + std::to_string(shape.rank()));
    }
    std::int64_t offset = 0;
    for (int axis = 0; axis < shape.rank(); ++axis) {
        const std::int64_t c = coords[static_cast<std::size_t>(axis)];
        if (c < 0 || c >= shape.dim(axis)) {
            throw IndexError("linear_index: coordinate " + std::to_string(c) + " on axis " +
                             std::to_string(axis) + " outside extent " +
                             std::to_string(shape.dim(axis)));
        }
        offset = offset * shape.dim(axis) + c;
    }
    return offset;
}

/// Inverse of linear_index over the same row-major order.
inline std::vector<std::int64_t> unravel_index(const Shape& shape, std::int64_t offset) {
    if (offset < 0 || offset >= shape.count()) {
        throw IndexError("unravel_index: offset " + std::to_string(offset) +
                         " outside element count " + std::to_string(shape.count()));
    }
    std::vector<std::int64_t> coords(static_cast<std::size_t>(shape.rank()));
    for (int axis = shape.rank() - 1; axis >= 0; --axis) {
        coords[static_cast<std::size_t>(axis)] = offset % shape.dim(axis);
        offset /= shape.dim(axis);
    }
    return coords;
}

}  // namespace vfn
