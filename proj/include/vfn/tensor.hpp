#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <utility>
#include <vector>

#include "vfn/shape.hpp"

namespace vfn {

/// Dense value container: a shape plus one contiguous row-major array.
template <typename T>
class BasicTensor {
public:
    BasicTensor() = default;

    explicit BasicTensor(Shape shape, T fill_value = T(0))
        : shape_(std::move(shape)),
          data_(static_cast<std::size_t>(shape_.count()), fill_value) {}

    BasicTensor(Shape shape, std::vector<T> values) : shape_(std::move(shape)), data_(std::move(values)) {
        if (static_cast<std::int64_t>(data_.size()) != shape_.count()) {
            throw ShapeError("tensor: data length " + std::to_string(data_.size()) +
                             " does not match shape " + shape_.to_string());
        }
    }

    BasicTensor(Shape shape, std::initializer_list<T> values)
        : BasicTensor(std::move(shape), std::vector<T>(values)) {}

    const Shape& shape() const { return shape_; }
    std::int64_t count() const { return static_cast<std::int64_t>(data_.size()); }
    bool empty() const { return data_.empty(); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& values() { return data_; }
    const std::vector<T>& values() const { return data_; }

    T& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
    const T& operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

    T& at(const std::vector<std::int64_t>& coords) { return data_[static_cast<std::size_t>(linear_index(shape_, coords))]; }
    const T& at(const std::vector<std::int64_t>& coords) const {
        return data_[static_cast<std::size_t>(linear_index(shape_, coords))];
    }

    void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

    /// Same data, new shape; element counts must agree.
    BasicTensor reshaped(Shape new_shape) const {
        if (new_shape.count() != count()) {
            throw ShapeError("reshape: " + shape_.to_string() + " -> " + new_shape.to_string() +
                             " changes element count");
        }
        BasicTensor out;
        out.shape_ = std::move(new_shape);
        out.data_ = data_;
        return out;
    }

    bool operator==(const BasicTensor& other) const {
        return shape_ == other.shape_ && data_ == other.data_;
    }

    auto begin() { return data_.begin(); }
    auto end() { return data_.end(); }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

private:
    Shape shape_;
    std::vector<T> data_;
};

using Tensor = BasicTensor<float>;
using TensorD = BasicTensor<double>;

/// Train/test switch shared by dropout, normalization, and the executor.
enum class Mode { train, test };

}  // namespace vfn
