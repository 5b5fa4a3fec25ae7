// SPDX-License-Identifier: Apache-2.0
#include "csta/tensor.hpp"

#include <cmath>
#include <utility>

#include "csta/errors.hpp"

namespace csta {

std::string shape_to_string(const Shape& shape) {
    std::string out = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i > 0) out += "x";
        out += std::to_string(shape[i]);
    }
    out += "]";
    return out;
}

std::size_t shape_volume(const Shape& shape) {
    std::size_t volume = 1;
    for (std::size_t d : shape) volume *= d;
    return volume;
}

Tensor::Tensor(Shape shape)
    : shape_(std::move(shape)), data_(shape_volume(shape_), 0.0) {
    for (std::size_t d : shape_) {
        if (d == 0) throw DimensionError("tensor dimensions must be positive, got " + shape_to_string(shape_));
    }
}

Tensor::Tensor(Shape shape, std::vector<double> data) : Tensor(std::move(shape)) {
    if (data.size() != data_.size()) {
        throw DimensionError("data length " + std::to_string(data.size()) +
                             " does not match shape " + shape_to_string(shape_) +
                             " (" + std::to_string(data_.size()) + " elements)");
    }
    data_ = std::move(data);
}

Tensor Tensor::zeros(Shape shape) { return Tensor(std::move(shape)); }

Tensor Tensor::ones(Shape shape) { return full(std::move(shape), 1.0); }

Tensor Tensor::full(Shape shape, double value) {
    Tensor t(std::move(shape));
    for (double& x : t.data_) x = value;
    return t;
}

Tensor Tensor::scalar(double value) {
    Tensor t{Shape{}};
    t.data_[0] = value;
    return t;
}

Tensor Tensor::vector(std::vector<double> values) {
    Shape shape{values.size()};
    return Tensor(std::move(shape), std::move(values));
}

std::size_t Tensor::dim(std::size_t axis) const {
    if (axis >= shape_.size()) {
        throw IndexError("axis " + std::to_string(axis) + " out of range for shape " +
                         shape_to_string(shape_));
    }
    return shape_[axis];
}

std::size_t Tensor::flat_index(std::initializer_list<std::size_t> index) const {
    if (index.size() != shape_.size()) {
        throw DimensionError("index rank " + std::to_string(index.size()) +
                             " does not match tensor shape " + shape_to_string(shape_));
    }
    std::size_t flat = 0;
    std::size_t axis = 0;
    for (std::size_t i : index) {
        if (i >= shape_[axis]) {
            throw IndexError("index " + std::to_string(i) + " out of range on axis " +
                             std::to_string(axis) + " of shape " + shape_to_string(shape_));
        }
        flat = flat * shape_[axis] + i;
        ++axis;
    }
    return flat;
}

double Tensor::at(std::initializer_list<std::size_t> index) const {
    return data_[flat_index(index)];
}

double& Tensor::at(std::initializer_list<std::size_t> index) {
    return data_[flat_index(index)];
}

std::span<const double> Tensor::grad() const {
    if (grad_.empty()) throw ContractError("tensor has no gradient buffer");
    return grad_;
}

std::span<double> Tensor::grad() {
    if (grad_.empty()) throw ContractError("tensor has no gradient buffer");
    return grad_;
}

void Tensor::zero_grad() {
    grad_.assign(data_.size(), 0.0);
}

void Tensor::accumulate_grad(std::span<const double> delta) {
    if (delta.size() != data_.size()) {
        throw DimensionError("gradient length " + std::to_string(delta.size()) +
                             " does not match tensor of " + std::to_string(data_.size()) +
                             " elements");
    }
    if (grad_.empty()) grad_.assign(data_.size(), 0.0);
    for (std::size_t i = 0; i < delta.size(); ++i) grad_[i] += delta[i];
}

bool Tensor::all_finite() const {
    for (double x : data_) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

bool Tensor::same_values(const Tensor& other) const {
    return shape_ == other.shape_ && data_ == other.data_;
}

} // namespace csta
