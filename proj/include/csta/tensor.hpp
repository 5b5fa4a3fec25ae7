// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace csta {

/// Dimension sizes, outermost first. An empty shape denotes a scalar.
using Shape = std::vector<std::size_t>;

std::string shape_to_string(const Shape& shape);
std::size_t shape_volume(const Shape& shape);

/// Dense row-major tensor of 64-bit reals with an optional gradient buffer.
///
/// Values and gradients are flat arrays of length `size()`. The gradient
/// buffer is absent until `zero_grad()` or `accumulate_grad()` touches it.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape);
    Tensor(Shape shape, std::vector<double> data);

    static Tensor zeros(Shape shape);
    static Tensor ones(Shape shape);
    static Tensor full(Shape shape, double value);
    static Tensor scalar(double value);
    static Tensor vector(std::vector<double> values);

    const Shape& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    std::size_t dim(std::size_t axis) const;

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }
    double operator[](std::size_t flat) const { return data_[flat]; }
    double& operator[](std::size_t flat) { return data_[flat]; }

    /// Bounds-checked multi-index access.
    double at(std::initializer_list<std::size_t> index) const;
    double& at(std::initializer_list<std::size_t> index);
    std::size_t flat_index(std::initializer_list<std::size_t> index) const;

    bool requires_grad() const { return requires_grad_; }
    void set_requires_grad(bool value) { requires_grad_ = value; }

    bool has_grad() const { return !grad_.empty(); }
    std::span<const double> grad() const;
    std::span<double> grad();
    void zero_grad();
    void drop_grad() { grad_.clear(); }
    void accumulate_grad(std::span<const double> delta);

    bool all_finite() const;

    bool same_values(const Tensor& other) const;

private:
    Shape shape_;
    std::vector<double> data_;
    std::vector<double> grad_;
    bool requires_grad_ = false;
};

} // namespace csta
