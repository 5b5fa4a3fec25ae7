// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "csta/tensor.hpp"

namespace csta {

/// Handle to a value recorded on a Tape.
struct Var {
    std::size_t id = 0;
};

/// Eager reverse-mode automatic differentiation over an ordered tape.
///
/// Every operation executes immediately and records a backward rule. The
/// recording order is the topological order: an operation's inputs are
/// always earlier tape entries. `backward()` seeds the scalar loss with 1
/// and sweeps the tape once in reverse, accumulating gradients additively
/// so fan-out is handled naturally. Gradients of `leaf()` tensors whose
/// `requires_grad()` flag is set are added into their grad buffers.
///
/// A tape and the tensors it references form one single-threaded unit of
/// work. Leaf tensors must outlive the tape.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Records an external tensor. Its gradient is written back on backward()
    /// when the tensor requires grad. The tensor must outlive the tape.
    Var leaf(Tensor& tensor);

    /// Records a read-only external tensor that never receives gradients.
    Var observe(const Tensor& tensor);

    /// Records a tape-owned constant.
    Var constant(Tensor value);

    const Tensor& value(Var v) const;

    /// Node-level gradient after backward(); empty if the node was not
    /// reached by the sweep.
    std::span<const double> grad_of(Var v) const;

    std::size_t node_count() const { return nodes_.size(); }

    /// Smallest |x| seen by any relu on this tape; +inf when none ran.
    /// Finite-difference checks use it to keep probes away from the kink.
    double min_abs_relu_input() const { return min_abs_relu_input_; }

    // -- operations ---------------------------------------------------------

    Var matmul(Var a, Var b);
    Var outer_product(Var u, Var v);
    Var elementwise_mul(Var a, Var b);
    Var add(Var a, Var b);
    Var scale(Var x, double factor);
    Var sum(Var x);
    Var sigmoid(Var x);
    Var relu(Var x);
    Var conv2d(Var input, Var kernels, std::pair<std::size_t, std::size_t> stride,
               std::pair<std::size_t, std::size_t> padding);
    Var channel_bias(Var x, Var bias);
    Var linear(Var x, Var weight, Var bias);
    Var softmax_cross_entropy(Var logits, std::size_t label);
    Var reshape(Var x, Shape shape);
    Var permute(Var x, std::vector<std::size_t> axes);
    Var concat(std::span<const Var> parts, std::size_t axis);
    Var broadcast_channel(Var map, std::size_t channels);

    /// Reverse sweep from a scalar loss. Visits each recorded operation at
    /// most once; leaf tensors with requires_grad receive accumulated grads.
    void backward(Var loss);

private:
    struct Node {
        Tensor owned;
        Tensor* external = nullptr;
        const Tensor* external_const = nullptr;
        bool needs_grad = false;
        std::vector<double> grad;
        std::function<void(Tape&)> back;
    };

    std::vector<Node> nodes_;
    double min_abs_relu_input_ = std::numeric_limits<double>::infinity();

    const Tensor& val(std::size_t id) const;
    bool needs(std::size_t id) const { return nodes_[id].needs_grad; }
    std::vector<double>& grad_buffer(std::size_t id);
    Var push(Tensor value, bool needs_grad, std::function<void(Tape&)> back);
    void check_id(Var v) const;
};

} // namespace csta
