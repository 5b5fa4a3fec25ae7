// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>

#include "csta/attention.hpp"
#include "csta/skeleton.hpp"
#include "csta/tape.hpp"

namespace csta {

struct ConvSpec {
    std::size_t channels = 0;
    std::size_t kernel = 3;
    std::size_t stride = 1;
    std::size_t pad = 1;
};

/// Static architecture description. Validation happens at construction
/// time so a bad configuration never fails mid-forward.
struct ModelConfig {
    std::size_t frames = 30;        // T
    std::size_t joints = 25;        // N
    std::size_t interp_joints = 30; // M, skeleton transformer output
    std::size_t num_classes = 0;
    std::array<ConvSpec, 3> conv = {{{8, 3, 1, 1}, {16, 3, 2, 1}, {16, 3, 2, 1}}};
    std::size_t fc1_width = 256;
    std::size_t fc2_width = 128;
    AblationMode mode = AblationMode::full;
    /// When false the attention block is absent from the graph altogether
    /// (not just bypassed); used to cross-check the without_ST mode.
    bool attention_enabled = true;
    bool center_on_spine = false;

    void validate() const;
    /// (channels, height, width) after each conv layer.
    std::array<std::array<std::size_t, 3>, 3> conv_output_shapes() const;
    std::size_t stream_feature_length() const;
};

struct ConvParams {
    Tensor kernels; // [C_out x C_in x k x k]
    Tensor bias;    // [C_out]
};

struct StreamParams {
    AttentionParams attention;
    Tensor transformer; // [N x M]
    std::array<ConvParams, 3> conv;
};

struct ModelParams {
    StreamParams position;
    StreamParams motion;
    Tensor fc1_w, fc1_b;
    Tensor fc2_w, fc2_b;
    Tensor fc3_w, fc3_b;
};

ModelParams make_model_params(const ModelConfig& config);
ModelParams init_model_params(const ModelConfig& config, std::uint64_t seed);

/// Visits every parameter tensor in a fixed order with a stable name.
void for_each_param(ModelParams& params,
                    const std::function<void(const std::string&, Tensor&)>& visit);
void for_each_param(const ModelParams& params,
                    const std::function<void(const std::string&, const Tensor&)>& visit);

struct StreamLeaves {
    AttentionLeaves attention;
    Var transformer;
    std::array<std::array<Var, 2>, 3> conv; // kernels, bias
};

struct ModelLeaves {
    StreamLeaves position;
    StreamLeaves motion;
    Var fc1_w, fc1_b, fc2_w, fc2_b, fc3_w, fc3_b;
};

ModelLeaves leaf_model(Tape& tape, ModelParams& params);
ModelLeaves observe_model(Tape& tape, const ModelParams& params);

/// Maps the N physical joints to M interpolated joints per frame and
/// coordinate: out[t][m][c] = sum_j x[t][j][c] * a[j][m].
Var skeleton_transform(Tape& tape, Var x, Var a);

/// One stream: attention block, skeleton transformer, three conv+relu
/// layers, flattened to a feature vector.
Var stream_forward(Tape& tape, Var x, const StreamLeaves& leaves, const ModelConfig& config);

/// Both streams concatenated through the three-layer classification head.
Var model_forward(Tape& tape, Var position, Var motion, const ModelLeaves& leaves,
                  const ModelConfig& config);

/// Convenience inference on a private tape.
Tensor model_logits(const FixedSample& sample, const ModelParams& params,
                    const ModelConfig& config);

/// Lowest-index argmax of a logits vector.
std::size_t argmax_class(const Tensor& logits);

} // namespace csta
