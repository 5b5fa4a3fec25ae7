// SPDX-License-Identifier: Apache-2.0
#include "csta/model.hpp"

#include <cmath>

#include "csta/errors.hpp"
#include "csta/rng.hpp"

namespace csta {

void ModelConfig::validate() const {
    if (frames == 0 || joints == 0 || interp_joints == 0) {
        throw ContractError("model dimensions must be positive");
    }
    if (num_classes == 0) throw ContractError("num_classes must be positive");
    if (fc1_width == 0 || fc2_width == 0) throw ContractError("fc widths must be positive");
    std::size_t height = frames, width = interp_joints;
    for (std::size_t layer = 0; layer < conv.size(); ++layer) {
        const ConvSpec& spec = conv[layer];
        if (spec.channels == 0 || spec.kernel == 0 || spec.stride == 0) {
            throw ContractError("conv" + std::to_string(layer + 1) +
                                " channels/kernel/stride must be positive");
        }
        if (spec.kernel > height + 2 * spec.pad || spec.kernel > width + 2 * spec.pad) {
            throw DimensionError("conv" + std::to_string(layer + 1) + " kernel " +
                                 std::to_string(spec.kernel) + " larger than its padded input " +
                                 std::to_string(height + 2 * spec.pad) + "x" +
                                 std::to_string(width + 2 * spec.pad));
        }
        height = (height + 2 * spec.pad - spec.kernel) / spec.stride + 1;
        width = (width + 2 * spec.pad - spec.kernel) / spec.stride + 1;
        if (height == 0 || width == 0) {
            throw DimensionError("conv" + std::to_string(layer + 1) +
                                 " produces an empty feature map");
        }
    }
}

std::array<std::array<std::size_t, 3>, 3> ModelConfig::conv_output_shapes() const {
    std::array<std::array<std::size_t, 3>, 3> shapes{};
    std::size_t height = frames, width = interp_joints;
    for (std::size_t layer = 0; layer < conv.size(); ++layer) {
        const ConvSpec& spec = conv[layer];
        height = (height + 2 * spec.pad - spec.kernel) / spec.stride + 1;
        width = (width + 2 * spec.pad - spec.kernel) / spec.stride + 1;
        shapes[layer] = {spec.channels, height, width};
    }
    return shapes;
}

std::size_t ModelConfig::stream_feature_length() const {
    const auto shapes = conv_output_shapes();
    return shapes[2][0] * shapes[2][1] * shapes[2][2];
}

ModelParams make_model_params(const ModelConfig& config) {
    config.validate();
    ModelParams params;
    for (StreamParams* stream : {&params.position, &params.motion}) {
        stream->attention = zero_attention_params(config.frames, config.joints);
        stream->transformer = Tensor({config.joints, config.interp_joints});
        std::size_t in_channels = 3;
        for (std::size_t layer = 0; layer < config.conv.size(); ++layer) {
            const ConvSpec& spec = config.conv[layer];
            stream->conv[layer].kernels =
                Tensor({spec.channels, in_channels, spec.kernel, spec.kernel});
            stream->conv[layer].bias = Tensor({spec.channels});
            in_channels = spec.channels;
        }
    }
    const std::size_t concat = 2 * config.stream_feature_length();
    params.fc1_w = Tensor({config.fc1_width, concat});
    params.fc1_b = Tensor({config.fc1_width});
    params.fc2_w = Tensor({config.fc2_width, config.fc1_width});
    params.fc2_b = Tensor({config.fc2_width});
    params.fc3_w = Tensor({config.num_classes, config.fc2_width});
    params.fc3_b = Tensor({config.num_classes});
    return params;
}

namespace {

void fill_uniform(Tensor& tensor, double bound, Rng& rng) {
    for (double& v : tensor.data()) v = rng.uniform_real(-bound, bound);
}

void init_stream(StreamParams& stream, const ModelConfig& config, Rng& rng) {
    init_attention_params(stream.attention, rng);
    // Identity over the first min(N, M) interpolated joints; extra columns
    // start as small noise.
    for (std::size_t j = 0; j < config.joints; ++j) {
        for (std::size_t m = 0; m < config.interp_joints; ++m) {
            double value = (j == m) ? 1.0 : 0.0;
            if (m >= config.joints) value = rng.uniform_real(-0.01, 0.01);
            stream.transformer.at({j, m}) = value;
        }
    }
    for (ConvParams& conv : stream.conv) {
        const double fan_in = static_cast<double>(conv.kernels.dim(1) * conv.kernels.dim(2) *
                                                  conv.kernels.dim(3));
        fill_uniform(conv.kernels, 1.0 / std::sqrt(fan_in), rng);
    }
}

} // namespace

ModelParams init_model_params(const ModelConfig& config, std::uint64_t seed) {
    ModelParams params = make_model_params(config);
    Rng rng(seed);
    init_stream(params.position, config, rng);
    init_stream(params.motion, config, rng);
    fill_uniform(params.fc1_w, 1.0 / std::sqrt(static_cast<double>(params.fc1_w.dim(1))), rng);
    fill_uniform(params.fc2_w, 1.0 / std::sqrt(static_cast<double>(params.fc2_w.dim(1))), rng);
    fill_uniform(params.fc3_w, 1.0 / std::sqrt(static_cast<double>(params.fc3_w.dim(1))), rng);
    return params;
}

namespace {

template <typename Params, typename Visit>
void visit_params(Params& params, const Visit& visit) {
    const char* streams[2] = {"pos", "mot"};
    auto* stream_ptrs0 = &params.position;
    auto* stream_ptrs1 = &params.motion;
    decltype(stream_ptrs0) streams_p[2] = {stream_ptrs0, stream_ptrs1};
    for (std::size_t s = 0; s < 2; ++s) {
        const std::string prefix = streams[s];
        auto& stream = *streams_p[s];
        visit(prefix + ".attention.w_s", stream.attention.w_s);
        visit(prefix + ".attention.b_s", stream.attention.b_s);
        visit(prefix + ".attention.w_t", stream.attention.w_t);
        visit(prefix + ".attention.b_t", stream.attention.b_t);
        visit(prefix + ".transformer", stream.transformer);
        for (std::size_t layer = 0; layer < stream.conv.size(); ++layer) {
            visit(prefix + ".conv" + std::to_string(layer + 1) + ".kernels",
                  stream.conv[layer].kernels);
            visit(prefix + ".conv" + std::to_string(layer + 1) + ".bias",
                  stream.conv[layer].bias);
        }
    }
    visit("fc1.w", params.fc1_w);
    visit("fc1.b", params.fc1_b);
    visit("fc2.w", params.fc2_w);
    visit("fc2.b", params.fc2_b);
    visit("fc3.w", params.fc3_w);
    visit("fc3.b", params.fc3_b);
}

} // namespace

void for_each_param(ModelParams& params,
                    const std::function<void(const std::string&, Tensor&)>& visit) {
    visit_params(params, visit);
}

void for_each_param(const ModelParams& params,
                    const std::function<void(const std::string&, const Tensor&)>& visit) {
    visit_params(params, visit);
}

namespace {

template <typename TapeVisit, typename Params>
StreamLeaves leaf_stream(Tape& tape, Params& stream, const TapeVisit& record) {
    StreamLeaves leaves;
    leaves.attention =
        AttentionLeaves{record(tape, stream.attention.w_s), record(tape, stream.attention.b_s),
                        record(tape, stream.attention.w_t), record(tape, stream.attention.b_t)};
    leaves.transformer = record(tape, stream.transformer);
    for (std::size_t layer = 0; layer < stream.conv.size(); ++layer) {
        leaves.conv[layer] = {record(tape, stream.conv[layer].kernels),
                              record(tape, stream.conv[layer].bias)};
    }
    return leaves;
}

template <typename TapeVisit, typename Params>
ModelLeaves leaf_model_impl(Tape& tape, Params& params, const TapeVisit& record) {
    ModelLeaves leaves;
    leaves.position = leaf_stream(tape, params.position, record);
    leaves.motion = leaf_stream(tape, params.motion, record);
    leaves.fc1_w = record(tape, params.fc1_w);
    leaves.fc1_b = record(tape, params.fc1_b);
    leaves.fc2_w = record(tape, params.fc2_w);
    leaves.fc2_b = record(tape, params.fc2_b);
    leaves.fc3_w = record(tape, params.fc3_w);
    leaves.fc3_b = record(tape, params.fc3_b);
    return leaves;
}

} // namespace

ModelLeaves leaf_model(Tape& tape, ModelParams& params) {
    return leaf_model_impl(tape, params,
                           [](Tape& t, Tensor& tensor) { return t.leaf(tensor); });
}

ModelLeaves observe_model(Tape& tape, const ModelParams& params) {
    return leaf_model_impl(tape, params,
                           [](Tape& t, const Tensor& tensor) { return t.observe(tensor); });
}

Var skeleton_transform(Tape& tape, Var x, Var a) {
    const Tensor& X = tape.value(x);
    const Tensor& A = tape.value(a);
    if (X.rank() != 3 || A.rank() != 2 || X.dim(1) != A.dim(0)) {
        throw DimensionError("skeleton_transform: incompatible shapes " +
                             shape_to_string(X.shape()) + " and " + shape_to_string(A.shape()));
    }
    const std::size_t frames = X.dim(0), joints = X.dim(1), interp = A.dim(1);
    const std::size_t channels = X.dim(2);
    // out[t][m][c] = sum_j x[t][j][c] a[j][m], computed as A^T (M x N) times
    // the joint-major matrix of x.
    Var joint_major = tape.reshape(tape.permute(x, {1, 0, 2}), {joints, frames * channels});
    Var product = tape.matmul(tape.permute(a, {1, 0}), joint_major);
    return tape.permute(tape.reshape(product, {interp, frames, channels}), {1, 0, 2});
}

Var stream_forward(Tape& tape, Var x, const StreamLeaves& leaves, const ModelConfig& config) {
    Var gated = x;
    if (config.attention_enabled) {
        gated = csta_forward(tape, x, leaves.attention, config.mode).applied;
    }
    Var interpolated = skeleton_transform(tape, gated, leaves.transformer);
    Var image = tape.permute(interpolated, {2, 0, 1}); // 3 x T x M
    Var feature = image;
    for (std::size_t layer = 0; layer < config.conv.size(); ++layer) {
        const ConvSpec& spec = config.conv[layer];
        feature = tape.conv2d(feature, leaves.conv[layer][0], {spec.stride, spec.stride},
                              {spec.pad, spec.pad});
        feature = tape.channel_bias(feature, leaves.conv[layer][1]);
        feature = tape.relu(feature);
    }
    return tape.reshape(feature, {config.stream_feature_length()});
}

Var model_forward(Tape& tape, Var position, Var motion, const ModelLeaves& leaves,
                  const ModelConfig& config) {
    Var u_position = stream_forward(tape, position, leaves.position, config);
    Var u_motion = stream_forward(tape, motion, leaves.motion, config);
    const Var parts[2] = {u_position, u_motion};
    Var fused = tape.concat(parts, 0);
    Var h1 = tape.relu(tape.linear(fused, leaves.fc1_w, leaves.fc1_b));
    Var h2 = tape.relu(tape.linear(h1, leaves.fc2_w, leaves.fc2_b));
    return tape.linear(h2, leaves.fc3_w, leaves.fc3_b);
}

Tensor model_logits(const FixedSample& sample, const ModelParams& params,
                    const ModelConfig& config) {
    Tape tape;
    ModelLeaves leaves = observe_model(tape, params);
    Var logits = model_forward(tape, tape.observe(sample.position),
                               tape.observe(sample.motion), leaves, config);
    return tape.value(logits);
}

std::size_t argmax_class(const Tensor& logits) {
    if (logits.rank() != 1 || logits.size() == 0) {
        throw DimensionError("argmax_class expects a non-empty vector, got " +
                             shape_to_string(logits.shape()));
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < logits.size(); ++i) {
        if (logits[i] > logits[best]) best = i; // ties keep the lowest index
    }
    return best;
}

} // namespace csta
