// SPDX-License-Identifier: Apache-2.0
#include "csta/attention.hpp"

#include <cmath>
#include <ostream>

#include "csta/errors.hpp"

namespace csta {

AttentionParams zero_attention_params(std::size_t frames, std::size_t joints) {
    AttentionParams params;
    params.w_s = Tensor({1, 3 * frames});
    params.b_s = Tensor({joints});
    params.w_t = Tensor({1, 3 * joints});
    params.b_t = Tensor({frames});
    return params;
}

void init_attention_params(AttentionParams& params, Rng& rng) {
    const double bound_s = 1.0 / std::sqrt(static_cast<double>(params.w_s.dim(1)));
    for (double& w : params.w_s.data()) w = rng.uniform_real(-bound_s, bound_s);
    const double bound_t = 1.0 / std::sqrt(static_cast<double>(params.w_t.dim(1)));
    for (double& w : params.w_t.data()) w = rng.uniform_real(-bound_t, bound_t);
}

std::string to_string(AblationMode mode) {
    switch (mode) {
    case AblationMode::full: return "full";
    case AblationMode::without_s: return "without_S";
    case AblationMode::without_t: return "without_T";
    case AblationMode::without_st: return "without_ST";
    }
    throw ContractError("unknown ablation mode");
}

AblationMode ablation_mode_from_string(const std::string& text) {
    if (text == "full") return AblationMode::full;
    if (text == "without_S") return AblationMode::without_s;
    if (text == "without_T") return AblationMode::without_t;
    if (text == "without_ST") return AblationMode::without_st;
    throw ValidationError("unknown ablation mode '" + text +
                          "' (expected full, without_S, without_T or without_ST)");
}

AttentionLeaves leaf_attention(Tape& tape, AttentionParams& params) {
    return AttentionLeaves{tape.leaf(params.w_s), tape.leaf(params.b_s),
                           tape.leaf(params.w_t), tape.leaf(params.b_t)};
}

AttentionLeaves observe_attention(Tape& tape, const AttentionParams& params) {
    return AttentionLeaves{tape.observe(params.w_s), tape.observe(params.b_s),
                           tape.observe(params.w_t), tape.observe(params.b_t)};
}

namespace {

void check_input(const Tensor& x) {
    if (x.rank() != 3 || x.dim(2) != 3) {
        throw DimensionError("attention input must be TxNx3, got " +
                             shape_to_string(x.shape()));
    }
}

} // namespace

Var spatial_attention(Tape& tape, Var x, Var w_s, Var b_s) {
    const Tensor& X = tape.value(x);
    check_input(X);
    const std::size_t frames = X.dim(0), joints = X.dim(1);
    const Tensor& W = tape.value(w_s);
    if (W.rank() != 2 || W.dim(0) != 1 || W.dim(1) != 3 * frames) {
        throw DimensionError("spatial weight must be 1x" + std::to_string(3 * frames) +
                             ", got " + shape_to_string(W.shape()));
    }
    if (tape.value(b_s).shape() != Shape{joints}) {
        throw DimensionError("spatial bias must have one entry per joint, got " +
                             shape_to_string(tape.value(b_s).shape()));
    }
    // Y: one row per joint holding that joint's whole trajectory.
    Var y = tape.reshape(tape.permute(x, {1, 0, 2}), {joints, 3 * frames});
    Var products = tape.reshape(tape.matmul(y, tape.permute(w_s, {1, 0})), {joints});
    return tape.sigmoid(tape.add(products, b_s));
}

Var temporal_attention(Tape& tape, Var x, Var w_t, Var b_t) {
    const Tensor& X = tape.value(x);
    check_input(X);
    const std::size_t frames = X.dim(0), joints = X.dim(1);
    const Tensor& W = tape.value(w_t);
    if (W.rank() != 2 || W.dim(0) != 1 || W.dim(1) != 3 * joints) {
        throw DimensionError("temporal weight must be 1x" + std::to_string(3 * joints) +
                             ", got " + shape_to_string(W.shape()));
    }
    if (tape.value(b_t).shape() != Shape{frames}) {
        throw DimensionError("temporal bias must have one entry per frame, got " +
                             shape_to_string(tape.value(b_t).shape()));
    }
    // Z: one row per frame holding all joints of that frame.
    Var z = tape.reshape(x, {frames, 3 * joints});
    Var products = tape.reshape(tape.matmul(z, tape.permute(w_t, {1, 0})), {frames});
    return tape.sigmoid(tape.add(products, b_t));
}

Var couple(Tape& tape, Var t_att, Var s_att) {
    if (tape.value(t_att).size() == 0 || tape.value(s_att).size() == 0) {
        throw ContractError("couple requires non-empty attention vectors");
    }
    return tape.outer_product(t_att, s_att);
}

Var apply_attention(Tape& tape, Var x, Var map) {
    return tape.elementwise_mul(x, map);
}

AttentionNodes csta_forward(Tape& tape, Var x, const AttentionLeaves& leaves,
                            AblationMode mode) {
    const Tensor& X = tape.value(x);
    check_input(X);
    const std::size_t frames = X.dim(0), joints = X.dim(1);

    if (mode == AblationMode::without_st) {
        AttentionNodes nodes;
        nodes.s_att = tape.constant(Tensor::ones({joints}));
        nodes.t_att = tape.constant(Tensor::ones({frames}));
        nodes.map = tape.constant(Tensor::ones({frames, joints}));
        nodes.applied = x;
        return nodes;
    }

    AttentionNodes nodes;
    nodes.s_att = mode == AblationMode::without_s
                      ? tape.constant(Tensor::ones({joints}))
                      : spatial_attention(tape, x, leaves.w_s, leaves.b_s);
    nodes.t_att = mode == AblationMode::without_t
                      ? tape.constant(Tensor::ones({frames}))
                      : temporal_attention(tape, x, leaves.w_t, leaves.b_t);
    nodes.map = couple(tape, nodes.t_att, nodes.s_att);
    nodes.applied = apply_attention(tape, x, nodes.map);
    return nodes;
}

AttentionOutput csta_attention(const Tensor& x, const AttentionParams& params,
                               AblationMode mode) {
    Tape tape;
    Var input = tape.observe(x);
    AttentionNodes nodes = csta_forward(tape, input, observe_attention(tape, params), mode);
    AttentionOutput out;
    out.s_att = tape.value(nodes.s_att);
    out.t_att = tape.value(nodes.t_att);
    out.map = tape.value(nodes.map);
    out.applied = tape.value(nodes.applied);
    return out;
}

void write_attention_csv(std::ostream& out, const AttentionOutput& attention) {
    const std::size_t frames = attention.t_att.size();
    const std::size_t joints = attention.s_att.size();
    out << "frame,joint,t_weight,s_weight,coupled\n";
    out.precision(17);
    for (std::size_t t = 0; t < frames; ++t) {
        for (std::size_t j = 0; j < joints; ++j) {
            out << t << ',' << j << ',' << attention.t_att[t] << ',' << attention.s_att[j]
                << ',' << attention.map[t * joints + j] << '\n';
        }
    }
}

} // namespace csta
