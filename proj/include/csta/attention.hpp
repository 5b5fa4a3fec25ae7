// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>

#include "csta/rng.hpp"
#include "csta/tape.hpp"
#include "csta/tensor.hpp"

namespace csta {

/// Learnable weights of the spatial and temporal attention subnetworks.
/// One weight row is shared across joints (resp. frames), with a per-joint
/// (resp. per-frame) bias.
struct AttentionParams {
    Tensor w_s; // [1 x 3T]
    Tensor b_s; // [N]
    Tensor w_t; // [1 x 3N]
    Tensor b_t; // [T]
};

AttentionParams zero_attention_params(std::size_t frames, std::size_t joints);

/// Fan-in scaled uniform init for the weight rows; biases stay zero so the
/// initial gates sit at 0.5.
void init_attention_params(AttentionParams& params, Rng& rng);

/// Which attention branches are active. `without_st` bypasses the block
/// entirely so the output equals the input bit for bit.
enum class AblationMode { full, without_s, without_t, without_st };

std::string to_string(AblationMode mode);
AblationMode ablation_mode_from_string(const std::string& text);

/// Tape handles for one attention block's parameters.
struct AttentionLeaves {
    Var w_s, b_s, w_t, b_t;
};

AttentionLeaves leaf_attention(Tape& tape, AttentionParams& params);
AttentionLeaves observe_attention(Tape& tape, const AttentionParams& params);

/// Per-joint gate s_j = sigmoid(w_s . y_j + b_s[j]), where y_j collects
/// joint j's coordinates across all frames (length 3T).
Var spatial_attention(Tape& tape, Var x, Var w_s, Var b_s);

/// Per-frame gate t_i = sigmoid(w_t . z_i + b_t[i]), where z_i collects
/// frame i's coordinates across all joints (length 3N).
Var temporal_attention(Tape& tape, Var x, Var w_t, Var b_t);

/// Rank-1 coupling of the two gate vectors: map[t][j] = t_att[t] * s_att[j].
Var couple(Tape& tape, Var t_att, Var s_att);

/// Gates the input cell-wise: out[t][j][c] = map[t][j] * x[t][j][c].
Var apply_attention(Tape& tape, Var x, Var map);

struct AttentionNodes {
    Var s_att, t_att, map, applied;
};

/// Full attention block per the requested mode. Disabled branches are
/// replaced by all-ones gates; `without_st` returns the input unchanged.
AttentionNodes csta_forward(Tape& tape, Var x, const AttentionLeaves& leaves,
                            AblationMode mode);

/// Plain-tensor snapshot of one attention evaluation.
struct AttentionOutput {
    Tensor s_att;   // [N]
    Tensor t_att;   // [T]
    Tensor map;     // [T x N]
    Tensor applied; // [T x N x 3]
};

/// Convenience wrapper running csta_forward on a private tape.
AttentionOutput csta_attention(const Tensor& x, const AttentionParams& params,
                               AblationMode mode);

/// CSV export, one row per (frame, joint) cell:
///   frame,joint,t_weight,s_weight,coupled
void write_attention_csv(std::ostream& out, const AttentionOutput& attention);

} // namespace csta
