// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csta/model.hpp"
#include "csta/skeleton.hpp"

namespace csta {

enum class OptimizerKind { sgd_momentum, adam };

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_kind_from_string(const std::string& text);

struct TrainConfig {
    OptimizerKind optimizer = OptimizerKind::adam;
    double learning_rate = 1e-3;
    double momentum = 0.9; // sgd_momentum only
    double beta1 = 0.9;    // adam only
    double beta2 = 0.999;  // adam only
    double weight_decay = 0.0;
    std::size_t batch_size = 16;
    std::size_t epochs = 200;
    std::uint64_t seed = 0;
    AugmentConfig augment;

    void validate() const;
};

/// Adam epsilon is fixed, not configurable.
inline constexpr double kAdamEpsilon = 1e-8;

/// Per-parameter optimizer slots, aligned with for_each_param order.
struct OptimizerState {
    std::vector<std::vector<double>> first_moment;  // adam m / sgd velocity
    std::vector<std::vector<double>> second_moment; // adam v
    std::size_t step = 0;
};

OptimizerState make_optimizer_state(const ModelParams& params);

/// One update from the gradients currently held by the parameter tensors.
/// SGD momentum: v <- mu v + g; p <- p - lr (v + wd p).
/// Adam: bias-corrected first/second moments, eps 1e-8.
/// Throws DivergedError on non-finite gradients.
void optimizer_step(ModelParams& params, OptimizerState& state, const TrainConfig& config);

struct EpochStats {
    double loss = 0.0;
    double accuracy = 0.0;
};

struct TrainResult {
    ModelParams params;
    std::vector<EpochStats> history;
};

/// Mini-batch training over the train split of `protocol` (datasets without
/// split tables train on every sample). Augmentation, initialization and
/// shuffling all derive from config.seed, so identical inputs give
/// bit-identical results.
TrainResult train(const Dataset& dataset, const ModelConfig& model_config,
                  const TrainConfig& train_config, const std::string& protocol = "default");

struct EvalReport {
    double accuracy = 0.0;
    std::vector<std::vector<std::size_t>> confusion; // [true][predicted]
    std::vector<double> per_class_accuracy;
    std::size_t sample_count = 0;
};

/// Deterministic evaluation: evenly spaced frame selection, argmax with
/// lowest-index tie break. Throws ContractError on an empty split.
EvalReport evaluate(const Dataset& dataset, const std::string& protocol, SplitTag tag,
                    const ModelParams& params, const ModelConfig& config);

struct AblationRow {
    AblationMode mode;
    std::optional<EvalReport> report; // absent when this row failed
    std::string error;
};

/// Trains and evaluates all four attention settings from the same seed.
/// A failure in one row is recorded there and does not abort the others.
std::vector<AblationRow> ablation_suite(const Dataset& dataset, const ModelConfig& model_config,
                                        const TrainConfig& train_config,
                                        const std::string& protocol = "default");

/// Evaluation-time sample preparation shared by evaluate() and the CLI.
FixedSample prepare_eval_sample(const SkeletonSequence& seq, const ModelConfig& config);

} // namespace csta
