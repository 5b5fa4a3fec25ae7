// SPDX-License-Identifier: Apache-2.0
#include "csta/trainer.hpp"

#include <cmath>

#include "csta/errors.hpp"
#include "csta/rng.hpp"

namespace csta {

std::string to_string(OptimizerKind kind) {
    return kind == OptimizerKind::adam ? "adam" : "sgd_momentum";
}

OptimizerKind optimizer_kind_from_string(const std::string& text) {
    if (text == "adam") return OptimizerKind::adam;
    if (text == "sgd_momentum") return OptimizerKind::sgd_momentum;
    throw ValidationError("unknown optimizer '" + text + "' (expected adam or sgd_momentum)");
}

void TrainConfig::validate() const {
    // A zero learning rate is allowed: it makes training a provable no-op,
    // which the test suite relies on.
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ContractError("learning rate must be finite and >= 0");
    }
    if (batch_size == 0) throw ContractError("batch size must be >= 1");
    if (epochs == 0) throw ContractError("epochs must be >= 1");
    if (augment.crop_copies > 0 &&
        (!(augment.crop_ratio_lo > 0.0) || !(augment.crop_ratio_lo <= augment.crop_ratio_hi) ||
         !(augment.crop_ratio_hi <= 1.0))) {
        throw ContractError("crop ratio range must satisfy 0 < lo <= hi <= 1");
    }
}

OptimizerState make_optimizer_state(const ModelParams& params) {
    OptimizerState state;
    for_each_param(params, [&](const std::string&, const Tensor& tensor) {
        state.first_moment.emplace_back(tensor.size(), 0.0);
        state.second_moment.emplace_back(tensor.size(), 0.0);
    });
    return state;
}

void optimizer_step(ModelParams& params, OptimizerState& state, const TrainConfig& config) {
    ++state.step;
    const double lr = config.learning_rate;
    std::size_t index = 0;
    for_each_param(params, [&](const std::string& name, Tensor& tensor) {
        std::span<double> grad = tensor.grad();
        for (double g : grad) {
            if (!std::isfinite(g)) {
                throw DivergedError("non-finite gradient in " + name, 0, state.step);
            }
        }
        std::span<double> value = tensor.data();
        if (config.optimizer == OptimizerKind::sgd_momentum) {
            std::vector<double>& velocity = state.first_moment[index];
            for (std::size_t i = 0; i < value.size(); ++i) {
                velocity[i] = config.momentum * velocity[i] + grad[i];
                value[i] -= lr * (velocity[i] + config.weight_decay * value[i]);
            }
        } else {
            std::vector<double>& m = state.first_moment[index];
            std::vector<double>& v = state.second_moment[index];
            const double bias1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
            const double bias2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
            for (std::size_t i = 0; i < value.size(); ++i) {
                m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * grad[i];
                v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
                const double m_hat = m[i] / bias1;
                const double v_hat = v[i] / bias2;
                value[i] -= lr * (m_hat / (std::sqrt(v_hat) + kAdamEpsilon) +
                                  config.weight_decay * value[i]);
            }
        }
        ++index;
    });
}

FixedSample prepare_eval_sample(const SkeletonSequence& seq, const ModelConfig& config) {
    FixedSample sample = uniform_fixed_sample(seq, config.frames);
    if (config.center_on_spine) {
        center_on_spine(sample.position);
        sample.motion = motion_stream(sample.position);
    }
    return sample;
}

TrainResult train(const Dataset& dataset, const ModelConfig& model_config,
                  const TrainConfig& train_config, const std::string& protocol) {
    model_config.validate();
    train_config.validate();
    dataset.validate();
    if (dataset.samples.empty()) throw ContractError("cannot train on an empty dataset");
    if (dataset.class_count() != model_config.num_classes) {
        throw ContractError("dataset has " + std::to_string(dataset.class_count()) +
                            " classes, model config expects " +
                            std::to_string(model_config.num_classes));
    }

    const std::vector<std::size_t> train_indices =
        dataset.split_indices(protocol, SplitTag::train);
    if (train_indices.empty()) throw ContractError("train split is empty");
    std::vector<SkeletonSequence> train_sequences;
    train_sequences.reserve(train_indices.size());
    for (std::size_t i : train_indices) train_sequences.push_back(dataset.samples[i]);

    // Independent deterministic streams: augmentation, init, batch shuffle.
    Rng root(train_config.seed);
    AugmentConfig augment_config = train_config.augment;
    augment_config.frames = model_config.frames;
    std::vector<FixedSample> samples =
        augment(train_sequences, augment_config, root.child(0).next_u64());
    if (samples.empty()) throw ContractError("augmentation produced no training samples");
    if (model_config.center_on_spine) {
        for (FixedSample& sample : samples) {
            center_on_spine(sample.position);
            sample.motion = motion_stream(sample.position);
        }
    }

    TrainResult result;
    result.params = init_model_params(model_config, root.child(1).next_u64());
    for_each_param(result.params,
                   [](const std::string&, Tensor& tensor) { tensor.set_requires_grad(true); });
    OptimizerState state = make_optimizer_state(result.params);
    Rng shuffle_rng = root.child(2);

    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 0; epoch < train_config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t correct = 0;
        std::size_t step = 0;
        for (std::size_t begin = 0; begin < order.size(); begin += train_config.batch_size) {
            const std::size_t end = std::min(order.size(), begin + train_config.batch_size);
            const std::size_t batch = end - begin;

            Tape tape;
            ModelLeaves leaves = leaf_model(tape, result.params);
            Var total{};
            for (std::size_t k = begin; k < end; ++k) {
                const FixedSample& sample = samples[order[k]];
                Var logits = model_forward(tape, tape.observe(sample.position),
                                           tape.observe(sample.motion), leaves, model_config);
                if (argmax_class(tape.value(logits)) == sample.label) ++correct;
                Var loss = tape.softmax_cross_entropy(logits, sample.label);
                total = (k == begin) ? loss : tape.add(total, loss);
            }
            Var mean = tape.scale(total, 1.0 / static_cast<double>(batch));
            const double loss_value = tape.value(mean)[0];
            if (!std::isfinite(loss_value)) {
                throw DivergedError("training loss is not finite", epoch + 1, step + 1);
            }
            epoch_loss += loss_value * static_cast<double>(batch);

            for_each_param(result.params,
                           [](const std::string&, Tensor& tensor) { tensor.zero_grad(); });
            tape.backward(mean);
            try {
                optimizer_step(result.params, state, train_config);
            } catch (const DivergedError&) {
                throw DivergedError("non-finite gradient", epoch + 1, step + 1);
            }
            ++step;
        }
        result.history.push_back(
            EpochStats{epoch_loss / static_cast<double>(order.size()),
                       static_cast<double>(correct) / static_cast<double>(order.size())});
    }
    for_each_param(result.params, [](const std::string&, Tensor& tensor) {
        tensor.set_requires_grad(false);
        tensor.drop_grad();
    });
    return result;
}

EvalReport evaluate(const Dataset& dataset, const std::string& protocol, SplitTag tag,
                    const ModelParams& params, const ModelConfig& config) {
    config.validate();
    dataset.validate();
    if (dataset.class_count() != config.num_classes) {
        throw ContractError("dataset has " + std::to_string(dataset.class_count()) +
                            " classes, model config expects " +
                            std::to_string(config.num_classes));
    }
    const std::vector<std::size_t> indices = dataset.split_indices(protocol, tag);
    if (indices.empty()) throw ContractError("evaluation split is empty");

    const std::size_t classes = config.num_classes;
    EvalReport report;
    report.confusion.assign(classes, std::vector<std::size_t>(classes, 0));
    for (std::size_t i : indices) {
        const SkeletonSequence& seq = dataset.samples[i];
        const FixedSample sample = prepare_eval_sample(seq, config);
        const Tensor logits = model_logits(sample, params, config);
        report.confusion[seq.label][argmax_class(logits)] += 1;
    }
    report.sample_count = indices.size();
    std::size_t diagonal = 0;
    report.per_class_accuracy.assign(classes, 0.0);
    for (std::size_t c = 0; c < classes; ++c) {
        std::size_t row_total = 0;
        for (std::size_t p = 0; p < classes; ++p) row_total += report.confusion[c][p];
        if (row_total > 0) {
            report.per_class_accuracy[c] =
                static_cast<double>(report.confusion[c][c]) / static_cast<double>(row_total);
        }
        diagonal += report.confusion[c][c];
    }
    report.accuracy = static_cast<double>(diagonal) / static_cast<double>(report.sample_count);
    return report;
}

std::vector<AblationRow> ablation_suite(const Dataset& dataset, const ModelConfig& model_config,
                                        const TrainConfig& train_config,
                                        const std::string& protocol) {
    const AblationMode modes[4] = {AblationMode::full, AblationMode::without_s,
                                   AblationMode::without_t, AblationMode::without_st};
    std::vector<AblationRow> rows;
    for (AblationMode mode : modes) {
        AblationRow row;
        row.mode = mode;
        try {
            ModelConfig config = model_config;
            config.mode = mode;
            TrainResult trained = train(dataset, config, train_config, protocol);
            row.report = evaluate(dataset, protocol, SplitTag::test, trained.params, config);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace csta
