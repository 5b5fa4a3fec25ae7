// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "csta/checkpoint.hpp"
#include "csta/errors.hpp"
#include "csta/grad_check.hpp"
#include "csta/model.hpp"
#include "support.hpp"

using namespace csta;
using namespace csta::test;

namespace {

ModelConfig small_config() {
    ModelConfig config;
    config.frames = 6;
    config.joints = 5;
    config.interp_joints = 4;
    config.num_classes = 3;
    config.conv = {{{4, 3, 1, 1}, {6, 3, 2, 1}, {6, 3, 1, 1}}};
    config.fc1_width = 16;
    config.fc2_width = 8;
    return config;
}

// conv shape arithmetic, written independently of the library
std::size_t oracle_extent(std::size_t in, std::size_t kernel, std::size_t stride,
                          std::size_t pad) {
    return (in + 2 * pad - kernel) / stride + 1;
}

FixedSample random_sample(const ModelConfig& config, std::size_t label, Rng& rng) {
    FixedSample sample;
    sample.position = random_tensor({config.frames, config.joints, 3}, rng);
    sample.motion = random_tensor({config.frames, config.joints, 3}, rng);
    sample.label = label;
    return sample;
}

} // namespace

TEST_CASE("config validation computes the conv chain up front") {
    ModelConfig config = small_config();
    config.validate();
    const auto shapes = config.conv_output_shapes();
    std::size_t h = 6, w = 4;
    for (std::size_t layer = 0; layer < 3; ++layer) {
        h = oracle_extent(h, config.conv[layer].kernel, config.conv[layer].stride,
                          config.conv[layer].pad);
        w = oracle_extent(w, config.conv[layer].kernel, config.conv[layer].stride,
                          config.conv[layer].pad);
        CHECK(shapes[layer][0] == config.conv[layer].channels);
        CHECK(shapes[layer][1] == h);
        CHECK(shapes[layer][2] == w);
    }
    CHECK(config.stream_feature_length() == shapes[2][0] * shapes[2][1] * shapes[2][2]);

    ModelConfig bad = small_config();
    bad.conv[2].kernel = 9;
    bad.conv[2].pad = 0;
    CHECK_THROWS_AS(bad.validate(), DimensionError);

    ModelConfig no_classes = small_config();
    no_classes.num_classes = 0;
    CHECK_THROWS_AS(no_classes.validate(), ContractError);
}

TEST_CASE("default config shape chain") {
    ModelConfig config;
    config.num_classes = 5;
    config.validate();
    const auto shapes = config.conv_output_shapes();
    // 30x30 -> stride 1 pad 1 -> 30x30 -> stride 2 -> 15x15 -> stride 2 -> 8x8
    CHECK(shapes[0] == std::array<std::size_t, 3>{8, 30, 30});
    CHECK(shapes[1] == std::array<std::size_t, 3>{16, 15, 15});
    CHECK(shapes[2] == std::array<std::size_t, 3>{16, 8, 8});
    CHECK(config.stream_feature_length() == 16 * 8 * 8);
}

TEST_CASE("skeleton transform with the identity is the identity") {
    Rng rng(3);
    const Tensor x = random_tensor({4, 5, 3}, rng);
    Tensor eye({5, 5});
    for (std::size_t i = 0; i < 5; ++i) eye.at({i, i}) = 1.0;
    Tape tape;
    const Tensor& out = tape.value(
        skeleton_transform(tape, tape.constant(x), tape.constant(eye)));
    CHECK(bit_identical(out, x));
}

TEST_CASE("an averaging column yields the per-frame centroid") {
    Rng rng(5);
    const std::size_t joints = 5;
    const Tensor x = random_tensor({3, joints, 3}, rng);
    Tensor averaging({joints, 1});
    for (std::size_t j = 0; j < joints; ++j) averaging.at({j, 0}) = 1.0 / joints;
    Tape tape;
    const Tensor& out = tape.value(
        skeleton_transform(tape, tape.constant(x), tape.constant(averaging)));
    CHECK(out.shape() == Shape{3, 1, 3});
    for (std::size_t t = 0; t < 3; ++t) {
        for (std::size_t c = 0; c < 3; ++c) {
            double mean = 0.0;
            for (std::size_t j = 0; j < joints; ++j) mean += x.at({t, j, c});
            mean /= joints;
            CHECK(out.at({t, 0, c}) == doctest::Approx(mean).epsilon(1e-12));
        }
    }
}

TEST_CASE("skeleton transform gradient") {
    Rng rng(7);
    const Tensor x = random_tensor({4, 5, 3}, rng);
    const Tensor a0 = random_tensor({5, 4}, rng);
    const Tensor w = random_tensor({4, 4, 3}, rng);
    auto loss = [&](Tape& t, Var a) {
        Var out = skeleton_transform(t, t.constant(x), a);
        return t.sum(t.elementwise_mul(out, t.constant(w)));
    };
    CHECK(grad_check(loss, a0) < 1e-5);
}

TEST_CASE("zero input and zero parameters give a zero feature vector") {
    const ModelConfig config = small_config();
    ModelParams params = make_model_params(config);
    Tape tape;
    ModelLeaves leaves = observe_model(tape, params);
    Tensor x = Tensor::zeros({config.frames, config.joints, 3});
    Var feature = stream_forward(tape, tape.observe(x), leaves.position, config);
    const Tensor& value = tape.value(feature);
    CHECK(value.shape() == Shape{config.stream_feature_length()});
    for (std::size_t i = 0; i < value.size(); ++i) CHECK(value[i] == 0.0);
}

TEST_CASE("stream forward is deterministic") {
    const ModelConfig config = small_config();
    ModelParams params = init_model_params(config, 9);
    Rng rng(11);
    const Tensor x = random_tensor({config.frames, config.joints, 3}, rng);
    Tape tape1, tape2;
    const Tensor a = tape1.value(stream_forward(
        tape1, tape1.observe(x), observe_model(tape1, params).position, config));
    const Tensor b = tape2.value(stream_forward(
        tape2, tape2.observe(x), observe_model(tape2, params).position, config));
    CHECK(bit_identical(a, b));
}

TEST_CASE("dead network outputs exactly its fc3 bias") {
    const ModelConfig config = small_config();
    ModelParams params = make_model_params(config);
    params.fc3_b = Tensor({3}, {0.25, -1.5, 3.0});
    Rng rng(13);
    const FixedSample sample = random_sample(config, 0, rng);
    const Tensor logits = model_logits(sample, params, config);
    CHECK(logits[0] == 0.25);
    CHECK(logits[1] == -1.5);
    CHECK(logits[2] == 3.0);
}

TEST_CASE("the two streams are not interchangeable") {
    const ModelConfig config = small_config();
    ModelParams params = init_model_params(config, 21);
    Rng rng(17);
    const FixedSample sample = random_sample(config, 0, rng);
    FixedSample swapped;
    swapped.position = sample.motion;
    swapped.motion = sample.position;
    const Tensor direct = model_logits(sample, params, config);
    const Tensor crossed = model_logits(swapped, params, config);
    CHECK(max_abs_diff(direct, crossed) > 1e-9);
}

TEST_CASE("logits stay finite for wild inputs") {
    const ModelConfig config = small_config();
    ModelParams params = init_model_params(config, 23);
    Rng rng(19);
    FixedSample sample;
    sample.position = random_tensor({config.frames, config.joints, 3}, rng, -100.0, 100.0);
    sample.motion = random_tensor({config.frames, config.joints, 3}, rng, -100.0, 100.0);
    CHECK(model_logits(sample, params, config).all_finite());
}

TEST_CASE("without_ST equals the structurally attention-free model") {
    ModelConfig bypass = small_config();
    bypass.mode = AblationMode::without_st;
    ModelConfig absent = small_config();
    absent.attention_enabled = false;

    ModelParams params = init_model_params(bypass, 31);
    Rng rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        const FixedSample sample = random_sample(bypass, 0, rng);
        CHECK(bit_identical(model_logits(sample, params, bypass),
                            model_logits(sample, params, absent)));
    }
}

TEST_CASE("end-to-end gradients match finite differences") {
    const ModelConfig config = small_config();
    ModelParams params = init_model_params(config, 37);
    Rng rng(29);
    std::vector<FixedSample> batch{random_sample(config, 0, rng),
                                   random_sample(config, 2, rng)};

    // analytic gradients for every tensor from one sweep
    for_each_param(params, [](const std::string&, Tensor& t) {
        t.set_requires_grad(true);
        t.zero_grad();
    });
    {
        Tape tape;
        ModelLeaves leaves = leaf_model(tape, params);
        Var total{};
        for (std::size_t k = 0; k < batch.size(); ++k) {
            Var logits = model_forward(tape, tape.observe(batch[k].position),
                                       tape.observe(batch[k].motion), leaves, config);
            Var loss = tape.softmax_cross_entropy(logits, batch[k].label);
            total = k == 0 ? loss : tape.add(total, loss);
        }
        tape.backward(tape.scale(total, 0.5));
    }

    double worst = 0.0;
    for_each_param(params, [&](const std::string& name, Tensor& tensor) {
        std::vector<double> analytic(tensor.grad().begin(), tensor.grad().end());
        for (std::size_t i = 0; i < tensor.size(); ++i) {
            const double saved = tensor[i];
            auto eval = [&](double value) {
                tensor[i] = value;
                Tape tape;
                ModelLeaves leaves = observe_model(tape, params);
                double sum = 0.0;
                for (const FixedSample& sample : batch) {
                    Var logits = model_forward(tape, tape.observe(sample.position),
                                               tape.observe(sample.motion), leaves, config);
                    sum += tape.value(tape.softmax_cross_entropy(logits, sample.label))[0];
                }
                return 0.5 * sum;
            };
            auto fd_error = [&](double eps) {
                const double numeric = (eval(saved + eps) - eval(saved - eps)) / (2 * eps);
                tensor[i] = saved;
                return std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(numeric));
            };
            // a probe that straddles a relu kink is retried with a smaller
            // radius; real gradient defects survive the retry
            double err = fd_error(1e-5);
            if (err >= 1e-3) err = fd_error(1e-7);
            if (err > worst) worst = err;
        }
        INFO(name);
        CHECK(worst < 1e-3);
    });
    for_each_param(params, [](const std::string&, Tensor& t) {
        t.set_requires_grad(false);
        t.drop_grad();
    });
}

TEST_CASE("checkpoint round trip is bit identical") {
    const ModelConfig config = small_config();
    const ModelParams params = init_model_params(config, 41);
    const std::filesystem::path path =
        std::filesystem::temp_directory_path() / "csta_test_checkpoint.ckpt";
    save_checkpoint(path, config, params);
    const Checkpoint loaded = load_checkpoint(path);

    CHECK(loaded.config.frames == config.frames);
    CHECK(loaded.config.mode == config.mode);
    CHECK(loaded.config.num_classes == config.num_classes);

    std::vector<const Tensor*> original, restored;
    for_each_param(params,
                   [&](const std::string&, const Tensor& t) { original.push_back(&t); });
    for_each_param(loaded.params,
                   [&](const std::string&, const Tensor& t) { restored.push_back(&t); });
    REQUIRE(original.size() == restored.size());
    for (std::size_t i = 0; i < original.size(); ++i) {
        CHECK(bit_identical(*original[i], *restored[i]));
    }
    std::filesystem::remove(path);
}

TEST_CASE("loading garbage is an IoError") {
    const std::filesystem::path path =
        std::filesystem::temp_directory_path() / "csta_not_a_checkpoint.ckpt";
    {
        std::ofstream out(path, std::ios::binary);
        out << "this is not a checkpoint";
    }
    CHECK_THROWS_AS(load_checkpoint(path), IoError);
    std::filesystem::remove(path);
}
