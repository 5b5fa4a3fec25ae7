// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <set>

#include "csta/errors.hpp"
#include "csta/skeleton.hpp"
#include "support.hpp"

using namespace csta;
using namespace csta::test;

namespace {

SkeletonSequence make_sequence(std::size_t frames, Rng& rng) {
    SkeletonSequence seq;
    seq.positions = random_tensor({frames, kJointCount, 3}, rng);
    return seq;
}

SkeletonSequence ramp_sequence(std::size_t frames) {
    SkeletonSequence seq;
    seq.positions = Tensor({frames, kJointCount, 3});
    for (std::size_t t = 0; t < frames; ++t) {
        for (std::size_t j = 0; j < kJointCount; ++j) {
            for (std::size_t c = 0; c < 3; ++c) {
                seq.positions.at({t, j, c}) = static_cast<double>(t);
            }
        }
    }
    return seq;
}

} // namespace

TEST_CASE("motion stream of a static body is zero") {
    SkeletonSequence constant;
    constant.positions = Tensor::full({5, kJointCount, 3}, 2.5);
    const Tensor motion = motion_stream(constant.positions);
    CHECK(motion.shape() == constant.positions.shape());
    for (std::size_t i = 0; i < motion.size(); ++i) CHECK(motion[i] == 0.0);
}

TEST_CASE("motion stream of a linear ramp is ones, last frame zero") {
    const SkeletonSequence seq = ramp_sequence(4);
    const Tensor motion = motion_stream(seq.positions);
    for (std::size_t t = 0; t < 3; ++t) {
        for (std::size_t j = 0; j < kJointCount; ++j) {
            for (std::size_t c = 0; c < 3; ++c) CHECK(motion.at({t, j, c}) == 1.0);
        }
    }
    for (std::size_t j = 0; j < kJointCount; ++j) {
        for (std::size_t c = 0; c < 3; ++c) CHECK(motion.at({3, j, c}) == 0.0);
    }
}

TEST_CASE("motion stream rejects single-frame input") {
    Tensor one_frame({1, kJointCount, 3});
    CHECK_THROWS_AS(motion_stream(one_frame), ContractError);
}

TEST_CASE("motion stream is translation invariant") {
    Rng rng(7);
    Tensor base = random_tensor({6, kJointCount, 3}, rng);
    Tensor shifted = base;
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += 17.25;
    // the shift introduces one rounding step per coordinate, nothing more
    CHECK(max_abs_diff(motion_stream(base), motion_stream(shifted)) < 1e-12);
}

TEST_CASE("temporal random sample at exact length is the identity") {
    Rng data_rng(11);
    const SkeletonSequence seq = make_sequence(30, data_rng);
    Rng rng(1);
    const FixedSample sample = temporal_random_sample(seq, 30, rng);
    CHECK(bit_identical(sample.position, seq.positions));
}

TEST_CASE("temporal random sample draws sorted distinct indices") {
    Rng data_rng(13);
    const SkeletonSequence seq = ramp_sequence(100);
    Rng rng(5);
    const FixedSample sample = temporal_random_sample(seq, 30, rng);
    CHECK(sample.position.dim(0) == 30);
    // frame value identifies the source index for a ramp
    double previous = -1.0;
    for (std::size_t t = 0; t < 30; ++t) {
        const double index = sample.position.at({t, 0, 0});
        CHECK(index > previous); // strictly increasing => distinct
        previous = index;
    }

    Rng rng_again(5);
    const FixedSample replay = temporal_random_sample(seq, 30, rng_again);
    CHECK(bit_identical(replay.position, sample.position));
}

TEST_CASE("temporal random sample of a short sequence stays in bounds") {
    const SkeletonSequence seq = ramp_sequence(10);
    Rng rng(21);
    const FixedSample sample = temporal_random_sample(seq, 30, rng);
    CHECK(sample.position.dim(0) == 30);
    double previous = 0.0;
    for (std::size_t t = 0; t < 30; ++t) {
        const double index = sample.position.at({t, 0, 0});
        CHECK(index >= 0.0);
        CHECK(index <= 9.0);
        CHECK(index >= previous); // non-decreasing, repeats allowed
        previous = index;
    }
}

TEST_CASE("temporal random crop degenerate range keeps everything") {
    Rng data_rng(17);
    const SkeletonSequence seq = make_sequence(30, data_rng);
    Rng rng(3);
    const FixedSample sample = temporal_random_crop(seq, 1.0, 1.0, 30, rng);
    CHECK(bit_identical(sample.position, seq.positions));
}

TEST_CASE("temporal random crop respects ratio bounds") {
    const SkeletonSequence seq = ramp_sequence(100);
    Rng rng(29);
    for (int trial = 0; trial < 200; ++trial) {
        const FixedSample sample = temporal_random_crop(seq, 0.5, 1.0, 30, rng);
        const double first = sample.position.at({0, 0, 0});
        const double last = sample.position.at({29, 0, 0});
        const double window = last - first + 1.0;
        CHECK(window >= 1.0);
        CHECK(window <= 100.0);
        CHECK(first >= 0.0);
        CHECK(last <= 99.0);
    }
    CHECK_THROWS_AS(temporal_random_crop(seq, 0.0, 1.0, 30, rng), ContractError);
    CHECK_THROWS_AS(temporal_random_crop(seq, 0.9, 0.5, 30, rng), ContractError);
    CHECK_THROWS_AS(temporal_random_crop(seq, 0.5, 1.5, 30, rng), ContractError);
}

TEST_CASE("uniform selection from 60 frames matches the spacing formula") {
    const SkeletonSequence seq = ramp_sequence(60);
    const FixedSample sample = uniform_fixed_sample(seq, 30);
    for (std::size_t k = 0; k < 30; ++k) {
        const double expected = static_cast<double>(
            std::llround(static_cast<double>(k) * 59.0 / 29.0));
        CHECK(sample.position.at({k, 0, 0}) == expected);
    }
}

TEST_CASE("augment count and determinism") {
    Rng data_rng(31);
    std::vector<SkeletonSequence> sequences;
    for (int i = 0; i < 10; ++i) {
        SkeletonSequence seq = make_sequence(40 + 3 * static_cast<std::size_t>(i), data_rng);
        seq.label = static_cast<std::size_t>(i % 3);
        sequences.push_back(std::move(seq));
    }

    AugmentConfig config;
    const std::vector<FixedSample> augmented = augment(sequences, config, 77);
    CHECK(augmented.size() == 80);
    for (std::size_t i = 0; i < augmented.size(); ++i) {
        CHECK(augmented[i].position.shape() == Shape{30, 25, 3});
        CHECK(augmented[i].motion.shape() == Shape{30, 25, 3});
        CHECK(augmented[i].label == sequences[i / 8].label);
    }

    const std::vector<FixedSample> replay = augment(sequences, config, 77);
    REQUIRE(replay.size() == augmented.size());
    for (std::size_t i = 0; i < replay.size(); ++i) {
        CHECK(bit_identical(replay[i].position, augmented[i].position));
        CHECK(bit_identical(replay[i].motion, augmented[i].motion));
    }

    AugmentConfig disabled;
    disabled.sample_copies = 0;
    disabled.crop_copies = 0;
    CHECK(augment(sequences, disabled, 77).empty());
}

TEST_CASE("every fixed sample obeys the motion identity") {
    Rng data_rng(37);
    std::vector<SkeletonSequence> sequences{make_sequence(45, data_rng)};
    const std::vector<FixedSample> augmented = augment(sequences, AugmentConfig{}, 5);
    for (const FixedSample& sample : augmented) {
        for (std::size_t t = 0; t + 1 < 30; ++t) {
            for (std::size_t j = 0; j < kJointCount; ++j) {
                for (std::size_t c = 0; c < 3; ++c) {
                    CHECK(sample.motion.at({t, j, c}) ==
                          sample.position.at({t + 1, j, c}) - sample.position.at({t, j, c}));
                }
            }
        }
        for (std::size_t j = 0; j < kJointCount; ++j) {
            for (std::size_t c = 0; c < 3; ++c) CHECK(sample.motion.at({29, j, c}) == 0.0);
        }
    }
}

TEST_CASE("center_on_spine moves the anchor to the origin") {
    Rng rng(41);
    Tensor positions = random_tensor({4, kJointCount, 3}, rng);
    Tensor motion_before = motion_stream(positions);
    center_on_spine(positions);
    CHECK(positions.at({0, kSpineJointIndex, 0}) == 0.0);
    CHECK(positions.at({0, kSpineJointIndex, 1}) == 0.0);
    CHECK(positions.at({0, kSpineJointIndex, 2}) == 0.0);
    CHECK(bit_identical(motion_stream(positions), motion_before));
}

TEST_CASE("dataset split bookkeeping") {
    Dataset dataset;
    dataset.class_names = {"a", "b"};
    Rng rng(43);
    for (int i = 0; i < 4; ++i) {
        SkeletonSequence seq = make_sequence(5, rng);
        seq.label = static_cast<std::size_t>(i % 2);
        dataset.samples.push_back(std::move(seq));
    }
    dataset.splits["default"] = {SplitTag::train, SplitTag::test, SplitTag::train,
                                 SplitTag::test};
    dataset.validate();
    CHECK(dataset.split_indices("default", SplitTag::train) ==
          std::vector<std::size_t>{0, 2});
    CHECK(dataset.split_indices("default", SplitTag::test) == std::vector<std::size_t>{1, 3});
    // no table: everything is train
    CHECK(dataset.split_indices("missing", SplitTag::train).size() == 4);
    CHECK(dataset.split_indices("missing", SplitTag::test).empty());

    dataset.splits["broken"] = {SplitTag::train};
    CHECK_THROWS_AS(dataset.validate(), ValidationError);
}
