// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "csta/skeleton.hpp"

namespace csta {

/// Parameters for the generated three-class motion dataset.
struct SyntheticSpec {
    std::size_t samples_per_class = 40;
    std::size_t train_per_class = 30; // remainder tagged test
    double noise_sigma = 0.01;        // additive coordinate noise, meters
    std::size_t min_frames = 60;
    std::size_t max_frames = 100;
};

/// Deterministic synthetic dataset with one split protocol "default":
/// class 0 oscillates the left-arm joints, class 1 the right-leg joints,
/// class 2 translates the whole body. All other joints hold a fixed rest
/// pose plus noise.
Dataset make_synthetic_dataset(std::uint64_t seed, const SyntheticSpec& spec = {});

/// Joints animated by class 0 (left arm chain).
const std::vector<std::size_t>& synthetic_arm_joints();

/// Joints animated by class 1 (right leg chain).
const std::vector<std::size_t>& synthetic_leg_joints();

} // namespace csta
