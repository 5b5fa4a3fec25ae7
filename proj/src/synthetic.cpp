// SPDX-License-Identifier: Apache-2.0
#include "csta/synthetic.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "csta/rng.hpp"

namespace csta {

namespace {

// Stylized rest pose for the 25-joint topology, meters, facing the sensor
// at roughly 3m depth. Index layout follows the usual Kinect v2 order.
constexpr std::array<std::array<double, 3>, kJointCount> kRestPose = {{
    {0.00, 0.00, 3.00},   // 0 spine base
    {0.00, 0.25, 3.00},   // 1 spine mid
    {0.00, 0.50, 3.00},   // 2 neck
    {0.00, 0.65, 3.00},   // 3 head
    {-0.20, 0.45, 3.00},  // 4 left shoulder
    {-0.35, 0.25, 3.00},  // 5 left elbow
    {-0.45, 0.05, 3.00},  // 6 left wrist
    {-0.50, -0.02, 3.00}, // 7 left hand
    {0.20, 0.45, 3.00},   // 8 right shoulder
    {0.35, 0.25, 3.00},   // 9 right elbow
    {0.45, 0.05, 3.00},   // 10 right wrist
    {0.50, -0.02, 3.00},  // 11 right hand
    {-0.10, -0.05, 3.00}, // 12 left hip
    {-0.12, -0.45, 3.00}, // 13 left knee
    {-0.13, -0.85, 3.00}, // 14 left ankle
    {-0.14, -0.92, 2.92}, // 15 left foot
    {0.10, -0.05, 3.00},  // 16 right hip
    {0.12, -0.45, 3.00},  // 17 right knee
    {0.13, -0.85, 3.00},  // 18 right ankle
    {0.14, -0.92, 2.92},  // 19 right foot
    {0.00, 0.40, 3.00},   // 20 spine shoulder
    {-0.53, -0.06, 3.00}, // 21 left hand tip
    {-0.48, 0.00, 2.96},  // 22 left thumb
    {0.53, -0.06, 3.00},  // 23 right hand tip
    {0.48, 0.00, 2.96},   // 24 right thumb
}};

const std::vector<std::size_t> kArmJoints = {4, 5, 6, 7, 21, 22};
const std::vector<std::size_t> kLegJoints = {16, 17, 18, 19};

} // namespace

const std::vector<std::size_t>& synthetic_arm_joints() { return kArmJoints; }
const std::vector<std::size_t>& synthetic_leg_joints() { return kLegJoints; }

Dataset make_synthetic_dataset(std::uint64_t seed, const SyntheticSpec& spec) {
    Dataset dataset;
    dataset.class_names = {"left_arm_wave", "right_leg_kick", "body_translate"};
    std::vector<SplitTag> tags;

    Rng root(seed);
    for (std::size_t label = 0; label < dataset.class_names.size(); ++label) {
        for (std::size_t k = 0; k < spec.samples_per_class; ++k) {
            Rng rng = root.child(label * spec.samples_per_class + k);
            const std::size_t frames =
                spec.min_frames + rng.uniform_index(spec.max_frames - spec.min_frames + 1);
            const double cycles = rng.uniform_real(1.0, 2.5);
            const double phase = rng.uniform_real(0.0, 2.0 * std::numbers::pi);
            const double speed = rng.uniform_real(0.5, 1.0); // meters over the whole clip

            SkeletonSequence seq;
            seq.positions = Tensor({frames, kJointCount, 3});
            seq.label = label;
            seq.subject_id = static_cast<int>(k);
            seq.view_id = 0;
            seq.source = "synthetic";

            for (std::size_t t = 0; t < frames; ++t) {
                const double progress = static_cast<double>(t) / static_cast<double>(frames);
                const double wave = std::sin(2.0 * std::numbers::pi * cycles * progress + phase);
                for (std::size_t j = 0; j < kJointCount; ++j) {
                    double x = kRestPose[j][0];
                    double y = kRestPose[j][1];
                    double z = kRestPose[j][2];
                    if (label == 0) {
                        for (std::size_t c = 0; c < kArmJoints.size(); ++c) {
                            if (kArmJoints[c] == j) {
                                // a raised waving arm: lifted on average with the
                                // wave riding on top, so the displacement does not
                                // cancel across the clip; amplitudes sit a few
                                // noise sigmas above the floor, which keeps every
                                // static joint a pure distractor
                                const double amp = 0.02 + 0.008 * static_cast<double>(c);
                                const double lift = amp * (1.0 + 0.7 * wave);
                                x += 0.5 * lift;
                                y += lift;
                                z += 0.3 * lift;
                                break;
                            }
                        }
                    } else if (label == 1) {
                        for (std::size_t c = 0; c < kLegJoints.size(); ++c) {
                            if (kLegJoints[c] == j) {
                                // a forward kick held away from the rest pose
                                const double amp = 0.02 + 0.01 * static_cast<double>(c);
                                const double swing = amp * (1.0 + 0.7 * wave);
                                x += 0.6 * swing;
                                z -= swing;
                                break;
                            }
                        }
                    } else {
                        x += speed * progress;
                        z += 0.2 * speed * progress;
                    }
                    seq.positions.at({t, j, 0}) = x + rng.normal(0.0, spec.noise_sigma);
                    seq.positions.at({t, j, 1}) = y + rng.normal(0.0, spec.noise_sigma);
                    seq.positions.at({t, j, 2}) = z + rng.normal(0.0, spec.noise_sigma);
                }
            }
            dataset.samples.push_back(std::move(seq));
            tags.push_back(k < spec.train_per_class ? SplitTag::train : SplitTag::test);
        }
    }
    dataset.splits.emplace("default", std::move(tags));
    return dataset;
}

} // namespace csta
