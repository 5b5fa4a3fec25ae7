// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "csta/rng.hpp"
#include "csta/tensor.hpp"

namespace csta {

/// Joints per skeleton body. Fixed by the capture format.
inline constexpr std::size_t kJointCount = 25;

/// Joint used by the optional centering preprocess (second spine joint).
inline constexpr std::size_t kSpineJointIndex = 1;

/// One labeled raw recording: T_raw frames of 25 joints with xyz coordinates
/// in sensor meters.
struct SkeletonSequence {
    Tensor positions; // [T_raw x 25 x 3]
    std::size_t label = 0;
    int subject_id = 0;
    int view_id = 0;
    std::string source;

    std::size_t frame_count() const { return positions.rank() == 3 ? positions.dim(0) : 0; }
};

/// A fixed-length training/evaluation sample: position stream plus its
/// first-order temporal difference, both T x 25 x 3.
struct FixedSample {
    Tensor position;
    Tensor motion;
    std::size_t label = 0;
};

enum class SplitTag { train, test };

/// A labeled collection of raw sequences with optional split protocols.
/// Each protocol assigns every sample exactly one train/test tag.
struct Dataset {
    std::vector<SkeletonSequence> samples;
    std::vector<std::string> class_names;
    std::map<std::string, std::vector<SplitTag>> splits;

    std::size_t class_count() const { return class_names.size(); }
    /// Throws ValidationError if a label or split table is inconsistent.
    void validate() const;
    /// Indices of samples carrying `tag` under `protocol`. When the dataset
    /// has no split tables every sample counts as train.
    std::vector<std::size_t> split_indices(const std::string& protocol, SplitTag tag) const;
};

/// First-order temporal difference: out[t] = pos[t+1] - pos[t] for
/// t < T-1, and out[T-1] = 0 so both streams share the T x N x 3 shape.
/// Requires T >= 2.
Tensor motion_stream(const Tensor& position);

/// Subtracts the first frame's spine-joint position from every coordinate.
void center_on_spine(Tensor& position);

/// Draws `frames` frame indices uniformly at random (without replacement
/// when possible, with replacement for shorter sequences), sorted ascending
/// so temporal order is preserved.
FixedSample temporal_random_sample(const SkeletonSequence& seq, std::size_t frames, Rng& rng);

/// Crops a random sub-series whose length ratio is uniform in
/// [ratio_lo, ratio_hi], then picks `frames` evenly spaced frames from the
/// crop.
FixedSample temporal_random_crop(const SkeletonSequence& seq, double ratio_lo, double ratio_hi,
                                 std::size_t frames, Rng& rng);

/// Deterministic evaluation-time selection: `frames` evenly spaced indices
/// over the whole sequence.
FixedSample uniform_fixed_sample(const SkeletonSequence& seq, std::size_t frames);

struct AugmentConfig {
    std::size_t sample_copies = 4;
    std::size_t crop_copies = 4;
    double crop_ratio_lo = 0.5;
    double crop_ratio_hi = 1.0;
    std::size_t frames = 30;
};

/// Expands every input sequence into (sample_copies + crop_copies) fixed
/// samples with inherited labels. Each input uses an independent stream
/// derived from (seed, input index), so results do not depend on how the
/// work is scheduled.
std::vector<FixedSample> augment(std::span<const SkeletonSequence> sequences,
                                 const AugmentConfig& config, std::uint64_t seed);

} // namespace csta
