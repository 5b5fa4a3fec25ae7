// SPDX-License-Identifier: Apache-2.0
#include "csta/skeleton.hpp"

#include <algorithm>
#include <cmath>

#include "csta/errors.hpp"

namespace csta {

void Dataset::validate() const {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const SkeletonSequence& s = samples[i];
        if (s.positions.rank() != 3 || s.positions.dim(1) != kJointCount ||
            s.positions.dim(2) != 3) {
            throw ValidationError("sample positions must be Tx25x3, got " +
                                      shape_to_string(s.positions.shape()),
                                  "/samples/" + std::to_string(i));
        }
        if (!s.positions.all_finite()) {
            throw ValidationError("non-finite coordinate",
                                  "/samples/" + std::to_string(i) + "/frames");
        }
        if (s.label >= class_names.size()) {
            throw ValidationError("label " + std::to_string(s.label) + " >= class count " +
                                      std::to_string(class_names.size()),
                                  "/samples/" + std::to_string(i) + "/label");
        }
    }
    for (const auto& [protocol, tags] : splits) {
        if (tags.size() != samples.size()) {
            throw ValidationError("split table covers " + std::to_string(tags.size()) +
                                      " samples, dataset has " + std::to_string(samples.size()),
                                  "/splits/" + protocol);
        }
    }
}

std::vector<std::size_t> Dataset::split_indices(const std::string& protocol, SplitTag tag) const {
    std::vector<std::size_t> out;
    auto it = splits.find(protocol);
    if (it == splits.end()) {
        if (tag == SplitTag::train) {
            for (std::size_t i = 0; i < samples.size(); ++i) out.push_back(i);
        }
        return out;
    }
    for (std::size_t i = 0; i < it->second.size(); ++i) {
        if (it->second[i] == tag) out.push_back(i);
    }
    return out;
}

Tensor motion_stream(const Tensor& position) {
    if (position.rank() != 3) {
        throw DimensionError("motion_stream expects TxNx3 input, got " +
                             shape_to_string(position.shape()));
    }
    const std::size_t frames = position.dim(0);
    if (frames < 2) throw ContractError("motion_stream requires at least 2 frames");
    const std::size_t per_frame = position.dim(1) * position.dim(2);
    Tensor motion(position.shape());
    for (std::size_t t = 0; t + 1 < frames; ++t) {
        const double* cur = position.data().data() + t * per_frame;
        const double* next = cur + per_frame;
        double* out = motion.data().data() + t * per_frame;
        for (std::size_t i = 0; i < per_frame; ++i) out[i] = next[i] - cur[i];
    }
    // last frame stays zero
    return motion;
}

void center_on_spine(Tensor& position) {
    if (position.rank() != 3 || position.dim(1) <= kSpineJointIndex || position.dim(2) != 3) {
        throw DimensionError("center_on_spine expects TxNx3 input, got " +
                             shape_to_string(position.shape()));
    }
    const double cx = position.at({0, kSpineJointIndex, 0});
    const double cy = position.at({0, kSpineJointIndex, 1});
    const double cz = position.at({0, kSpineJointIndex, 2});
    const std::size_t cells = position.size() / 3;
    for (std::size_t i = 0; i < cells; ++i) {
        position[i * 3 + 0] -= cx;
        position[i * 3 + 1] -= cy;
        position[i * 3 + 2] -= cz;
    }
}

namespace {

FixedSample gather_frames(const SkeletonSequence& seq, const std::vector<std::size_t>& indices) {
    const std::size_t per_frame = seq.positions.dim(1) * seq.positions.dim(2);
    Tensor position({indices.size(), seq.positions.dim(1), seq.positions.dim(2)});
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const double* src = seq.positions.data().data() + indices[k] * per_frame;
        double* dst = position.data().data() + k * per_frame;
        std::copy(src, src + per_frame, dst);
    }
    FixedSample out;
    out.motion = motion_stream(position);
    out.position = std::move(position);
    out.label = seq.label;
    return out;
}

std::vector<std::size_t> evenly_spaced(std::size_t start, std::size_t length,
                                       std::size_t frames) {
    std::vector<std::size_t> indices(frames);
    if (frames == 1) {
        indices[0] = start;
        return indices;
    }
    const double span = static_cast<double>(length - 1);
    for (std::size_t k = 0; k < frames; ++k) {
        indices[k] = start + static_cast<std::size_t>(std::llround(
                                 span * static_cast<double>(k) / static_cast<double>(frames - 1)));
    }
    return indices;
}

} // namespace

FixedSample temporal_random_sample(const SkeletonSequence& seq, std::size_t frames, Rng& rng) {
    const std::size_t raw = seq.frame_count();
    if (raw == 0) throw ContractError("temporal_random_sample requires a non-empty sequence");
    if (frames == 0) throw ContractError("temporal_random_sample requires frames >= 1");
    std::vector<std::size_t> indices;
    if (raw >= frames) {
        std::vector<std::size_t> pool(raw);
        for (std::size_t i = 0; i < raw; ++i) pool[i] = i;
        rng.shuffle(pool);
        indices.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(frames));
    } else {
        indices.resize(frames);
        for (std::size_t k = 0; k < frames; ++k) indices[k] = rng.uniform_index(raw);
    }
    std::sort(indices.begin(), indices.end());
    return gather_frames(seq, indices);
}

FixedSample temporal_random_crop(const SkeletonSequence& seq, double ratio_lo, double ratio_hi,
                                 std::size_t frames, Rng& rng) {
    if (!(ratio_lo > 0.0) || !(ratio_lo <= ratio_hi) || !(ratio_hi <= 1.0)) {
        throw ContractError("crop ratio range must satisfy 0 < lo <= hi <= 1");
    }
    const std::size_t raw = seq.frame_count();
    if (raw == 0) throw ContractError("temporal_random_crop requires a non-empty sequence");
    if (frames == 0) throw ContractError("temporal_random_crop requires frames >= 1");
    const double ratio = rng.uniform_real(ratio_lo, ratio_hi);
    const std::size_t length = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(ratio * static_cast<double>(raw))));
    const std::size_t start = rng.uniform_index(raw - length + 1);
    return gather_frames(seq, evenly_spaced(start, length, frames));
}

FixedSample uniform_fixed_sample(const SkeletonSequence& seq, std::size_t frames) {
    const std::size_t raw = seq.frame_count();
    if (raw == 0) throw ContractError("uniform_fixed_sample requires a non-empty sequence");
    if (frames == 0) throw ContractError("uniform_fixed_sample requires frames >= 1");
    return gather_frames(seq, evenly_spaced(0, raw, frames));
}

std::vector<FixedSample> augment(std::span<const SkeletonSequence> sequences,
                                 const AugmentConfig& config, std::uint64_t seed) {
    std::vector<FixedSample> out;
    out.reserve(sequences.size() * (config.sample_copies + config.crop_copies));
    Rng root(seed);
    for (std::size_t i = 0; i < sequences.size(); ++i) {
        Rng stream = root.child(i);
        for (std::size_t c = 0; c < config.sample_copies; ++c) {
            out.push_back(temporal_random_sample(sequences[i], config.frames, stream));
        }
        for (std::size_t c = 0; c < config.crop_copies; ++c) {
            out.push_back(temporal_random_crop(sequences[i], config.crop_ratio_lo,
                                               config.crop_ratio_hi, config.frames, stream));
        }
    }
    return out;
}

} // namespace csta
