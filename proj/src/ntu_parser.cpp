// SPDX-License-Identifier: Apache-2.0
#include "csta/ntu_parser.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "csta/errors.hpp"

namespace csta {

NtuFileMeta ntu_meta_from_filename(const std::string& stem) {
    NtuFileMeta meta;
    // Expected form: S###C###P###R###A### with three digits per field.
    if (stem.size() < 20) return meta;
    auto digits3 = [&](std::size_t pos, char tag, long& out) {
        if (stem[pos] != tag) return false;
        long value = 0;
        for (std::size_t i = pos + 1; i <= pos + 3; ++i) {
            if (!std::isdigit(static_cast<unsigned char>(stem[i]))) return false;
            value = value * 10 + (stem[i] - '0');
        }
        out = value;
        return true;
    };
    long setup = 0, camera = 0, subject = 0, repeat = 0, action = 0;
    if (digits3(0, 'S', setup) && digits3(4, 'C', camera) && digits3(8, 'P', subject) &&
        digits3(12, 'R', repeat) && digits3(16, 'A', action) && action >= 1) {
        meta.matched = true;
        meta.action = static_cast<std::size_t>(action);
        meta.subject = static_cast<int>(subject);
        meta.camera = static_cast<int>(camera);
    }
    return meta;
}

namespace {

struct LineReader {
    std::istream& input;
    std::size_t line_number = 0;

    std::optional<std::string> next() {
        std::string line;
        if (!std::getline(input, line)) return std::nullopt;
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    }
};

std::size_t parse_count(LineReader& reader, const char* what) {
    auto line = reader.next();
    if (!line) throw ParseError(std::string("unexpected end of file reading ") + what,
                                reader.line_number + 1);
    std::istringstream fields(*line);
    long long value = 0;
    if (!(fields >> value) || value < 0) {
        throw ParseError(std::string("malformed ") + what + ": '" + *line + "'",
                         reader.line_number);
    }
    return static_cast<std::size_t>(value);
}

std::array<double, 3> parse_joint_line(LineReader& reader) {
    auto line = reader.next();
    if (!line) throw ParseError("unexpected end of file reading joint coordinates",
                                reader.line_number + 1);
    std::istringstream fields(*line);
    std::array<double, 3> xyz{};
    for (double& v : xyz) {
        if (!(fields >> v) || !std::isfinite(v)) {
            throw ParseError("non-numeric joint coordinate: '" + *line + "'",
                             reader.line_number);
        }
    }
    return xyz;
}

using Pose = std::array<std::array<double, 3>, kJointCount>;

} // namespace

SkeletonSequence parse_ntu_skeleton(std::istream& input, const std::string& source_name) {
    LineReader reader{input};
    const std::size_t frame_count = parse_count(reader, "frame count");
    if (frame_count == 0) throw ParseError("frame count must be positive", reader.line_number);

    // poses[slot][frame], absent when the frame had fewer bodies
    std::vector<std::vector<std::optional<Pose>>> poses;
    for (std::size_t t = 0; t < frame_count; ++t) {
        const std::size_t body_count = parse_count(reader, "body count");
        for (std::size_t b = 0; b < body_count; ++b) {
            if (!reader.next()) {
                throw ParseError("unexpected end of file reading body info",
                                 reader.line_number + 1);
            }
            const std::size_t joint_count = parse_count(reader, "joint count");
            if (joint_count != kJointCount) {
                throw ParseError("expected " + std::to_string(kJointCount) + " joints, got " +
                                     std::to_string(joint_count),
                                 reader.line_number);
            }
            Pose pose;
            for (std::size_t j = 0; j < kJointCount; ++j) pose[j] = parse_joint_line(reader);
            if (b >= poses.size()) {
                poses.emplace_back(std::vector<std::optional<Pose>>(frame_count));
            }
            poses[b][t] = pose;
        }
    }
    if (poses.empty()) {
        throw EmptySampleError("no bodies in any frame" +
                               (source_name.empty() ? std::string() : " of " + source_name));
    }

    // Motion energy per body slot over frames where the slot is present in
    // two consecutive frames.
    std::size_t best_slot = 0;
    double best_energy = -1.0;
    for (std::size_t slot = 0; slot < poses.size(); ++slot) {
        double energy = 0.0;
        for (std::size_t t = 0; t + 1 < frame_count; ++t) {
            if (!poses[slot][t] || !poses[slot][t + 1]) continue;
            const Pose& a = *poses[slot][t];
            const Pose& b = *poses[slot][t + 1];
            for (std::size_t j = 0; j < kJointCount; ++j) {
                for (std::size_t c = 0; c < 3; ++c) {
                    const double d = b[j][c] - a[j][c];
                    energy += d * d;
                }
            }
        }
        if (energy > best_energy) {
            best_energy = energy;
            best_slot = slot;
        }
    }

    // Fill gaps with the nearest captured pose (previous, else next).
    std::vector<const Pose*> track(frame_count, nullptr);
    const Pose* last = nullptr;
    for (std::size_t t = 0; t < frame_count; ++t) {
        if (poses[best_slot][t]) last = &*poses[best_slot][t];
        track[t] = last;
    }
    const Pose* following = nullptr;
    for (std::size_t t = frame_count; t-- > 0;) {
        if (poses[best_slot][t]) following = &*poses[best_slot][t];
        if (!track[t]) track[t] = following;
    }

    SkeletonSequence seq;
    seq.positions = Tensor({frame_count, kJointCount, 3});
    for (std::size_t t = 0; t < frame_count; ++t) {
        const Pose& pose = *track[t];
        for (std::size_t j = 0; j < kJointCount; ++j) {
            for (std::size_t c = 0; c < 3; ++c) {
                seq.positions[(t * kJointCount + j) * 3 + c] = pose[j][c];
            }
        }
    }
    seq.source = source_name;
    const NtuFileMeta meta = ntu_meta_from_filename(
        std::filesystem::path(source_name).stem().string());
    if (meta.matched) {
        seq.label = meta.action - 1;
        seq.subject_id = meta.subject;
        seq.view_id = meta.camera;
    }
    return seq;
}

SkeletonSequence parse_ntu_skeleton_file(const std::filesystem::path& path) {
    std::ifstream input(path);
    if (!input) throw IoError("cannot open " + path.string());
    try {
        return parse_ntu_skeleton(input, path.filename().string());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

} // namespace csta
