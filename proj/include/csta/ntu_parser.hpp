// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <istream>
#include <string>

#include "csta/skeleton.hpp"

namespace csta {

/// Metadata carried by an NTU-style file name (SxxxCxxxPxxxRxxxAxxx).
struct NtuFileMeta {
    bool matched = false;
    std::size_t action = 0; // 1-based action id
    int subject = 0;
    int camera = 0;
};

NtuFileMeta ntu_meta_from_filename(const std::string& stem);

/// Parses the NTU `.skeleton` text layout: a frame-count line; per frame a
/// body-count line; per body an info line, a joint-count line (25), then 25
/// joint lines whose first three fields are x y z (trailing fields are
/// ignored).
///
/// Multi-body recordings keep the single body with the largest motion energy
/// (sum of squared frame-to-frame joint displacements); bodies are tracked by
/// their position within each frame, and frames where the selected body is
/// absent repeat its nearest captured pose.
///
/// Throws ParseError (with line number) on malformed input and
/// EmptySampleError when no frame contains a body.
SkeletonSequence parse_ntu_skeleton(std::istream& input, const std::string& source_name = "");

SkeletonSequence parse_ntu_skeleton_file(const std::filesystem::path& path);

} // namespace csta
