// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace csta {

/// Record of one tool invocation, written next to the command's outputs.
/// Re-running a deterministic command with the recorded config reproduces
/// its outputs bit for bit.
struct RunManifest {
    std::string command;
    std::string config_json; // resolved configuration, all defaults filled in
    std::uint64_t seed = 0;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    double duration_seconds = 0.0;
};

/// Atomic write (temp file plus rename).
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

} // namespace csta
