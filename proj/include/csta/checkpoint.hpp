// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "csta/model.hpp"

namespace csta {

/// Self-describing binary checkpoint. Byte layout (all integers and IEEE-754
/// doubles little-endian):
///
///   bytes 0..7    magic "CSTACKPT"
///   u32           format version (1)
///   u64           config length; that many bytes of UTF-8 JSON (ModelConfig)
///   u64           tensor count
///   per tensor:   u64 name length; name bytes;
///                 u64 rank; u64 dims[rank];
///                 f64 values[product(dims)]
///
/// Doubles are stored as raw bit patterns, so load(save(params)) == params
/// bit for bit.
void save_checkpoint(const std::filesystem::path& path, const ModelConfig& config,
                     const ModelParams& params);

struct Checkpoint {
    ModelConfig config;
    ModelParams params;
};

Checkpoint load_checkpoint(const std::filesystem::path& path);

/// ModelConfig <-> JSON text, shared by checkpoints and run manifests.
std::string model_config_to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const std::string& text);

} // namespace csta
