// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "csta/model.hpp"
#include "csta/trainer.hpp"

namespace csta {

/// Model plus training settings as configured by the CLI. num_classes is
/// always derived from the dataset, never from the file.
struct RunConfig {
    ModelConfig model;
    TrainConfig train;
};

/// Parses a flat key/value document (`key = value`, one per line, `#`
/// comments). Unknown keys raise ValidationError. See the README for the
/// key list.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

/// Resolved configuration (every key materialized) as a JSON object,
/// recorded in run manifests.
std::string run_config_to_json(const RunConfig& config);

} // namespace csta
