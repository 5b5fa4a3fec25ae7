// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace csta {

/// Exit codes shared by every command: 0 success, 1 internal or diverged
/// error, 2 user/input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

struct IngestOptions {
    std::string input;
    std::string format; // "ntu" or "canonical"
    std::string output;
};

struct TrainOptions {
    std::string data;
    std::string config; // optional path to a key/value config file
    std::uint64_t seed = 0;
    std::string out;
    std::optional<std::size_t> epochs; // overrides the config file
};

struct EvalOptions {
    std::string data;
    std::string checkpoint;
    std::string split; // "train" or "test"
    std::string out = ".";
};

struct AblateOptions {
    std::string data;
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
};

struct VisualizeOptions {
    std::string data;
    std::string checkpoint;
    std::size_t sample = 0;
    std::string out;
};

int cmd_ingest(const IngestOptions& options);
int cmd_train(const TrainOptions& options);
int cmd_eval(const EvalOptions& options);
int cmd_ablate(const AblateOptions& options);
int cmd_visualize_attention(const VisualizeOptions& options);

} // namespace csta
