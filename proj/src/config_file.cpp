// SPDX-License-Identifier: Apache-2.0
#include "csta/config_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csta/checkpoint.hpp"
#include "csta/errors.hpp"

namespace csta {

namespace {

std::string trim(const std::string& text) {
    std::size_t begin = text.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    std::size_t end = text.find_last_not_of(" \t");
    return text.substr(begin, end - begin + 1);
}

std::size_t parse_size(const std::string& value, const std::string& key, std::size_t line) {
    std::size_t out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ParseError("config key '" + key + "' expects a non-negative integer, got '" +
                             value + "'",
                         line);
    }
    return out;
}

double parse_real(const std::string& value, const std::string& key, std::size_t line) {
    try {
        std::size_t consumed = 0;
        double out = std::stod(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return out;
    } catch (const std::exception&) {
        throw ParseError("config key '" + key + "' expects a number, got '" + value + "'",
                         line);
    }
}

bool parse_bool(const std::string& value, const std::string& key, std::size_t line) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ParseError("config key '" + key + "' expects true or false, got '" + value + "'",
                     line);
}

} // namespace

RunConfig parse_config_text(const std::string& text, RunConfig base) {
    std::istringstream stream(text);
    std::string raw_line;
    std::size_t line_number = 0;
    while (std::getline(stream, raw_line)) {
        ++line_number;
        std::string line = raw_line;
        if (const std::size_t hash = line.find('#'); hash != std::string::npos) {
            line.resize(hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("expected 'key = value', got '" + raw_line + "'", line_number);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ParseError("expected 'key = value', got '" + raw_line + "'", line_number);
        }

        ModelConfig& m = base.model;
        TrainConfig& t = base.train;
        if (key == "frames") {
            m.frames = parse_size(value, key, line_number);
        } else if (key == "joints") {
            m.joints = parse_size(value, key, line_number);
        } else if (key == "interp_joints") {
            m.interp_joints = parse_size(value, key, line_number);
        } else if (key == "fc1_width") {
            m.fc1_width = parse_size(value, key, line_number);
        } else if (key == "fc2_width") {
            m.fc2_width = parse_size(value, key, line_number);
        } else if (key == "mode") {
            try {
                m.mode = ablation_mode_from_string(value);
            } catch (const ValidationError& e) {
                throw ParseError(e.what(), line_number);
            }
        } else if (key == "attention_enabled") {
            m.attention_enabled = parse_bool(value, key, line_number);
        } else if (key == "center_on_spine") {
            m.center_on_spine = parse_bool(value, key, line_number);
        } else if (key.rfind("conv", 0) == 0 && key.size() > 5 && key[5] == '_') {
            const char which = key[4];
            if (which < '1' || which > '3') {
                throw ParseError("unknown config key '" + key + "'", line_number);
            }
            ConvSpec& spec = m.conv[static_cast<std::size_t>(which - '1')];
            const std::string field = key.substr(6);
            if (field == "channels") {
                spec.channels = parse_size(value, key, line_number);
            } else if (field == "kernel") {
                spec.kernel = parse_size(value, key, line_number);
            } else if (field == "stride") {
                spec.stride = parse_size(value, key, line_number);
            } else if (field == "pad") {
                spec.pad = parse_size(value, key, line_number);
            } else {
                throw ParseError("unknown config key '" + key + "'", line_number);
            }
        } else if (key == "optimizer") {
            try {
                t.optimizer = optimizer_kind_from_string(value);
            } catch (const ValidationError& e) {
                throw ParseError(e.what(), line_number);
            }
        } else if (key == "learning_rate") {
            t.learning_rate = parse_real(value, key, line_number);
        } else if (key == "momentum") {
            t.momentum = parse_real(value, key, line_number);
        } else if (key == "beta1") {
            t.beta1 = parse_real(value, key, line_number);
        } else if (key == "beta2") {
            t.beta2 = parse_real(value, key, line_number);
        } else if (key == "weight_decay") {
            t.weight_decay = parse_real(value, key, line_number);
        } else if (key == "batch_size") {
            t.batch_size = parse_size(value, key, line_number);
        } else if (key == "epochs") {
            t.epochs = parse_size(value, key, line_number);
        } else if (key == "aug_sample_copies") {
            t.augment.sample_copies = parse_size(value, key, line_number);
        } else if (key == "aug_crop_copies") {
            t.augment.crop_copies = parse_size(value, key, line_number);
        } else if (key == "crop_ratio_lo") {
            t.augment.crop_ratio_lo = parse_real(value, key, line_number);
        } else if (key == "crop_ratio_hi") {
            t.augment.crop_ratio_hi = parse_real(value, key, line_number);
        } else {
            throw ParseError("unknown config key '" + key + "'", line_number);
        }
    }
    return base;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_config_text(buffer.str(), std::move(base));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::string run_config_to_json(const RunConfig& config) {
    nlohmann::json doc;
    doc["model"] = nlohmann::json::parse(model_config_to_json(config.model));
    nlohmann::json train;
    train["optimizer"] = to_string(config.train.optimizer);
    train["learning_rate"] = config.train.learning_rate;
    train["momentum"] = config.train.momentum;
    train["beta1"] = config.train.beta1;
    train["beta2"] = config.train.beta2;
    train["weight_decay"] = config.train.weight_decay;
    train["batch_size"] = config.train.batch_size;
    train["epochs"] = config.train.epochs;
    train["seed"] = config.train.seed;
    train["aug_sample_copies"] = config.train.augment.sample_copies;
    train["aug_crop_copies"] = config.train.augment.crop_copies;
    train["crop_ratio_lo"] = config.train.augment.crop_ratio_lo;
    train["crop_ratio_hi"] = config.train.augment.crop_ratio_hi;
    doc["train"] = std::move(train);
    return doc.dump();
}

} // namespace csta
