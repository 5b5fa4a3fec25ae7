// SPDX-License-Identifier: Apache-2.0
#include "csta/dataset_json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csta/errors.hpp"

namespace csta {

namespace {

using nlohmann::json;

const json& require(const json& node, const char* key, const std::string& path) {
    auto it = node.find(key);
    if (it == node.end()) {
        throw ValidationError(std::string("missing required key '") + key + "'", path);
    }
    return *it;
}

std::size_t require_uint(const json& node, const std::string& path) {
    if (!node.is_number_unsigned()) {
        throw ValidationError("expected a non-negative integer", path);
    }
    return node.get<std::size_t>();
}

int require_int(const json& node, const std::string& path) {
    if (!node.is_number_integer()) throw ValidationError("expected an integer", path);
    return node.get<int>();
}

SkeletonSequence parse_sample(const json& node, std::size_t class_count,
                              const std::string& path) {
    if (!node.is_object()) throw ValidationError("expected an object", path);
    SkeletonSequence seq;
    seq.label = require_uint(require(node, "label", path), path + "/label");
    if (seq.label >= class_count) {
        throw ValidationError("label " + std::to_string(seq.label) + " >= class count " +
                                  std::to_string(class_count),
                              path + "/label");
    }
    seq.subject_id = require_int(require(node, "subject", path), path + "/subject");
    seq.view_id = require_int(require(node, "view", path), path + "/view");
    if (auto it = node.find("source"); it != node.end()) {
        if (!it->is_string()) throw ValidationError("expected a string", path + "/source");
        seq.source = it->get<std::string>();
    }
    const json& frames = require(node, "frames", path);
    if (!frames.is_array() || frames.empty()) {
        throw ValidationError("expected a non-empty array of frames", path + "/frames");
    }
    seq.positions = Tensor({frames.size(), kJointCount, 3});
    for (std::size_t t = 0; t < frames.size(); ++t) {
        const std::string frame_path = path + "/frames/" + std::to_string(t);
        const json& frame = frames[t];
        if (!frame.is_array() || frame.size() != kJointCount) {
            throw ValidationError("expected " + std::to_string(kJointCount) + " joints",
                                  frame_path);
        }
        for (std::size_t j = 0; j < kJointCount; ++j) {
            const json& joint = frame[j];
            const std::string joint_path = frame_path + "/" + std::to_string(j);
            if (!joint.is_array() || joint.size() != 3) {
                throw ValidationError("expected [x,y,z]", joint_path);
            }
            for (std::size_t c = 0; c < 3; ++c) {
                if (!joint[c].is_number()) {
                    throw ValidationError("expected a number",
                                          joint_path + "/" + std::to_string(c));
                }
                const double v = joint[c].get<double>();
                if (!std::isfinite(v)) {
                    throw ValidationError("non-finite coordinate",
                                          joint_path + "/" + std::to_string(c));
                }
                seq.positions[(t * kJointCount + j) * 3 + c] = v;
            }
        }
    }
    return seq;
}

} // namespace

Dataset parse_canonical_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("expected a top-level object", "/");

    Dataset dataset;
    const json& classes = require(doc, "classes", "/");
    if (!classes.is_array()) throw ValidationError("expected an array", "/classes");
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (!classes[i].is_string()) {
            throw ValidationError("expected a string", "/classes/" + std::to_string(i));
        }
        dataset.class_names.push_back(classes[i].get<std::string>());
    }

    const json& samples = require(doc, "samples", "/");
    if (!samples.is_array()) throw ValidationError("expected an array", "/samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        dataset.samples.push_back(parse_sample(samples[i], dataset.class_names.size(),
                                               "/samples/" + std::to_string(i)));
    }

    if (auto it = doc.find("splits"); it != doc.end()) {
        if (!it->is_object()) throw ValidationError("expected an object", "/splits");
        for (const auto& [protocol, tags] : it->items()) {
            const std::string path = "/splits/" + protocol;
            if (!tags.is_array() || tags.size() != dataset.samples.size()) {
                throw ValidationError("expected one tag per sample", path);
            }
            std::vector<SplitTag> parsed;
            for (std::size_t i = 0; i < tags.size(); ++i) {
                if (tags[i] == "train") {
                    parsed.push_back(SplitTag::train);
                } else if (tags[i] == "test") {
                    parsed.push_back(SplitTag::test);
                } else {
                    throw ValidationError("split tag must be 'train' or 'test'",
                                          path + "/" + std::to_string(i));
                }
            }
            dataset.splits.emplace(protocol, std::move(parsed));
        }
    }
    return dataset;
}

std::string write_canonical_json(const Dataset& dataset) {
    json doc;
    doc["classes"] = dataset.class_names;
    json samples = json::array();
    for (const SkeletonSequence& seq : dataset.samples) {
        json sample;
        sample["label"] = seq.label;
        sample["subject"] = seq.subject_id;
        sample["view"] = seq.view_id;
        if (!seq.source.empty()) sample["source"] = seq.source;
        json frames = json::array();
        const std::size_t frame_count = seq.frame_count();
        for (std::size_t t = 0; t < frame_count; ++t) {
            json frame = json::array();
            for (std::size_t j = 0; j < kJointCount; ++j) {
                frame.push_back({seq.positions.at({t, j, 0}), seq.positions.at({t, j, 1}),
                                 seq.positions.at({t, j, 2})});
            }
            frames.push_back(std::move(frame));
        }
        sample["frames"] = std::move(frames);
        samples.push_back(std::move(sample));
    }
    doc["samples"] = std::move(samples);
    if (!dataset.splits.empty()) {
        json splits;
        for (const auto& [protocol, tags] : dataset.splits) {
            json list = json::array();
            for (SplitTag tag : tags) list.push_back(tag == SplitTag::train ? "train" : "test");
            splits[protocol] = std::move(list);
        }
        doc["splits"] = std::move(splits);
    }
    return doc.dump();
}

Dataset load_canonical_json(const std::filesystem::path& path) {
    std::ifstream input(path, std::ios::binary);
    if (!input) throw IoError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << input.rdbuf();
    try {
        return parse_canonical_json(buffer.str());
    } catch (const Error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void save_canonical_json(const Dataset& dataset, const std::filesystem::path& path) {
    const std::string text = write_canonical_json(dataset);
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << text;
        if (!out) throw IoError("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace csta
