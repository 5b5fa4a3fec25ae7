// SPDX-License-Identifier: Apache-2.0
#include "csta/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "csta/errors.hpp"
#include "csta/version.hpp"

namespace csta {

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
    nlohmann::json doc;
    doc["command"] = manifest.command;
    doc["version"] = kToolVersion;
    doc["seed"] = manifest.seed;
    doc["inputs"] = manifest.inputs;
    doc["outputs"] = manifest.outputs;
    doc["duration_seconds"] = manifest.duration_seconds;
    if (!manifest.config_json.empty()) {
        doc["config"] = nlohmann::json::parse(manifest.config_json);
    }
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << doc.dump(2) << '\n';
        if (!out) throw IoError("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace csta
