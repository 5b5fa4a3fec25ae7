// SPDX-License-Identifier: Apache-2.0
#include "csta/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include <json.hpp>

#include "csta/errors.hpp"

namespace csta {

namespace {

constexpr char kMagic[8] = {'C', 'S', 'T', 'A', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t value) {
    char bytes[4];
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
    out.write(bytes, 4);
}

void put_u64(std::ostream& out, std::uint64_t value) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
    out.write(bytes, 8);
}

void put_f64(std::ostream& out, double value) {
    put_u64(out, std::bit_cast<std::uint64_t>(value));
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    if (!in) throw IoError("truncated checkpoint");
    std::uint32_t value = 0;
    for (int i = 3; i >= 0; --i) value = (value << 8) | bytes[i];
    return value;
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    if (!in) throw IoError("truncated checkpoint");
    std::uint64_t value = 0;
    for (int i = 7; i >= 0; --i) value = (value << 8) | bytes[i];
    return value;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

} // namespace

std::string model_config_to_json(const ModelConfig& config) {
    nlohmann::json doc;
    doc["frames"] = config.frames;
    doc["joints"] = config.joints;
    doc["interp_joints"] = config.interp_joints;
    doc["num_classes"] = config.num_classes;
    nlohmann::json conv = nlohmann::json::array();
    for (const ConvSpec& spec : config.conv) {
        conv.push_back({{"channels", spec.channels},
                        {"kernel", spec.kernel},
                        {"stride", spec.stride},
                        {"pad", spec.pad}});
    }
    doc["conv"] = std::move(conv);
    doc["fc1_width"] = config.fc1_width;
    doc["fc2_width"] = config.fc2_width;
    doc["mode"] = to_string(config.mode);
    doc["attention_enabled"] = config.attention_enabled;
    doc["center_on_spine"] = config.center_on_spine;
    return doc.dump();
}

ModelConfig model_config_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("invalid model config JSON: ") + e.what());
    }
    ModelConfig config;
    try {
        config.frames = doc.at("frames").get<std::size_t>();
        config.joints = doc.at("joints").get<std::size_t>();
        config.interp_joints = doc.at("interp_joints").get<std::size_t>();
        config.num_classes = doc.at("num_classes").get<std::size_t>();
        const auto& conv = doc.at("conv");
        if (!conv.is_array() || conv.size() != config.conv.size()) {
            throw ValidationError("model config must describe 3 conv layers", "/conv");
        }
        for (std::size_t i = 0; i < config.conv.size(); ++i) {
            config.conv[i].channels = conv[i].at("channels").get<std::size_t>();
            config.conv[i].kernel = conv[i].at("kernel").get<std::size_t>();
            config.conv[i].stride = conv[i].at("stride").get<std::size_t>();
            config.conv[i].pad = conv[i].at("pad").get<std::size_t>();
        }
        config.fc1_width = doc.at("fc1_width").get<std::size_t>();
        config.fc2_width = doc.at("fc2_width").get<std::size_t>();
        config.mode = ablation_mode_from_string(doc.at("mode").get<std::string>());
        config.attention_enabled = doc.at("attention_enabled").get<bool>();
        config.center_on_spine = doc.at("center_on_spine").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid model config: ") + e.what());
    }
    return config;
}

void save_checkpoint(const std::filesystem::path& path, const ModelConfig& config,
                     const ModelParams& params) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(kMagic, sizeof kMagic);
        put_u32(out, kVersion);
        const std::string config_json = model_config_to_json(config);
        put_u64(out, config_json.size());
        out.write(config_json.data(), static_cast<std::streamsize>(config_json.size()));

        std::size_t count = 0;
        for_each_param(params, [&](const std::string&, const Tensor&) { ++count; });
        put_u64(out, count);
        for_each_param(params, [&](const std::string& name, const Tensor& tensor) {
            put_u64(out, name.size());
            out.write(name.data(), static_cast<std::streamsize>(name.size()));
            put_u64(out, tensor.rank());
            for (std::size_t d = 0; d < tensor.rank(); ++d) put_u64(out, tensor.dim(d));
            for (double v : tensor.data()) put_f64(out, v);
        });
        if (!out) throw IoError("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) {
        throw IoError(path.string() + " is not a checkpoint file");
    }
    const std::uint32_t version = get_u32(in);
    if (version != kVersion) {
        throw IoError("unsupported checkpoint version " + std::to_string(version));
    }
    const std::uint64_t config_len = get_u64(in);
    std::string config_json(config_len, '\0');
    in.read(config_json.data(), static_cast<std::streamsize>(config_len));
    if (!in) throw IoError("truncated checkpoint");

    Checkpoint checkpoint;
    checkpoint.config = model_config_from_json(config_json);
    checkpoint.params = make_model_params(checkpoint.config);

    std::map<std::string, Tensor*> by_name;
    for_each_param(checkpoint.params,
                   [&](const std::string& name, Tensor& tensor) { by_name[name] = &tensor; });

    const std::uint64_t count = get_u64(in);
    if (count != by_name.size()) {
        throw IoError("checkpoint holds " + std::to_string(count) + " tensors, expected " +
                      std::to_string(by_name.size()));
    }
    for (std::uint64_t k = 0; k < count; ++k) {
        const std::uint64_t name_len = get_u64(in);
        std::string name(name_len, '\0');
        in.read(name.data(), static_cast<std::streamsize>(name_len));
        if (!in) throw IoError("truncated checkpoint");
        auto it = by_name.find(name);
        if (it == by_name.end()) throw IoError("unknown tensor '" + name + "' in checkpoint");
        Tensor& tensor = *it->second;
        const std::uint64_t rank = get_u64(in);
        Shape shape(rank);
        for (std::size_t d = 0; d < rank; ++d) shape[d] = get_u64(in);
        if (shape != tensor.shape()) {
            throw IoError("tensor '" + name + "' has shape " + shape_to_string(shape) +
                          ", config implies " + shape_to_string(tensor.shape()));
        }
        for (std::size_t i = 0; i < tensor.size(); ++i) tensor[i] = get_f64(in);
    }
    return checkpoint;
}

} // namespace csta
