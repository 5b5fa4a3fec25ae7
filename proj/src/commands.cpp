// SPDX-License-Identifier: Apache-2.0
#include "csta/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "csta/checkpoint.hpp"
#include "csta/config_file.hpp"
#include "csta/csv.hpp"
#include "csta/dataset_json.hpp"
#include "csta/errors.hpp"
#include "csta/manifest.hpp"
#include "csta/ntu_parser.hpp"
#include "csta/svg.hpp"
#include "csta/trainer.hpp"

namespace csta {

namespace {

namespace fs = std::filesystem;

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void write_text_atomic(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << text;
        if (!out) throw IoError("failed writing " + tmp.string());
    }
    fs::rename(tmp, path);
}

template <typename Body>
int guarded(const Body& body) {
    try {
        return body();
    } catch (const DivergedError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInternal;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const EmptySampleError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IndexError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInternal;
    }
}

/// The split protocol a command operates on: "default" when present,
/// otherwise the lexicographically first table. Datasets without split
/// tables use the pseudo protocol "" (everything is train).
std::string pick_protocol(const Dataset& dataset) {
    if (dataset.splits.empty()) return "";
    if (dataset.splits.count("default")) return "default";
    return dataset.splits.begin()->first;
}

RunConfig resolve_run_config(const std::string& config_path, std::uint64_t seed,
                             std::size_t num_classes) {
    RunConfig config;
    if (!config_path.empty()) config = load_config_file(config_path, std::move(config));
    config.train.seed = seed;
    config.model.num_classes = num_classes;
    return config;
}

std::vector<CsvRow> confusion_rows(const EvalReport& report, const Dataset& dataset) {
    CsvRow header{"true_class"};
    for (const std::string& name : dataset.class_names) header.push_back(name);
    std::vector<CsvRow> rows{header};
    for (std::size_t c = 0; c < report.confusion.size(); ++c) {
        CsvRow row{dataset.class_names[c]};
        for (std::size_t p = 0; p < report.confusion[c].size(); ++p) {
            row.push_back(std::to_string(report.confusion[c][p]));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_real(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

std::string eval_report_json(const EvalReport& report, const Dataset& dataset) {
    nlohmann::json doc;
    doc["accuracy"] = report.accuracy;
    doc["sample_count"] = report.sample_count;
    doc["classes"] = dataset.class_names;
    doc["per_class_accuracy"] = report.per_class_accuracy;
    doc["confusion"] = report.confusion;
    return doc.dump(2) + "\n";
}

} // namespace

int cmd_ingest(const IngestOptions& options) {
    return guarded([&]() {
        Stopwatch watch;
        if (options.format != "ntu" && options.format != "canonical") {
            throw ValidationError("unknown format '" + options.format +
                                  "' (expected ntu or canonical)");
        }
        Dataset dataset;
        std::vector<std::string> inputs;
        if (options.format == "canonical") {
            dataset = load_canonical_json(options.input);
            inputs.push_back(options.input);
        } else {
            std::vector<fs::path> files;
            if (fs::is_directory(options.input)) {
                for (const auto& entry : fs::directory_iterator(options.input)) {
                    if (entry.is_regular_file() && entry.path().extension() == ".skeleton") {
                        files.push_back(entry.path());
                    }
                }
                std::sort(files.begin(), files.end());
                if (files.empty()) {
                    throw IoError("no .skeleton files under " + options.input);
                }
            } else if (fs::exists(options.input)) {
                files.push_back(options.input);
            } else {
                throw IoError("cannot open " + options.input);
            }
            std::size_t max_label = 0;
            for (const fs::path& file : files) {
                dataset.samples.push_back(parse_ntu_skeleton_file(file));
                max_label = std::max(max_label, dataset.samples.back().label);
                inputs.push_back(file.string());
            }
            for (std::size_t k = 0; k <= max_label; ++k) {
                char name[8];
                std::snprintf(name, sizeof name, "A%03zu", k + 1);
                dataset.class_names.push_back(name);
            }
        }
        dataset.validate();
        save_canonical_json(dataset, options.output);

        RunManifest manifest;
        manifest.command = "ingest";
        manifest.inputs = inputs;
        manifest.outputs = {options.output};
        nlohmann::json config{{"format", options.format}};
        manifest.config_json = config.dump();
        manifest.duration_seconds = watch.seconds();
        write_manifest(options.output + ".manifest.json", manifest);

        std::cout << "ingested " << dataset.samples.size() << " samples, "
                  << dataset.class_names.size() << " classes -> " << options.output << '\n';
        return kExitOk;
    });
}

int cmd_train(const TrainOptions& options) {
    return guarded([&]() {
        Stopwatch watch;
        const Dataset dataset = load_canonical_json(options.data);
        RunConfig config = resolve_run_config(options.config, options.seed,
                                              dataset.class_count());
        if (options.epochs) config.train.epochs = *options.epochs;
        config.model.validate();
        config.train.validate();

        const std::string protocol = pick_protocol(dataset);
        TrainResult result = train(dataset, config.model, config.train, protocol);

        fs::create_directories(options.out);
        const fs::path checkpoint_path = fs::path(options.out) / "checkpoint.ckpt";
        save_checkpoint(checkpoint_path, config.model, result.params);

        std::vector<CsvRow> history{{"epoch", "loss", "accuracy"}};
        for (std::size_t e = 0; e < result.history.size(); ++e) {
            history.push_back({std::to_string(e + 1), format_real(result.history[e].loss),
                               format_real(result.history[e].accuracy)});
        }
        const fs::path history_path = fs::path(options.out) / "history.csv";
        write_csv(history_path, history);

        RunManifest manifest;
        manifest.command = "train";
        manifest.seed = options.seed;
        manifest.inputs = {options.data};
        manifest.outputs = {checkpoint_path.string(), history_path.string()};
        manifest.config_json = run_config_to_json(config);
        manifest.duration_seconds = watch.seconds();
        write_manifest(fs::path(options.out) / "manifest.json", manifest);

        std::cout << "trained " << config.train.epochs << " epochs, final loss "
                  << format_real(result.history.back().loss) << ", train accuracy "
                  << format_real(result.history.back().accuracy) << '\n';
        std::cout << "checkpoint -> " << checkpoint_path.string() << '\n';
        return kExitOk;
    });
}

int cmd_eval(const EvalOptions& options) {
    return guarded([&]() {
        Stopwatch watch;
        if (options.split != "train" && options.split != "test") {
            throw ValidationError("unknown split '" + options.split +
                                  "' (expected train or test)");
        }
        const Dataset dataset = load_canonical_json(options.data);
        const Checkpoint checkpoint = load_checkpoint(options.checkpoint);
        const SplitTag tag = options.split == "train" ? SplitTag::train : SplitTag::test;
        const EvalReport report = evaluate(dataset, pick_protocol(dataset), tag,
                                           checkpoint.params, checkpoint.config);

        fs::create_directories(options.out);
        const fs::path report_path = fs::path(options.out) / "report.json";
        write_text_atomic(report_path, eval_report_json(report, dataset));
        const fs::path confusion_path = fs::path(options.out) / "confusion.csv";
        write_csv(confusion_path, confusion_rows(report, dataset));

        RunManifest manifest;
        manifest.command = "eval";
        manifest.inputs = {options.data, options.checkpoint};
        manifest.outputs = {report_path.string(), confusion_path.string()};
        nlohmann::json config{{"split", options.split},
                              {"model", nlohmann::json::parse(
                                            model_config_to_json(checkpoint.config))}};
        manifest.config_json = config.dump();
        manifest.duration_seconds = watch.seconds();
        write_manifest(fs::path(options.out) / "manifest.json", manifest);

        std::cout << "accuracy " << format_real(report.accuracy) << " on " << report.sample_count
                  << " " << options.split << " samples\n";
        return kExitOk;
    });
}

int cmd_ablate(const AblateOptions& options) {
    return guarded([&]() {
        Stopwatch watch;
        const Dataset dataset = load_canonical_json(options.data);
        RunConfig config = resolve_run_config(options.config, options.seed,
                                              dataset.class_count());
        config.model.validate();
        config.train.validate();

        const std::vector<AblationRow> rows =
            ablation_suite(dataset, config.model, config.train, pick_protocol(dataset));

        std::vector<CsvRow> table{{"mode", "accuracy", "error"}};
        std::size_t succeeded = 0;
        for (const AblationRow& row : rows) {
            table.push_back({to_string(row.mode),
                             row.report ? format_real(row.report->accuracy) : "",
                             row.error});
            if (row.report) ++succeeded;
        }
        fs::create_directories(options.out);
        const fs::path table_path = fs::path(options.out) / "ablation.csv";
        write_csv(table_path, table);

        RunManifest manifest;
        manifest.command = "ablate";
        manifest.seed = options.seed;
        manifest.inputs = {options.data};
        manifest.outputs = {table_path.string()};
        manifest.config_json = run_config_to_json(config);
        manifest.duration_seconds = watch.seconds();
        write_manifest(fs::path(options.out) / "manifest.json", manifest);

        for (const AblationRow& row : rows) {
            std::cout << to_string(row.mode) << ": "
                      << (row.report ? format_real(row.report->accuracy) : "error: " + row.error)
                      << '\n';
        }
        return succeeded > 0 ? kExitOk : kExitInternal;
    });
}

int cmd_visualize_attention(const VisualizeOptions& options) {
    return guarded([&]() {
        Stopwatch watch;
        const Dataset dataset = load_canonical_json(options.data);
        const Checkpoint checkpoint = load_checkpoint(options.checkpoint);
        if (options.sample >= dataset.samples.size()) {
            throw IndexError("sample " + std::to_string(options.sample) +
                             " out of range, dataset has " +
                             std::to_string(dataset.samples.size()) + " samples");
        }
        const FixedSample sample =
            prepare_eval_sample(dataset.samples[options.sample], checkpoint.config);
        const AblationMode mode = checkpoint.config.attention_enabled
                                      ? checkpoint.config.mode
                                      : AblationMode::without_st;
        // The motion stream is the movement-salience view: its spatial gates
        // rank joints by how much their displacement matters to the decision.
        const AttentionOutput attention =
            csta_attention(sample.motion, checkpoint.params.motion.attention, mode);

        fs::create_directories(options.out);
        std::ostringstream csv;
        write_attention_csv(csv, attention);
        const fs::path csv_path = fs::path(options.out) / "attention.csv";
        write_text_atomic(csv_path, csv.str());

        std::ostringstream svg;
        write_heatmap_svg(svg, attention.map);
        const fs::path svg_path = fs::path(options.out) / "heatmap.svg";
        write_text_atomic(svg_path, svg.str());

        std::vector<std::pair<std::size_t, double>> ranked;
        for (std::size_t j = 0; j < attention.s_att.size(); ++j) {
            ranked.emplace_back(j, attention.s_att[j]);
        }
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        nlohmann::json joints = nlohmann::json::array();
        for (const auto& [joint, weight] : ranked) {
            joints.push_back({{"joint", joint}, {"s_weight", weight}});
        }
        const fs::path joints_path = fs::path(options.out) / "joints.json";
        write_text_atomic(joints_path, joints.dump(2) + "\n");

        RunManifest manifest;
        manifest.command = "visualize-attention";
        manifest.inputs = {options.data, options.checkpoint};
        manifest.outputs = {csv_path.string(), svg_path.string(), joints_path.string()};
        nlohmann::json config{{"sample", options.sample},
                              {"model", nlohmann::json::parse(
                                            model_config_to_json(checkpoint.config))}};
        manifest.config_json = config.dump();
        manifest.duration_seconds = watch.seconds();
        write_manifest(fs::path(options.out) / "manifest.json", manifest);

        std::cout << "attention for sample " << options.sample << " -> " << options.out << '\n';
        return kExitOk;
    });
}

} // namespace csta
