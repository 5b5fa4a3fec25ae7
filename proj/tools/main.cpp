// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>

#include "csta/commands.hpp"
#include "csta/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"coupled spatial-temporal attention toolkit"};
    app.set_version_flag("--version", csta::kToolVersion);
    app.require_subcommand(1);

    csta::IngestOptions ingest;
    CLI::App* cmd_ingest = app.add_subcommand("ingest", "convert skeleton data to canonical JSON");
    cmd_ingest->add_option("--input", ingest.input, "input file or directory")->required();
    cmd_ingest->add_option("--format", ingest.format, "ntu or canonical")->required();
    cmd_ingest->add_option("--output", ingest.output, "output JSON path")->required();

    csta::TrainOptions train;
    CLI::App* cmd_train = app.add_subcommand("train", "train a model");
    cmd_train->add_option("--data", train.data, "canonical JSON dataset")->required();
    cmd_train->add_option("--config", train.config, "key/value config file");
    cmd_train->add_option("--seed", train.seed, "random seed (default 0)");
    cmd_train->add_option("--out", train.out, "output directory")->required();
    std::size_t epochs = 0;
    CLI::Option* epochs_opt = cmd_train->add_option("--epochs", epochs, "override epoch count");

    csta::EvalOptions eval;
    CLI::App* cmd_eval = app.add_subcommand("eval", "evaluate a checkpoint");
    cmd_eval->add_option("--data", eval.data, "canonical JSON dataset")->required();
    cmd_eval->add_option("--checkpoint", eval.checkpoint, "checkpoint file")->required();
    cmd_eval->add_option("--split", eval.split, "train or test")->required();
    cmd_eval->add_option("--out", eval.out, "output directory (default .)");

    csta::AblateOptions ablate;
    CLI::App* cmd_ablate = app.add_subcommand("ablate", "run the four attention settings");
    cmd_ablate->add_option("--data", ablate.data, "canonical JSON dataset")->required();
    cmd_ablate->add_option("--config", ablate.config, "key/value config file");
    cmd_ablate->add_option("--seed", ablate.seed, "random seed (default 0)");
    cmd_ablate->add_option("--out", ablate.out, "output directory")->required();

    csta::VisualizeOptions visualize;
    CLI::App* cmd_visualize =
        app.add_subcommand("visualize-attention", "export attention weights for one sample");
    cmd_visualize->alias("visualize_attention");
    cmd_visualize->add_option("--data", visualize.data, "canonical JSON dataset")->required();
    cmd_visualize->add_option("--checkpoint", visualize.checkpoint, "checkpoint file")
        ->required();
    cmd_visualize->add_option("--sample", visualize.sample, "dataset sample index")->required();
    cmd_visualize->add_option("--out", visualize.out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        // CLI11 returns 0 for --help/--version; everything else is usage.
        return code == 0 ? 0 : csta::kExitUsage;
    }

    if (cmd_ingest->parsed()) return csta::cmd_ingest(ingest);
    if (cmd_train->parsed()) {
        if (epochs_opt->count() > 0) train.epochs = epochs;
        return csta::cmd_train(train);
    }
    if (cmd_eval->parsed()) return csta::cmd_eval(eval);
    if (cmd_ablate->parsed()) return csta::cmd_ablate(ablate);
    if (cmd_visualize->parsed()) return csta::cmd_visualize_attention(visualize);
    return csta::kExitUsage;
}
