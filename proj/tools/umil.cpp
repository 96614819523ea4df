// umil.cpp
//
// Command-line front end: generate / train / eval / ablate.
// Exit codes: 0 success, 2 config error, 3 I/O error, 4 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "umil/config.hpp"
#include "umil/eval.hpp"
#include "umil/synthgen.hpp"
#include "umil/trainer.hpp"

namespace fs = std::filesystem;
using namespace umil;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

int cmd_generate(const std::string& config_path, const std::string& out_dir) {
    ConfigFile cfg = load_config(config_path);
    generate(cfg.gen, out_dir);
    std::cout << "wrote dataset with "
              << cfg.gen.n_train_normal + cfg.gen.n_train_abnormal + cfg.gen.n_test_normal +
                     cfg.gen.n_test_abnormal
              << " videos to " << out_dir << "\n";
    return 0;
}

int cmd_train(const std::string& config_path, const std::string& dataset_dir,
              const std::string& out_dir, bool mil_only) {
    ConfigFile cfg = load_config(config_path);
    if (mil_only) cfg.run.epochs_umil = 0;
    RunResult result = run(cfg.run, dataset_dir, out_dir);
    std::cout << "auc_overall=" << format_double(result.metrics_final.auc_overall);
    if (result.metrics_final.auc_abnormal)
        std::cout << " auc_abnormal=" << format_double(*result.metrics_final.auc_abnormal);
    std::cout << "\n";
    return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& dataset_dir,
             const std::string& scheme_name, std::size_t coarse_segments) {
    if (!fs::exists(checkpoint)) {
        std::cerr << "error: missing checkpoint " << checkpoint << "\n";
        return kExitIo;
    }
    const ScoringScheme scheme = scheme_name == "avg_feature" ? ScoringScheme::avg_feature
                                                              : ScoringScheme::avg_prediction;
    ModelState model = ModelState::load_checkpoint(checkpoint);
    auto [manifest, store] = load_dataset(dataset_dir);
    MetricsReport report = evaluate(model, manifest, store, scheme, coarse_segments);
    std::cout << metrics_to_json(report);
    return 0;
}

int cmd_ablate(const std::string& config_path, const std::string& dataset_dir,
               const std::string& sweep) {
    ConfigFile cfg = load_config(config_path);
    std::vector<double> grid;
    if (sweep == "confident_fraction")
        grid = {0.1, 0.3, 0.5, 0.7, 0.9};
    else if (sweep == "tau")
        grid = {0.5, 0.6, 0.7, 0.8, 0.9};
    else if (sweep == "delta")
        grid = {0.3, 0.5, 0.7, 0.8, 0.9, 1.0};
    else if (sweep == "alpha_beta")
        grid = {0.01, 0.1, 1.0};
    else {
        std::cerr << "error: unknown sweep '" << sweep << "'\n";
        return kExitConfig;
    }

    auto [manifest, store] = load_dataset(dataset_dir);
    std::cout << "value,auc_overall,auc_abnormal\n";
    for (double value : grid) {
        RunConfig rc = cfg.run;
        if (sweep == "confident_fraction") rc.division.confident_fraction = value;
        else if (sweep == "tau") rc.weights.tau = value;
        else if (sweep == "delta") rc.weights.delta = value;
        else { rc.weights.alpha = value; rc.weights.beta = value; }

        Trainer trainer(manifest, store, rc);
        trainer.pretrain_mil();
        trainer.train_umil();
        MetricsReport m = evaluate(trainer.model(), manifest, store, rc.scoring_scheme,
                                   rc.coarse_segments);
        std::cout << format_double(value) << ',' << format_double(m.auc_overall) << ','
                  << (m.auc_abnormal ? format_double(*m.auc_abnormal) : std::string("nan"))
                  << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unbiased multiple-instance learning for weakly supervised anomaly "
                 "detection over snippet features"};
    app.require_subcommand(1);

    std::string config_path, dataset_dir, out_dir, checkpoint;
    std::string scheme = "avg_prediction";
    std::string sweep;
    std::size_t coarse_segments = 32;
    bool mil_only = false;

    auto* gen = app.add_subcommand("generate", "Generate a synthetic context-biased dataset");
    gen->add_option("config", config_path, "Config file (flat JSON)")->required();
    gen->add_option("out_dir", out_dir, "Output dataset directory")->required();

    auto* train = app.add_subcommand("train", "MIL pretraining followed by UMIL epochs");
    train->add_option("config", config_path)->required();
    train->add_option("dataset_dir", dataset_dir)->required();
    train->add_option("out_dir", out_dir)->required();
    train->add_flag("--mil-only", mil_only, "Stop after MIL pretraining (baseline)");

    auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
    ev->add_option("checkpoint", checkpoint)->required();
    ev->add_option("dataset_dir", dataset_dir)->required();
    ev->add_option("--scheme", scheme, "avg_prediction | avg_feature")
        ->check(CLI::IsMember({"avg_prediction", "avg_feature"}));
    ev->add_option("--coarse-segments", coarse_segments);

    auto* ab = app.add_subcommand("ablate", "Re-train over a named parameter grid");
    ab->add_option("config", config_path)->required();
    ab->add_option("dataset_dir", dataset_dir)->required();
    ab->add_option("--sweep", sweep, "confident_fraction | tau | delta | alpha_beta")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    try {
        if (gen->parsed()) return cmd_generate(config_path, out_dir);
        if (train->parsed()) return cmd_train(config_path, dataset_dir, out_dir, mil_only);
        if (ev->parsed()) return cmd_eval(checkpoint, dataset_dir, scheme, coarse_segments);
        if (ab->parsed()) return cmd_ablate(config_path, dataset_dir, sweep);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const LoadError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}
