// trainer.hpp
//
// MIL pretraining and the UMIL epoch loop. One optimizer step consumes one
// confident batch and (in UMIL) one ambiguous batch. Given (seed, config,
// dataset) every parameter, division and metric is bitwise reproducible.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "umil/datamodel.hpp"
#include "umil/division.hpp"
#include "umil/eval.hpp"
#include "umil/model.hpp"
#include "umil/objectives.hpp"

namespace umil {

enum class CSupervisionMode { video_max, per_snippet };

struct RunConfig {
    std::uint64_t seed = 0;
    std::size_t batch_size = 8;
    std::size_t epochs_mil = 30;
    std::size_t epochs_umil = 10;
    OptimizerConfig optimizer;
    ObjectiveWeights weights;
    DivisionConfig division;
    CSupervisionMode c_supervision = CSupervisionMode::video_max;
    bool freeze_encoder = false;
    std::vector<std::size_t> encoder_hidden_dims = {64};
    std::size_t encoder_output_dim = 32;
    ScoringScheme scoring_scheme = ScoringScheme::avg_prediction;
    std::size_t coarse_segments = 32;

    std::size_t total_epochs() const { return epochs_mil + epochs_umil; }
};

struct EpochReport {
    std::size_t epoch = 0;
    std::string phase;  // "mil" or "umil"
    double loss_c = 0.0;
    double loss_af = 0.0;
    double loss_ag = 0.0;
    double loss_st = 0.0;
    double loss_ent = 0.0;
    double loss_total = 0.0;
    std::size_t n_confident = 0;
    std::size_t n_ambiguous = 0;
    double lr = 0.0;
    double wall_seconds = 0.0;
    bool pair_terms_skipped = false;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Trainer {
public:
    Trainer(const Manifest& manifest, const FeatureStore& store, RunConfig config);

    ModelState& model() { return model_; }
    const ModelState& model() const { return model_; }
    HistoryMap& histories() { return histories_; }
    const std::vector<EpochReport>& reports() const { return reports_; }
    const RunConfig& config() const { return config_; }

    // epochs_mil epochs of video-level MIL (plus self-training when
    // lambda_st > 0), refreshing prediction histories every epoch.
    void pretrain_mil();

    EpochReport train_umil_epoch();
    void train_umil();

private:
    EpochReport run_epoch(bool umil_phase);
    void forward_all_update_histories();

    const Manifest& manifest_;
    const FeatureStore& store_;
    RunConfig config_;
    ModelState model_;
    HistoryMap histories_;
    std::map<std::string, int> video_label_;  // train videos
    std::vector<EpochReport> reports_;
    std::size_t global_epoch_ = 0;
};

struct RunResult {
    MetricsReport metrics_mil;
    MetricsReport metrics_final;
    std::vector<EpochReport> reports;
};

// Full pipeline: load, pretrain, UMIL, evaluate; writes checkpoint_mil.json,
// checkpoint_umil.json, metrics.json (final model) and epochs.jsonl.
RunResult run(const RunConfig& config, const std::string& dataset_path,
              const std::string& out_dir);

std::string epoch_report_to_json(const EpochReport& r);

}  // namespace umil
