// synthgen.hpp
//
// Seeded generator of context-biased snippet-feature datasets. Anomaly and
// context signals live on two fixed orthogonal axes; during training the
// context co-occurs with the anomaly almost always, while the test split
// decouples them (anomaly-without-context videos and context-only normal
// probes).

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "umil/datamodel.hpp"

namespace umil {

struct GeneratorConfig {
    std::size_t feature_dim = 16;
    std::size_t n_train_normal = 80;
    std::size_t n_train_abnormal = 80;
    std::size_t n_test_normal = 20;
    std::size_t n_test_abnormal = 20;
    std::size_t snippets_per_video = 40;
    std::size_t frames_per_fine_snippet = 30;
    std::size_t anomaly_len_min = 4;
    std::size_t anomaly_len_max = 12;
    double bias_rate = 0.9;               // P(context | anomalous training snippet)
    double context_in_normal_rate = 0.05;  // P(context | normal training snippet)
    double counter_bias_test_rate = 0.5;   // fraction of test abnormal videos w/o context
    double context_in_test_normal_rate = 0.3;
    double noise_sigma = 0.5;
    double signal_scale = 2.0;
    std::uint64_t seed = 0;
};

struct SnippetFlags {
    bool anomaly = false;
    bool context = false;
};

// oracle.json side channel: per-snippet ground-truth flags, evaluation only.
using Oracle = std::map<std::string, std::vector<SnippetFlags>>;

// Writes manifest.json, features/*.csv and oracle.json under out_dir.
void generate(const GeneratorConfig& config, const std::string& out_dir);

Oracle load_oracle(const std::string& dataset_dir);

// Frame-level AUC of the ideal context-free detector <x, e_a> on the test
// split; the reference ceiling for any trained model.
double oracle_bayes_auc(const Manifest& manifest, const FeatureStore& store);

}  // namespace umil
