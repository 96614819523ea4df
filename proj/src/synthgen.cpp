// synthgen.cpp

#include "umil/synthgen.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "umil/eval.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace umil {

namespace {

std::string video_name(const char* prefix, std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%s%03zu", prefix, i);
    return buf;
}

Matrix make_features(const std::vector<SnippetFlags>& flags, const GeneratorConfig& cfg,
                     std::mt19937_64& rng) {
    std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
    Matrix m(flags.size(), cfg.feature_dim);
    for (std::size_t i = 0; i < flags.size(); ++i) {
        for (std::size_t c = 0; c < cfg.feature_dim; ++c) m(i, c) = noise(rng);
        if (flags[i].anomaly) m(i, 0) += cfg.signal_scale;  // e_a = axis 0
        if (flags[i].context) m(i, 1) += cfg.signal_scale;  // e_c = axis 1, orthogonal
    }
    return m;
}

}  // namespace

void generate(const GeneratorConfig& cfg, const std::string& out_dir) {
    std::seed_seq seq{static_cast<std::uint64_t>(0x9e3779b9u), cfg.seed};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Manifest manifest;
    manifest.feature_dim = cfg.feature_dim;
    manifest.frames_per_fine_snippet = cfg.frames_per_fine_snippet;
    FeatureStore store;
    Oracle oracle;

    const std::size_t m = cfg.snippets_per_video;
    auto add_video = [&](const std::string& id, int label, bool is_test,
                         std::optional<std::string> cls,
                         std::vector<SnippetFlags> flags) {
        VideoRecord v;
        v.id = id;
        v.label = label;
        v.fine_snippet_count = m;
        v.frames_per_fine_snippet = cfg.frames_per_fine_snippet;
        v.is_test = is_test;
        v.class_name = std::move(cls);
        if (is_test) {
            // contiguous anomalous snippet runs as frame intervals
            std::size_t i = 0;
            while (i < m) {
                if (flags[i].anomaly) {
                    std::size_t j = i;
                    while (j < m && flags[j].anomaly) ++j;
                    v.anomaly_intervals.emplace_back(i * cfg.frames_per_fine_snippet,
                                                     j * cfg.frames_per_fine_snippet);
                    i = j;
                } else {
                    ++i;
                }
            }
        }
        store.add(id, make_features(flags, cfg, rng));
        oracle[id] = std::move(flags);
        manifest.videos.push_back(std::move(v));
    };

    auto anomaly_flags = [&](bool biased_context, bool force_context) {
        std::vector<SnippetFlags> flags(m);
        std::uniform_int_distribution<std::size_t> len_dist(cfg.anomaly_len_min,
                                                           cfg.anomaly_len_max);
        const std::size_t len = std::min(len_dist(rng), m);
        std::uniform_int_distribution<std::size_t> start_dist(0, m - len);
        const std::size_t start = start_dist(rng);
        for (std::size_t i = 0; i < m; ++i) {
            const bool anom = i >= start && i < start + len;
            flags[i].anomaly = anom;
            if (anom) {
                if (force_context)
                    flags[i].context = true;
                else if (biased_context)
                    flags[i].context = unit(rng) < cfg.bias_rate;
            } else {
                flags[i].context = unit(rng) < cfg.context_in_normal_rate;
            }
        }
        return flags;
    };

    auto normal_flags = [&](double context_rate) {
        std::vector<SnippetFlags> flags(m);
        for (std::size_t i = 0; i < m; ++i) flags[i].context = unit(rng) < context_rate;
        return flags;
    };

    const char* classes[2] = {"burst", "surge"};

    for (std::size_t i = 0; i < cfg.n_train_normal; ++i)
        add_video(video_name("train_nrm_", i), 0, false, std::nullopt,
                  normal_flags(cfg.context_in_normal_rate));
    for (std::size_t i = 0; i < cfg.n_train_abnormal; ++i)
        add_video(video_name("train_abn_", i), 1, false, classes[i % 2],
                  anomaly_flags(true, false));
    for (std::size_t i = 0; i < cfg.n_test_normal; ++i)
        add_video(video_name("test_nrm_", i), 0, true, std::nullopt,
                  normal_flags(cfg.context_in_test_normal_rate));
    const std::size_t n_counter = static_cast<std::size_t>(
        std::llround(cfg.counter_bias_test_rate * static_cast<double>(cfg.n_test_abnormal)));
    for (std::size_t i = 0; i < cfg.n_test_abnormal; ++i) {
        const bool counter_bias = i < n_counter;
        std::vector<SnippetFlags> flags = anomaly_flags(false, !counter_bias);
        if (counter_bias)
            for (SnippetFlags& f : flags)
                if (f.anomaly) f.context = false;
        add_video(video_name("test_abn_", i), 1, true, classes[i % 2], std::move(flags));
    }

    write_dataset(out_dir, manifest, store);

    json oj = json::object();
    for (const auto& [id, flags] : oracle) {
        json arr = json::array();
        for (const SnippetFlags& f : flags)
            arr.push_back({{"anomaly", f.anomaly}, {"context", f.context}});
        oj[id] = arr;
    }
    std::ofstream out(fs::path(out_dir) / "oracle.json");
    out << oj.dump(2) << "\n";
}

Oracle load_oracle(const std::string& dataset_dir) {
    std::ifstream in(fs::path(dataset_dir) / "oracle.json");
    if (!in) throw LoadError("missing oracle.json in " + dataset_dir);
    json j;
    in >> j;
    Oracle oracle;
    for (auto& [id, arr] : j.items()) {
        std::vector<SnippetFlags> flags;
        for (const auto& f : arr)
            flags.push_back({f.at("anomaly").get<bool>(), f.at("context").get<bool>()});
        oracle[id] = std::move(flags);
    }
    return oracle;
}

double oracle_bayes_auc(const Manifest& manifest, const FeatureStore& store) {
    std::vector<double> scores;
    std::vector<int> labels;
    for (const VideoRecord& v : manifest.videos) {
        if (!v.is_test) continue;
        const Matrix& x = store.features(v.id);
        const std::size_t fpfs = v.frames_per_fine_snippet;
        std::vector<int> frame_labels(v.fine_snippet_count * fpfs, 0);
        for (const auto& [s, e] : v.anomaly_intervals)
            for (std::size_t fr = s; fr < e; ++fr) frame_labels[fr] = 1;
        for (std::size_t i = 0; i < v.fine_snippet_count; ++i)
            for (std::size_t fr = i * fpfs; fr < (i + 1) * fpfs; ++fr) {
                scores.push_back(x(i, 0));  // projection onto e_a
                labels.push_back(frame_labels[fr]);
            }
    }
    return roc_auc(scores, labels).first;
}

}  // namespace umil
