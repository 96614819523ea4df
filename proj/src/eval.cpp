// eval.cpp

#include "umil/eval.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

using nlohmann::json;

namespace umil {

std::vector<std::size_t> coarse_partition(std::size_t m, std::size_t segments) {
    if (m < 1) throw std::invalid_argument("coarse_partition: empty video");
    if (segments > m) segments = m;
    const std::size_t q = m / segments;
    const std::size_t r = m % segments;
    std::vector<std::size_t> ends;
    ends.reserve(segments);
    std::size_t pos = 0;
    for (std::size_t s = 0; s < segments; ++s) {
        pos += q + (s < r ? 1 : 0);
        ends.push_back(pos);
    }
    return ends;
}

FrameScoreSeries frame_scores(const ModelState& model, const VideoRecord& video,
                              const Matrix& features, ScoringScheme scheme,
                              std::size_t coarse_segments) {
    const std::size_t m = video.fine_snippet_count;
    if (features.rows() != m)
        throw std::invalid_argument("frame_scores: feature rows != snippet count for '" +
                                    video.id + "'");
    const std::vector<std::size_t> ends = coarse_partition(m, coarse_segments);

    std::vector<double> coarse(ends.size(), 0.0);
    if (scheme == ScoringScheme::avg_prediction) {
        const Matrix z = model.encoder().forward(features);
        const std::vector<double> p = model.forward_f(z);
        std::size_t start = 0;
        for (std::size_t s = 0; s < ends.size(); ++s) {
            double sum = 0.0;
            for (std::size_t i = start; i < ends[s]; ++i) sum += p[i];
            coarse[s] = sum / static_cast<double>(ends[s] - start);
            start = ends[s];
        }
    } else {
        std::size_t start = 0;
        for (std::size_t s = 0; s < ends.size(); ++s) {
            std::vector<double> mean_x(features.cols(), 0.0);
            for (std::size_t i = start; i < ends[s]; ++i)
                for (std::size_t c = 0; c < features.cols(); ++c)
                    mean_x[c] += features(i, c);
            for (double& v : mean_x) v /= static_cast<double>(ends[s] - start);
            coarse[s] = model.predict_f(mean_x);
            start = ends[s];
        }
    }

    FrameScoreSeries series;
    series.video_id = video.id;
    const std::size_t fpfs = video.frames_per_fine_snippet;
    series.scores.resize(m * fpfs);
    series.labels.assign(m * fpfs, 0);
    std::size_t seg = 0;
    for (std::size_t i = 0; i < m; ++i) {
        while (i >= ends[seg]) ++seg;
        for (std::size_t fr = i * fpfs; fr < (i + 1) * fpfs; ++fr)
            series.scores[fr] = coarse[seg];
    }
    for (const auto& [s, e] : video.anomaly_intervals)
        for (std::size_t fr = s; fr < e && fr < series.labels.size(); ++fr)
            series.labels[fr] = 1;
    return series;
}

std::pair<double, std::vector<std::pair<double, double>>> roc_auc(
    const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("roc_auc: size mismatch");
    std::size_t n_pos = 0, n_neg = 0;
    for (int y : labels) (y ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("roc_auc: need both classes, got " + std::to_string(n_pos) +
                                    " positives / " + std::to_string(n_neg) + " negatives");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    std::vector<std::pair<double, double>> points;
    points.emplace_back(0.0, 0.0);
    double auc = 0.0;
    std::size_t tp = 0, fp = 0;
    double prev_fpr = 0.0, prev_tpr = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] ? tp : fp)++;
            ++j;
        }
        const double fpr = static_cast<double>(fp) / static_cast<double>(n_neg);
        const double tpr = static_cast<double>(tp) / static_cast<double>(n_pos);
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) * 0.5;
        points.emplace_back(fpr, tpr);
        prev_fpr = fpr;
        prev_tpr = tpr;
        i = j;
    }
    return {auc, points};
}

MetricsReport evaluate(const ModelState& model, const Manifest& manifest,
                       const FeatureStore& store, ScoringScheme scheme,
                       std::size_t coarse_segments) {
    std::vector<double> all_scores, abn_scores;
    std::vector<int> all_labels, abn_labels;
    std::map<std::string, std::pair<std::vector<double>, std::vector<int>>> per_class;
    bool any_abnormal = false;

    for (const VideoRecord& v : manifest.videos) {
        if (!v.is_test) continue;
        FrameScoreSeries s =
            frame_scores(model, v, store.features(v.id), scheme, coarse_segments);
        all_scores.insert(all_scores.end(), s.scores.begin(), s.scores.end());
        all_labels.insert(all_labels.end(), s.labels.begin(), s.labels.end());
        if (v.label == 1) {
            any_abnormal = true;
            abn_scores.insert(abn_scores.end(), s.scores.begin(), s.scores.end());
            abn_labels.insert(abn_labels.end(), s.labels.begin(), s.labels.end());
            const std::string cls = v.class_name.value_or("unknown");
            auto& bucket = per_class[cls];
            bucket.first.insert(bucket.first.end(), s.scores.begin(), s.scores.end());
            bucket.second.insert(bucket.second.end(), s.labels.begin(), s.labels.end());
        }
    }
    if (all_scores.empty())
        throw std::invalid_argument("evaluate: dataset has no test videos");

    MetricsReport report;
    auto [auc_o, points] = roc_auc(all_scores, all_labels);
    report.auc_overall = auc_o;
    report.roc_points = std::move(points);
    auto has_both = [](const std::vector<int>& ys) {
        bool pos = false, neg = false;
        for (int y : ys) (y ? pos : neg) = true;
        return pos && neg;
    };
    if (any_abnormal) {
        if (has_both(abn_labels)) report.auc_abnormal = roc_auc(abn_scores, abn_labels).first;
        for (const auto& [cls, bucket] : per_class)
            if (has_both(bucket.second))
                report.class_wise[cls] = roc_auc(bucket.first, bucket.second).first;
    } else {
        std::cerr << "warning: no abnormal test video, AUC_A omitted\n";
    }
    return report;
}

std::string metrics_to_json(const MetricsReport& report) {
    json j;
    j["auc_overall"] = report.auc_overall;
    if (report.auc_abnormal) j["auc_abnormal"] = *report.auc_abnormal;
    j["class_wise"] = json::object();
    for (const auto& [cls, auc] : report.class_wise) j["class_wise"][cls] = auc;
    json pts = json::array();
    for (const auto& [fpr, tpr] : report.roc_points) pts.push_back({fpr, tpr});
    j["roc_points"] = pts;
    return j.dump(2) + "\n";
}

void write_metrics(const std::string& path, const MetricsReport& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write metrics: " + path);
    out << metrics_to_json(report);
}

}  // namespace umil
