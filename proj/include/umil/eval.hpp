// eval.hpp
//
// Frame-level scoring over coarse segments and ROC/AUC metrics.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "umil/datamodel.hpp"
#include "umil/model.hpp"

namespace umil {

enum class ScoringScheme { avg_prediction, avg_feature };

struct FrameScoreSeries {
    std::string video_id;
    std::vector<double> scores;  // one per frame
    std::vector<int> labels;     // ground truth per frame
};

struct MetricsReport {
    double auc_overall = 0.0;
    std::optional<double> auc_abnormal;
    std::map<std::string, double> class_wise;
    std::vector<std::pair<double, double>> roc_points;  // (fpr, tpr)
};

// Segment boundaries: m fine snippets into `segments` contiguous groups,
// sizes differing by at most 1, earlier segments larger. Returns exclusive
// end index per segment.
std::vector<std::size_t> coarse_partition(std::size_t m, std::size_t segments);

FrameScoreSeries frame_scores(const ModelState& model, const VideoRecord& video,
                              const Matrix& features, ScoringScheme scheme,
                              std::size_t coarse_segments = 32);

// AUC by the Mann-Whitney convention (ties get half credit); ROC points from
// a descending-score sweep with tie groups collapsed.
std::pair<double, std::vector<std::pair<double, double>>> roc_auc(
    const std::vector<double>& scores, const std::vector<int>& labels);

MetricsReport evaluate(const ModelState& model, const Manifest& manifest,
                       const FeatureStore& store, ScoringScheme scheme,
                       std::size_t coarse_segments = 32);

// metrics.json writer/reader; byte-stable for identical reports.
void write_metrics(const std::string& path, const MetricsReport& report);
std::string metrics_to_json(const MetricsReport& report);

}  // namespace umil
