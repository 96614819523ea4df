// datamodel.hpp
//
// Dataset manifest, per-video feature matrices, and the per-snippet ring
// buffer of recent anomaly predictions.
//
// On-disk layout:
//   <root>/manifest.json        dataset-level metadata and video records
//   <root>/features/<id>.csv    one fine snippet per line, d decimal values

#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "umil/matrix.hpp"

namespace umil {

struct VideoRecord {
    std::string id;
    int label = 0;  // 0 normal, 1 abnormal
    std::size_t fine_snippet_count = 0;
    std::optional<std::string> class_name;
    std::size_t frames_per_fine_snippet = 1;
    bool is_test = false;
    // [start_frame, end_frame) pairs, sorted, non-overlapping; test videos only.
    std::vector<std::pair<std::size_t, std::size_t>> anomaly_intervals;
};

struct Manifest {
    std::size_t feature_dim = 0;
    std::size_t frames_per_fine_snippet = 1;
    std::vector<VideoRecord> videos;

    const VideoRecord* find(const std::string& id) const {
        for (const auto& v : videos)
            if (v.id == id) return &v;
        return nullptr;
    }
};

struct SnippetRef {
    std::string video_id;
    std::size_t index = 0;

    friend bool operator==(const SnippetRef&, const SnippetRef&) = default;
    friend auto operator<=>(const SnippetRef& a, const SnippetRef& b) {
        if (auto c = a.video_id <=> b.video_id; c != 0) return c;
        return a.index <=> b.index;
    }
};

// Read-only after load; one (m x d) matrix per video.
class FeatureStore {
public:
    void add(const std::string& id, Matrix features) { store_[id] = std::move(features); }
    const Matrix& features(const std::string& id) const;
    std::size_t feature_dim() const;
    bool contains(const std::string& id) const { return store_.count(id) != 0; }

private:
    std::map<std::string, Matrix> store_;
};

// Ring buffer of the last 5 predictions from the anomaly head.
class PredictionHistory {
public:
    static constexpr std::size_t kCapacity = 5;

    void update(double pred);
    std::size_t fill_count() const { return fill_; }

    // Population variance of the stored values; 0 for a singleton.
    double variance() const;
    double mean() const;
    // Most recently appended prediction.
    double latest() const;
    // Oldest-to-newest snapshot.
    std::vector<double> values() const;

private:
    std::array<double, kCapacity> buf_{};
    std::size_t fill_ = 0;
    std::size_t head_ = 0;  // next write slot
};

// Variance ranking sentinel: a snippet seen fewer than twice is maximally
// ambiguous and sorts after every observed snippet.
inline constexpr double kVarianceSentinel = std::numeric_limits<double>::infinity();

inline double ranking_variance(const PredictionHistory& h) {
    return h.fill_count() < 2 ? kVarianceSentinel : h.variance();
}

using HistoryMap = std::map<SnippetRef, PredictionHistory>;

struct LoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::pair<Manifest, FeatureStore> load_dataset(const std::string& root_path);
void write_dataset(const std::string& root_path, const Manifest& manifest,
                   const FeatureStore& store);

// Shortest-round-trip decimal rendering, shared by every writer so reload
// is bitwise exact.
std::string format_double(double v);

}  // namespace umil
