// datamodel.cpp

#include "umil/datamodel.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace umil {

const Matrix& FeatureStore::features(const std::string& id) const {
    auto it = store_.find(id);
    if (it == store_.end()) throw LoadError("FeatureStore: unknown video id '" + id + "'");
    return it->second;
}

std::size_t FeatureStore::feature_dim() const {
    if (store_.empty()) return 0;
    return store_.begin()->second.cols();
}

void PredictionHistory::update(double pred) {
    buf_[head_] = pred;
    head_ = (head_ + 1) % kCapacity;
    if (fill_ < kCapacity) ++fill_;
}

std::vector<double> PredictionHistory::values() const {
    std::vector<double> out;
    out.reserve(fill_);
    // oldest element sits at head_ once the buffer is full
    const std::size_t start = fill_ < kCapacity ? 0 : head_;
    for (std::size_t i = 0; i < fill_; ++i)
        out.push_back(buf_[(start + i) % kCapacity]);
    return out;
}

double PredictionHistory::mean() const {
    if (fill_ == 0) return 0.0;
    double s = 0.0;
    for (double v : values()) s += v;
    return s / static_cast<double>(fill_);
}

double PredictionHistory::variance() const {
    if (fill_ == 0) return 0.0;
    const double mu = mean();
    double s = 0.0;
    for (double v : values()) s += (v - mu) * (v - mu);
    return s / static_cast<double>(fill_);
}

double PredictionHistory::latest() const {
    if (fill_ == 0) throw std::logic_error("PredictionHistory: empty");
    return buf_[(head_ + kCapacity - 1) % kCapacity];
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

namespace {

VideoRecord video_from_json(const json& j) {
    VideoRecord v;
    v.id = j.at("id").get<std::string>();
    v.label = j.at("label").get<int>();
    v.fine_snippet_count = j.at("fine_snippet_count").get<std::size_t>();
    v.frames_per_fine_snippet = j.at("frames_per_fine_snippet").get<std::size_t>();
    v.is_test = j.at("split").get<std::string>() == "test";
    if (j.contains("class_name") && !j.at("class_name").is_null())
        v.class_name = j.at("class_name").get<std::string>();
    if (j.contains("anomaly_intervals"))
        for (const auto& iv : j.at("anomaly_intervals"))
            v.anomaly_intervals.emplace_back(iv.at(0).get<std::size_t>(),
                                             iv.at(1).get<std::size_t>());
    return v;
}

json video_to_json(const VideoRecord& v) {
    json j;
    j["id"] = v.id;
    j["label"] = v.label;
    j["fine_snippet_count"] = v.fine_snippet_count;
    j["frames_per_fine_snippet"] = v.frames_per_fine_snippet;
    j["split"] = v.is_test ? "test" : "train";
    if (v.class_name) j["class_name"] = *v.class_name;
    json ivs = json::array();
    for (const auto& [s, e] : v.anomaly_intervals) ivs.push_back({s, e});
    j["anomaly_intervals"] = ivs;
    return j;
}

void validate_record(const VideoRecord& v) {
    if (v.fine_snippet_count < 1)
        throw LoadError("video '" + v.id + "': fine_snippet_count must be >= 1");
    const std::size_t total_frames = v.fine_snippet_count * v.frames_per_fine_snippet;
    std::size_t prev_end = 0;
    for (const auto& [s, e] : v.anomaly_intervals) {
        if (s >= e || e > total_frames || s < prev_end)
            throw LoadError("video '" + v.id + "': bad anomaly interval [" + std::to_string(s) +
                            "," + std::to_string(e) + ")");
        prev_end = e;
    }
    if (v.label == 0 && !v.anomaly_intervals.empty())
        throw LoadError("video '" + v.id + "': normal video with anomaly intervals");
}

Matrix load_feature_csv(const fs::path& path, const VideoRecord& v, std::size_t dim) {
    std::ifstream in(path);
    if (!in) throw LoadError("video '" + v.id + "': missing feature file " + path.string());
    Matrix m(v.fine_snippet_count, dim);
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (row >= v.fine_snippet_count)
            throw LoadError("video '" + v.id + "': more rows than declared " +
                            std::to_string(v.fine_snippet_count));
        std::size_t col = 0;
        const char* p = line.data();
        const char* end = p + line.size();
        while (p < end) {
            double val;
            auto [next, ec] = std::from_chars(p, end, val);
            if (ec != std::errc{})
                throw LoadError("video '" + v.id + "': parse error at line " +
                                std::to_string(row + 1));
            if (!std::isfinite(val))
                throw LoadError("video '" + v.id + "': non-finite value at line " +
                                std::to_string(row + 1));
            if (col >= dim)
                throw LoadError("video '" + v.id + "': line " + std::to_string(row + 1) +
                                " has more than " + std::to_string(dim) + " values");
            m(row, col++) = val;
            p = next;
            if (p < end && *p == ',') ++p;
        }
        if (col != dim)
            throw LoadError("video '" + v.id + "': line " + std::to_string(row + 1) + " has " +
                            std::to_string(col) + " values, expected " + std::to_string(dim));
        ++row;
    }
    if (row != v.fine_snippet_count)
        throw LoadError("video '" + v.id + "': " + std::to_string(row) +
                        " rows, manifest declares " + std::to_string(v.fine_snippet_count));
    return m;
}

}  // namespace

std::pair<Manifest, FeatureStore> load_dataset(const std::string& root_path) {
    const fs::path root(root_path);
    std::ifstream in(root / "manifest.json");
    if (!in) throw LoadError("missing manifest: " + (root / "manifest.json").string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw LoadError("manifest parse error: " + std::string(e.what()));
    }

    Manifest manifest;
    manifest.feature_dim = j.at("feature_dim").get<std::size_t>();
    manifest.frames_per_fine_snippet = j.at("frames_per_fine_snippet").get<std::size_t>();
    for (const auto& vj : j.at("videos")) {
        VideoRecord v = video_from_json(vj);
        validate_record(v);
        manifest.videos.push_back(std::move(v));
    }
    if (manifest.videos.empty()) throw LoadError("manifest declares no videos");

    FeatureStore store;
    for (const auto& v : manifest.videos)
        store.add(v.id, load_feature_csv(root / "features" / (v.id + ".csv"), v,
                                         manifest.feature_dim));
    return {std::move(manifest), std::move(store)};
}

void write_dataset(const std::string& root_path, const Manifest& manifest,
                   const FeatureStore& store) {
    const fs::path root(root_path);
    fs::create_directories(root / "features");

    json j;
    j["feature_dim"] = manifest.feature_dim;
    j["frames_per_fine_snippet"] = manifest.frames_per_fine_snippet;
    json vids = json::array();
    for (const auto& v : manifest.videos) vids.push_back(video_to_json(v));
    j["videos"] = vids;
    std::ofstream mout(root / "manifest.json");
    mout << j.dump(2) << "\n";

    for (const auto& v : manifest.videos) {
        const Matrix& m = store.features(v.id);
        std::ofstream fout(root / "features" / (v.id + ".csv"));
        for (std::size_t r = 0; r < m.rows(); ++r) {
            for (std::size_t c = 0; c < m.cols(); ++c) {
                if (c) fout << ',';
                fout << format_double(m(r, c));
            }
            fout << '\n';
        }
    }
}

}  // namespace umil
