// division.cpp

#include "umil/division.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace umil {

std::vector<std::pair<std::string, std::vector<std::size_t>>> ConfidentSet::by_video() const {
    std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (groups.empty() || groups.back().first != entries[i].ref.video_id)
            groups.emplace_back(entries[i].ref.video_id, std::vector<std::size_t>{});
        groups.back().second.push_back(i);
    }
    return groups;
}

namespace {

struct RankedSnippet {
    double key;  // lower is more confident
    SnippetRef ref;
};

std::pair<ConfidentSet, AmbiguousSet> split_ranked(std::vector<RankedSnippet> ranked,
                                                   double fraction, bool exclude_sentinel) {
    if (ranked.empty()) throw std::invalid_argument("divide_snippets: empty snippet universe");
    std::sort(ranked.begin(), ranked.end(), [](const RankedSnippet& a, const RankedSnippet& b) {
        if (a.key != b.key) return a.key < b.key;
        return a.ref < b.ref;
    });
    std::size_t n_c = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(ranked.size())));
    if (n_c > ranked.size()) n_c = ranked.size();
    // unobserved snippets (sentinel key) never enter C even if k asks for them
    if (exclude_sentinel)
        while (n_c > 0 && std::isinf(ranked[n_c - 1].key)) --n_c;

    ConfidentSet c;
    AmbiguousSet a;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (i < n_c)
            c.entries.push_back({ranked[i].ref, 0});
        else
            a.entries.push_back(ranked[i].ref);
    }
    auto by_ref = [](const auto& x, const auto& y) { return x < y; };
    std::sort(c.entries.begin(), c.entries.end(),
              [](const ConfidentEntry& x, const ConfidentEntry& y) { return x.ref < y.ref; });
    std::sort(a.entries.begin(), a.entries.end(), by_ref);
    return {std::move(c), std::move(a)};
}

}  // namespace

std::pair<ConfidentSet, AmbiguousSet> divide_snippets(const HistoryMap& histories,
                                                      const DivisionConfig& config) {
    std::vector<RankedSnippet> ranked;
    ranked.reserve(histories.size());
    for (const auto& [ref, h] : histories)
        ranked.push_back({ranking_variance(h), ref});
    return split_ranked(std::move(ranked), config.confident_fraction, true);
}

std::pair<ConfidentSet, AmbiguousSet> max_confidence_divide(const HistoryMap& histories,
                                                            double confident_fraction) {
    std::vector<RankedSnippet> ranked;
    ranked.reserve(histories.size());
    for (const auto& [ref, h] : histories) {
        const double p = h.latest();
        const double confidence = std::max(p, 1.0 - p);
        ranked.push_back({-confidence, ref});
    }
    auto [c, a] = split_ranked(std::move(ranked), confident_fraction, false);
    for (ConfidentEntry& e : c.entries)
        e.pseudo_label = histories.at(e.ref).latest() >= 0.5 ? 1 : 0;
    return {std::move(c), std::move(a)};
}

void assign_confident_labels(ConfidentSet& c, const Manifest& manifest,
                             const HistoryMap& histories, LabelMode mode) {
    for (ConfidentEntry& e : c.entries) {
        const VideoRecord* v = manifest.find(e.ref.video_id);
        if (!v) throw std::invalid_argument("assign_confident_labels: unknown video '" +
                                            e.ref.video_id + "'");
        if (v->label == 0) {
            e.pseudo_label = 0;  // normal videos contain no anomaly
        } else if (mode == LabelMode::video_label) {
            e.pseudo_label = 1;
        } else {
            e.pseudo_label = histories.at(e.ref).mean() >= 0.5 ? 1 : 0;
        }
    }
}

}  // namespace umil
