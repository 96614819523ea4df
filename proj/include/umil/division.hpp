// division.hpp
//
// Epoch-start split of all snippets into a confident set (low prediction
// variance, pseudo-labeled) and an ambiguous set (everything else).

#pragma once

#include <string>
#include <vector>

#include "umil/datamodel.hpp"

namespace umil {

enum class DivisionStrategy { historical_variance, max_confidence };
enum class LabelMode { rounded_mean, video_label };

struct DivisionConfig {
    double confident_fraction = 0.30;
    DivisionStrategy strategy = DivisionStrategy::historical_variance;
    LabelMode label_mode = LabelMode::rounded_mean;
};

struct ConfidentEntry {
    SnippetRef ref;
    int pseudo_label = 0;
};

struct ConfidentSet {
    std::vector<ConfidentEntry> entries;  // sorted by (video_id, index)

    // Video ids in order, each with the indices into `entries` it owns.
    std::vector<std::pair<std::string, std::vector<std::size_t>>> by_video() const;
};

struct AmbiguousSet {
    std::vector<SnippetRef> entries;  // sorted by (video_id, index)
};

// Variance-ranked division. |C| = round(k * total); ties broken by
// (video_id, index); snippets observed fewer than twice never enter C
// ahead of observed ones (infinite-variance sentinel).
std::pair<ConfidentSet, AmbiguousSet> divide_snippets(const HistoryMap& histories,
                                                      const DivisionConfig& config);

// Appendix-style alternative: rank by max(p, 1-p) of the latest prediction.
std::pair<ConfidentSet, AmbiguousSet> max_confidence_divide(const HistoryMap& histories,
                                                            double confident_fraction);

// Pseudo-labels: normal-video snippets are always 0; abnormal-video snippets
// take round(history mean) or the video label depending on mode.
void assign_confident_labels(ConfidentSet& c, const Manifest& manifest,
                             const HistoryMap& histories, LabelMode mode);

}  // namespace umil
