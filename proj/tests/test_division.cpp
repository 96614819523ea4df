// test_division.cpp
//
// Confident/ambiguous splitting, tie ordering, pseudo-label assignment and
// the max-confidence alternative.

#include <doctest.h>

#include <algorithm>
#include <random>

#include "umil/division.hpp"

using namespace umil;

namespace {

PredictionHistory history_of(const std::vector<double>& vals) {
    PredictionHistory h;
    for (double v : vals) h.update(v);
    return h;
}

Manifest labels_manifest(const std::vector<std::pair<std::string, int>>& vids,
                         std::size_t snippets) {
    Manifest m;
    m.feature_dim = 1;
    for (const auto& [id, label] : vids) {
        VideoRecord v;
        v.id = id;
        v.label = label;
        v.fine_snippet_count = snippets;
        m.videos.push_back(v);
    }
    return m;
}

}  // namespace

TEST_CASE("exactly the zero-variance 30 percent becomes confident") {
    HistoryMap h;
    // 10 snippets: 3 constant histories, 7 oscillating
    for (int i = 0; i < 10; ++i) {
        std::vector<double> vals;
        if (i < 3)
            vals = {0.8, 0.8, 0.8, 0.8, 0.8};
        else
            vals = {0.1, 0.9, 0.1, 0.9, 0.1};
        h[SnippetRef{"v", static_cast<std::size_t>(i)}] = history_of(vals);
    }
    DivisionConfig cfg;
    cfg.confident_fraction = 0.3;
    auto [c, a] = divide_snippets(h, cfg);
    REQUIRE(c.entries.size() == 3);
    REQUIRE(a.entries.size() == 7);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(c.entries[i].ref.video_id == "v");
        CHECK(c.entries[i].ref.index == i);
    }
}

TEST_CASE("identical variances split by stable (video_id, index) order") {
    HistoryMap h;
    for (int i = 0; i < 8; ++i)
        h[SnippetRef{"v", static_cast<std::size_t>(i)}] = history_of({0.5, 0.5, 0.5});
    DivisionConfig cfg;
    cfg.confident_fraction = 0.5;
    auto [c, a] = divide_snippets(h, cfg);
    REQUIRE(c.entries.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(c.entries[i].ref.index == i);
    for (std::size_t i = 0; i < 4; ++i) CHECK(a.entries[i].index == i + 4);
}

TEST_CASE("confident fraction 1.0 leaves the ambiguous set empty") {
    HistoryMap h;
    for (int i = 0; i < 5; ++i)
        h[SnippetRef{"v", static_cast<std::size_t>(i)}] = history_of({0.2, 0.4});
    DivisionConfig cfg;
    cfg.confident_fraction = 1.0;
    auto [c, a] = divide_snippets(h, cfg);
    CHECK(c.entries.size() == 5);
    CHECK(a.entries.empty());
}

TEST_CASE("snippets observed fewer than twice stay ambiguous") {
    HistoryMap h;
    h[SnippetRef{"v", 0}] = history_of({0.9});            // sentinel
    h[SnippetRef{"v", 1}] = history_of({0.1, 0.9, 0.1});  // high variance
    h[SnippetRef{"v", 2}] = history_of({0.7, 0.7});       // zero variance
    DivisionConfig cfg;
    cfg.confident_fraction = 0.34;  // |C| = 1
    auto [c, a] = divide_snippets(h, cfg);
    REQUIRE(c.entries.size() == 1);
    CHECK(c.entries[0].ref.index == 2);
    // even at k = 1.0 the singleton history is excluded
    cfg.confident_fraction = 1.0;
    auto [c2, a2] = divide_snippets(h, cfg);
    CHECK(c2.entries.size() == 2);
    REQUIRE(a2.entries.size() == 1);
    CHECK(a2.entries[0].index == 0);
}

TEST_CASE("division is a partition and ignores map insertion order") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::pair<SnippetRef, std::vector<double>>> raw;
        for (int i = 0; i < 30; ++i) {
            std::vector<double> vals;
            int n = 2 + static_cast<int>(rng() % 4);
            for (int k = 0; k < n; ++k) vals.push_back(u(rng));
            raw.push_back({SnippetRef{"v" + std::to_string(rng() % 3),
                                      static_cast<std::size_t>(i)},
                           vals});
        }
        HistoryMap h1;
        for (const auto& [ref, vals] : raw) h1[ref] = history_of(vals);
        std::shuffle(raw.begin(), raw.end(), rng);
        HistoryMap h2;
        for (const auto& [ref, vals] : raw) h2[ref] = history_of(vals);

        DivisionConfig cfg;
        cfg.confident_fraction = 0.4;
        auto [c1, a1] = divide_snippets(h1, cfg);
        auto [c2, a2] = divide_snippets(h2, cfg);

        // partition: disjoint, exhaustive
        CHECK(c1.entries.size() + a1.entries.size() == 30);
        std::vector<SnippetRef> all;
        for (const auto& e : c1.entries) all.push_back(e.ref);
        for (const auto& r : a1.entries) all.push_back(r);
        std::sort(all.begin(), all.end());
        CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());

        // insertion order has no effect
        REQUIRE(c1.entries.size() == c2.entries.size());
        for (std::size_t i = 0; i < c1.entries.size(); ++i)
            CHECK(c1.entries[i].ref == c2.entries[i].ref);
    }
}

TEST_CASE("confident entries come back sorted and grouped by video") {
    HistoryMap h;
    h[SnippetRef{"vb", 1}] = history_of({0.5, 0.5});
    h[SnippetRef{"va", 2}] = history_of({0.5, 0.5});
    h[SnippetRef{"va", 0}] = history_of({0.5, 0.5});
    DivisionConfig cfg;
    cfg.confident_fraction = 1.0;
    auto [c, a] = divide_snippets(h, cfg);
    REQUIRE(c.entries.size() == 3);
    CHECK(c.entries[0].ref == SnippetRef{"va", 0});
    CHECK(c.entries[1].ref == SnippetRef{"va", 2});
    CHECK(c.entries[2].ref == SnippetRef{"vb", 1});

    auto groups = c.by_video();
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].first == "va");
    CHECK(groups[0].second == std::vector<std::size_t>{0, 1});
    CHECK(groups[1].first == "vb");
    CHECK(groups[1].second == std::vector<std::size_t>{2});
}

TEST_CASE("pseudo-labels: normal always 0, abnormal rounds the mean") {
    Manifest m = labels_manifest({{"nrm", 0}, {"abn", 1}}, 4);
    HistoryMap h;
    h[SnippetRef{"nrm", 0}] = history_of({0.9, 0.9});   // normal, high mean
    h[SnippetRef{"abn", 0}] = history_of({0.92, 0.92}); // abnormal, high mean
    h[SnippetRef{"abn", 1}] = history_of({0.08, 0.08}); // abnormal, low mean
    DivisionConfig cfg;
    cfg.confident_fraction = 1.0;
    auto [c, a] = divide_snippets(h, cfg);
    assign_confident_labels(c, m, h, LabelMode::rounded_mean);
    REQUIRE(c.entries.size() == 3);
    CHECK(c.entries[0].pseudo_label == 1);  // abn/0
    CHECK(c.entries[1].pseudo_label == 0);  // abn/1
    CHECK(c.entries[2].pseudo_label == 0);  // nrm/0, forced 0 despite mean 0.9
}

TEST_CASE("video_label mode copies the bag label for abnormal videos") {
    Manifest m = labels_manifest({{"nrm", 0}, {"abn", 1}}, 2);
    HistoryMap h;
    h[SnippetRef{"nrm", 0}] = history_of({0.99, 0.99});
    h[SnippetRef{"abn", 0}] = history_of({0.01, 0.01});
    DivisionConfig cfg;
    cfg.confident_fraction = 1.0;
    auto [c, a] = divide_snippets(h, cfg);
    assign_confident_labels(c, m, h, LabelMode::video_label);
    CHECK(c.entries[0].pseudo_label == 1);  // abn despite low mean
    CHECK(c.entries[1].pseudo_label == 0);
}

TEST_CASE("max-confidence division keeps the extreme predictions") {
    HistoryMap h;
    h[SnippetRef{"v", 0}] = history_of({0.99});
    h[SnippetRef{"v", 1}] = history_of({0.5});
    h[SnippetRef{"v", 2}] = history_of({0.01});
    h[SnippetRef{"v", 3}] = history_of({0.6});
    auto [c, a] = max_confidence_divide(h, 0.5);
    REQUIRE(c.entries.size() == 2);
    CHECK(c.entries[0].ref.index == 0);
    CHECK(c.entries[0].pseudo_label == 1);
    CHECK(c.entries[1].ref.index == 2);
    CHECK(c.entries[1].pseudo_label == 0);
}

TEST_CASE("max-confidence all-0.5 case falls back to tie order") {
    HistoryMap h;
    for (int i = 0; i < 4; ++i)
        h[SnippetRef{"v", static_cast<std::size_t>(i)}] = history_of({0.5});
    auto [c, a] = max_confidence_divide(h, 0.5);
    REQUIRE(c.entries.size() == 2);
    CHECK(c.entries[0].ref.index == 0);
    CHECK(c.entries[1].ref.index == 1);
}

TEST_CASE("max-confidence matches an exhaustive sort oracle") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    HistoryMap h;
    std::vector<std::pair<double, SnippetRef>> oracle;
    for (int i = 0; i < 20; ++i) {
        SnippetRef ref{"v" + std::to_string(i % 4), static_cast<std::size_t>(i)};
        double p = u(rng);
        h[ref] = history_of({p});
        oracle.push_back({std::max(p, 1.0 - p), ref});
    }
    std::stable_sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    auto [c, a] = max_confidence_divide(h, 0.5);
    REQUIRE(c.entries.size() == 10);
    std::vector<SnippetRef> expected;
    for (int i = 0; i < 10; ++i) expected.push_back(oracle[i].second);
    std::sort(expected.begin(), expected.end());
    for (std::size_t i = 0; i < 10; ++i) CHECK(c.entries[i].ref == expected[i]);
}
