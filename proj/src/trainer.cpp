// trainer.cpp

#include "umil/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include <json.hpp>

using nlohmann::json;

namespace umil {

namespace {

// Gather feature rows for a list of snippet refs into one batch matrix.
Matrix gather(const FeatureStore& store, const std::vector<SnippetRef>& refs) {
    const std::size_t d = store.feature_dim();
    Matrix x(refs.size(), d);
    for (std::size_t i = 0; i < refs.size(); ++i) {
        const Matrix& feats = store.features(refs[i].video_id);
        for (std::size_t c = 0; c < d; ++c) x(i, c) = feats(refs[i].index, c);
    }
    return x;
}

std::mt19937_64 epoch_rng(std::uint64_t seed, std::size_t epoch) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(0xe10cull),
                      static_cast<std::uint64_t>(epoch)};
    return std::mt19937_64(seq);
}

}  // namespace

Trainer::Trainer(const Manifest& manifest, const FeatureStore& store, RunConfig config)
    : manifest_(manifest), store_(store), config_(std::move(config)) {
    EncoderSpec spec;
    spec.input_dim = manifest.feature_dim;
    spec.hidden_dims = config_.encoder_hidden_dims;
    spec.output_dim = config_.encoder_output_dim;
    spec.frozen = config_.freeze_encoder;
    model_ = ModelState(spec, config_.seed);
    config_.optimizer.total_epochs = config_.total_epochs();
    for (const VideoRecord& v : manifest_.videos) {
        if (v.is_test) continue;
        video_label_[v.id] = v.label;
        for (std::size_t i = 0; i < v.fine_snippet_count; ++i)
            histories_[SnippetRef{v.id, i}];  // empty history per train snippet
    }
}

void Trainer::forward_all_update_histories() {
    for (const VideoRecord& v : manifest_.videos) {
        if (v.is_test) continue;
        const Matrix z = model_.encoder().forward(store_.features(v.id));
        const std::vector<double> p = model_.forward_f(z);
        for (std::size_t i = 0; i < p.size(); ++i)
            histories_[SnippetRef{v.id, i}].update(p[i]);
    }
}

EpochReport Trainer::run_epoch(bool umil_phase) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t b = config_.batch_size;
    const ObjectiveWeights& w = config_.weights;

    forward_all_update_histories();

    // 1. confident / ambiguous division
    ConfidentSet conf;
    AmbiguousSet ambi;
    if (!umil_phase) {
        for (const auto& [ref, h] : histories_) conf.entries.push_back({ref, 0});
        assign_confident_labels(conf, manifest_, histories_, LabelMode::video_label);
    } else if (config_.division.strategy == DivisionStrategy::max_confidence) {
        std::tie(conf, ambi) =
            max_confidence_divide(histories_, config_.division.confident_fraction);
        // normal videos carry no anomaly regardless of rounded confidence
        for (ConfidentEntry& e : conf.entries)
            if (video_label_.at(e.ref.video_id) == 0) e.pseudo_label = 0;
    } else {
        std::tie(conf, ambi) = divide_snippets(histories_, config_.division);
        assign_confident_labels(conf, manifest_, histories_, config_.division.label_mode);
    }

    // 2. sampling units: video groups in video_max mode, entries otherwise
    const bool video_max = config_.c_supervision == CSupervisionMode::video_max;
    std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
    if (video_max) groups = conf.by_video();
    const std::size_t c_units = video_max ? groups.size() : conf.entries.size();
    const bool use_pairs = umil_phase && ambi.entries.size() >= 2;

    const std::size_t c_steps = c_units == 0 ? 0 : (c_units + b - 1) / b;
    const std::size_t a_steps = use_pairs ? (ambi.entries.size() + b - 1) / b : 0;
    const std::size_t steps = std::max(c_steps, a_steps);

    EpochReport report;
    report.epoch = global_epoch_;
    report.phase = umil_phase ? "umil" : "mil";
    report.n_confident = conf.entries.size();
    report.n_ambiguous = ambi.entries.size();
    report.pair_terms_skipped = umil_phase && !use_pairs;
    if (steps == 0) {
        ++global_epoch_;
        return report;
    }

    std::mt19937_64 rng = epoch_rng(config_.seed, global_epoch_);
    std::vector<std::size_t> perm_c(c_units);
    std::iota(perm_c.begin(), perm_c.end(), 0);
    std::shuffle(perm_c.begin(), perm_c.end(), rng);
    std::vector<std::size_t> perm_a(ambi.entries.size());
    std::iota(perm_a.begin(), perm_a.end(), 0);
    std::shuffle(perm_a.begin(), perm_a.end(), rng);

    auto params = model_.trainable_params();
    const bool frozen = config_.freeze_encoder;

    for (std::size_t step = 0; step < steps; ++step) {
        double loss_c = 0.0, loss_af = 0.0, loss_ag = 0.0, loss_st = 0.0, loss_ent = 0.0;

        // --- confident supervision ---
        std::vector<SnippetRef> c_refs;
        std::vector<int> c_labels;                 // per entry (per_snippet mode)
        std::vector<std::pair<std::size_t, int>> group_spans;  // (row count, label)
        if (c_units > 0) {
            for (std::size_t t = 0; t < b; ++t) {
                const std::size_t u = perm_c[(step * b + t) % c_units];
                if (video_max) {
                    const auto& [vid, idxs] = groups[u];
                    int group_label = 0;  // bag label: OR over snippet pseudo-labels
                    for (std::size_t ei : idxs) {
                        c_refs.push_back(conf.entries[ei].ref);
                        c_labels.push_back(conf.entries[ei].pseudo_label);
                        group_label = std::max(group_label, conf.entries[ei].pseudo_label);
                    }
                    group_spans.emplace_back(idxs.size(), group_label);
                } else {
                    c_refs.push_back(conf.entries[u].ref);
                    c_labels.push_back(conf.entries[u].pseudo_label);
                }
            }
            const Matrix xc = gather(store_, c_refs);
            EncoderCache cache;
            const Matrix zc = model_.encoder().forward(xc, cache);
            const std::vector<double> p = model_.forward_f(zc);
            std::vector<double> dp(p.size(), 0.0);
            if (video_max) {
                const double scale = 1.0 / static_cast<double>(group_spans.size());
                std::size_t row = 0;
                for (const auto& [count, label] : group_spans) {
                    std::size_t best = row;
                    for (std::size_t r = row; r < row + count; ++r)
                        if (p[r] > p[best]) best = r;
                    loss_c += scale * bce(p[best], label);
                    dp[best] += scale * bce_grad(p[best], label);
                    row += count;
                }
            } else {
                const double scale = 1.0 / static_cast<double>(p.size());
                for (std::size_t i = 0; i < p.size(); ++i) {
                    loss_c += scale * bce(p[i], c_labels[i]);
                    dp[i] += scale * bce_grad(p[i], c_labels[i]);
                }
            }
            const Matrix dz = model_.backward_f(zc, p, dp);
            if (!frozen) model_.encoder().backward(cache, dz);

            // self-training rides on the confident batch during MIL pretraining
            if (!umil_phase && w.lambda_st > 0.0) {
                const Matrix x_aug = augment_features(xc, w.aug_sigma, rng);
                EncoderCache aug_cache;
                const Matrix z_aug = model_.encoder().forward(x_aug, aug_cache);
                const std::vector<double> p_aug = model_.forward_f(z_aug);
                SelfTrainingTerms st = self_training_terms(p, p_aug, w.delta);
                loss_st = st.loss;
                std::vector<double> dpa(p_aug.size());
                for (std::size_t i = 0; i < dpa.size(); ++i)
                    dpa[i] = w.lambda_st * st.d_p_aug[i];
                const Matrix dz_aug = model_.backward_f(z_aug, p_aug, dpa);
                if (!frozen) model_.encoder().backward(aug_cache, dz_aug);
            }
        }

        // --- ambiguous supervision ---
        if (use_pairs) {
            std::vector<SnippetRef> a_refs;
            for (std::size_t t = 0; t < b; ++t)
                a_refs.push_back(ambi.entries[perm_a[(step * b + t) % perm_a.size()]]);
            const Matrix xa = gather(store_, a_refs);
            EncoderCache cache;
            const Matrix za = model_.encoder().forward(xa, cache);
            const std::vector<double> pa = model_.forward_f(za);
            const Matrix qa = model_.forward_g(za);
            const std::vector<int> cluster = cluster_assign(qa);

            const PairBatch pairs_g = build_pairs_g(za, qa, w.tau);
            const PairBatch pairs_f = build_pairs_f(pa, cluster);
            loss_ag = pair_bce(pairs_g);
            loss_af = pair_bce(pairs_f);
            loss_ent = entropy_loss(pa);

            Matrix dz_total(za.rows(), za.cols());
            if (w.beta > 0.0) {
                Matrix dq(qa.rows(), 2);
                const std::vector<double> gg = pair_bce_grad(pairs_g);
                for (std::size_t k = 0; k < pairs_g.pairs.size(); ++k) {
                    const Pair& pr = pairs_g.pairs[k];
                    const double g = w.beta * gg[k];
                    dq(pr.i, 0) += g * qa(pr.j, 0);
                    dq(pr.i, 1) += g * qa(pr.j, 1);
                    dq(pr.j, 0) += g * qa(pr.i, 0);
                    dq(pr.j, 1) += g * qa(pr.i, 1);
                }
                const Matrix dz = model_.backward_g(za, qa, dq);
                for (std::size_t i = 0; i < dz_total.size(); ++i)
                    dz_total.data()[i] += dz.data()[i];
            }
            if (w.alpha > 0.0 || w.entropy_weight > 0.0) {
                std::vector<double> dp(pa.size(), 0.0);
                if (w.alpha > 0.0) {
                    const std::vector<double> gf = pair_bce_grad(pairs_f);
                    for (std::size_t k = 0; k < pairs_f.pairs.size(); ++k) {
                        const Pair& pr = pairs_f.pairs[k];
                        const double g = w.alpha * gf[k];
                        dp[pr.i] += g * (2.0 * pa[pr.j] - 1.0);
                        dp[pr.j] += g * (2.0 * pa[pr.i] - 1.0);
                    }
                }
                if (w.entropy_weight > 0.0) {
                    const double scale = w.entropy_weight / static_cast<double>(pa.size());
                    for (std::size_t i = 0; i < pa.size(); ++i)
                        dp[i] += scale * binary_entropy_grad(pa[i]);
                }
                const Matrix dz = model_.backward_f(za, pa, dp);
                for (std::size_t i = 0; i < dz_total.size(); ++i)
                    dz_total.data()[i] += dz.data()[i];
            }
            if (!frozen && (w.beta > 0.0 || w.alpha > 0.0 || w.entropy_weight > 0.0))
                model_.encoder().backward(cache, dz_total);

            if (w.lambda_st > 0.0) {
                const Matrix x_aug = augment_features(xa, w.aug_sigma, rng);
                EncoderCache aug_cache;
                const Matrix z_aug = model_.encoder().forward(x_aug, aug_cache);
                const std::vector<double> p_aug = model_.forward_f(z_aug);
                SelfTrainingTerms st = self_training_terms(pa, p_aug, w.delta);
                loss_st = st.loss;
                std::vector<double> dpa(p_aug.size());
                for (std::size_t i = 0; i < dpa.size(); ++i)
                    dpa[i] = w.lambda_st * st.d_p_aug[i];
                const Matrix dz_aug = model_.backward_f(z_aug, p_aug, dpa);
                if (!frozen) model_.encoder().backward(aug_cache, dz_aug);
            }
        }

        const ObjectiveWeights eff = umil_phase
                                         ? w
                                         : ObjectiveWeights{0.0, 0.0, w.lambda_st, 0.0,
                                                            w.tau, w.delta, w.aug_sigma};
        const double total = umil_total(loss_c, loss_af, loss_ag, loss_st, loss_ent, eff);
        if (!std::isfinite(total))
            throw NumericalError("non-finite loss at epoch " + std::to_string(global_epoch_) +
                                 " step " + std::to_string(step));

        const double progress =
            (static_cast<double>(global_epoch_) +
             (static_cast<double>(step) + 0.5) / static_cast<double>(steps)) /
            static_cast<double>(config_.total_epochs());
        const double lr_t = cosine_warmup_lr(progress, config_.optimizer);
        adamw_step(params, config_.optimizer, lr_t, ++model_.optimizer_step);

        report.loss_c += loss_c;
        report.loss_af += loss_af;
        report.loss_ag += loss_ag;
        report.loss_st += loss_st;
        report.loss_ent += loss_ent;
        report.loss_total += total;
        report.lr = lr_t;
    }

    const double inv = 1.0 / static_cast<double>(steps);
    report.loss_c *= inv;
    report.loss_af *= inv;
    report.loss_ag *= inv;
    report.loss_st *= inv;
    report.loss_ent *= inv;
    report.loss_total *= inv;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ++global_epoch_;
    return report;
}

void Trainer::pretrain_mil() {
    for (std::size_t e = 0; e < config_.epochs_mil; ++e)
        reports_.push_back(run_epoch(false));
}

EpochReport Trainer::train_umil_epoch() {
    EpochReport r = run_epoch(true);
    reports_.push_back(r);
    return r;
}

void Trainer::train_umil() {
    for (std::size_t e = 0; e < config_.epochs_umil; ++e) train_umil_epoch();
}

std::string epoch_report_to_json(const EpochReport& r) {
    json j;
    j["epoch"] = r.epoch;
    j["phase"] = r.phase;
    j["loss_c"] = r.loss_c;
    j["loss_af"] = r.loss_af;
    j["loss_ag"] = r.loss_ag;
    j["loss_st"] = r.loss_st;
    j["loss_ent"] = r.loss_ent;
    j["loss_total"] = r.loss_total;
    j["n_confident"] = r.n_confident;
    j["n_ambiguous"] = r.n_ambiguous;
    j["lr"] = r.lr;
    j["pair_terms_skipped"] = r.pair_terms_skipped;
    return j.dump();
}

RunResult run(const RunConfig& config, const std::string& dataset_path,
              const std::string& out_dir) {
    namespace fs = std::filesystem;
    auto [manifest, store] = load_dataset(dataset_path);
    fs::create_directories(out_dir);

    Trainer trainer(manifest, store, config);
    trainer.pretrain_mil();
    trainer.model().save_checkpoint((fs::path(out_dir) / "checkpoint_mil.json").string());

    RunResult result;
    result.metrics_mil = evaluate(trainer.model(), manifest, store, config.scoring_scheme,
                                  config.coarse_segments);

    trainer.train_umil();
    if (config.epochs_umil > 0) {
        trainer.model().save_checkpoint(
            (fs::path(out_dir) / "checkpoint_umil.json").string());
        result.metrics_final = evaluate(trainer.model(), manifest, store,
                                        config.scoring_scheme, config.coarse_segments);
    } else {
        result.metrics_final = result.metrics_mil;
    }
    result.reports = trainer.reports();

    write_metrics((fs::path(out_dir) / "metrics.json").string(), result.metrics_final);
    std::ofstream ep(fs::path(out_dir) / "epochs.jsonl");
    for (const EpochReport& r : result.reports) ep << epoch_report_to_json(r) << "\n";
    return result;
}

}  // namespace umil
