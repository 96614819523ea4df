// objectives.cpp

#include "umil/objectives.hpp"

#include <cmath>
#include <stdexcept>

namespace umil {

double mil_video_score(const std::vector<double>& preds) {
    if (preds.empty()) throw std::invalid_argument("mil_video_score: empty prediction list");
    double m = preds[0];
    for (double p : preds)
        if (p > m) m = p;
    return m;
}

std::size_t mil_video_argmax(const std::vector<double>& preds) {
    if (preds.empty()) throw std::invalid_argument("mil_video_argmax: empty prediction list");
    std::size_t best = 0;
    for (std::size_t i = 1; i < preds.size(); ++i)
        if (preds[i] > preds[best]) best = i;
    return best;
}

double mil_loss(const std::vector<std::pair<double, int>>& video_scores_and_labels) {
    if (video_scores_and_labels.empty()) return 0.0;
    double s = 0.0;
    for (const auto& [y_hat, y] : video_scores_and_labels) s += bce(y_hat, y);
    return s / static_cast<double>(video_scores_and_labels.size());
}

double cosine_similarity(const double* a, const double* b, std::size_t n) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

PairBatch build_pairs_g(const Matrix& z, const Matrix& g_outputs, double tau) {
    if (z.rows() != g_outputs.rows())
        throw std::invalid_argument("build_pairs_g: row mismatch");
    PairBatch batch;
    const std::size_t n = z.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double sim = g_outputs(i, 0) * g_outputs(j, 0) +
                               g_outputs(i, 1) * g_outputs(j, 1);
            const double cos = cosine_similarity(&z.data()[i * z.cols()],
                                                 &z.data()[j * z.cols()], z.cols());
            batch.pairs.push_back({i, j, sim, cos > tau ? 1 : 0});
        }
    return batch;
}

std::vector<int> cluster_assign(const Matrix& g_outputs) {
    std::vector<int> labels(g_outputs.rows());
    for (std::size_t i = 0; i < g_outputs.rows(); ++i)
        labels[i] = g_outputs(i, 1) > g_outputs(i, 0) ? 1 : 0;
    return labels;
}

PairBatch build_pairs_f(const std::vector<double>& f_outputs,
                        const std::vector<int>& cluster_labels) {
    if (f_outputs.size() != cluster_labels.size())
        throw std::invalid_argument("build_pairs_f: size mismatch");
    PairBatch batch;
    const std::size_t n = f_outputs.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double sim = f_outputs[i] * f_outputs[j] +
                               (1.0 - f_outputs[i]) * (1.0 - f_outputs[j]);
            batch.pairs.push_back({i, j, sim, cluster_labels[i] == cluster_labels[j] ? 1 : 0});
        }
    return batch;
}

double pair_bce(const PairBatch& batch) {
    if (batch.pairs.empty()) return 0.0;
    double s = 0.0;
    for (const Pair& p : batch.pairs) s += bce(p.similarity, p.label);
    return s / static_cast<double>(batch.pairs.size());
}

std::vector<double> pair_bce_grad(const PairBatch& batch) {
    std::vector<double> g(batch.pairs.size(), 0.0);
    if (batch.pairs.empty()) return g;
    const double scale = 1.0 / static_cast<double>(batch.pairs.size());
    for (std::size_t k = 0; k < batch.pairs.size(); ++k)
        g[k] = scale * bce_grad(batch.pairs[k].similarity, batch.pairs[k].label);
    return g;
}

double umil_total(double loss_c, double loss_af, double loss_ag, double loss_st,
                  double loss_ent, const ObjectiveWeights& w) {
    return loss_c + w.alpha * loss_af + w.beta * loss_ag + w.lambda_st * loss_st +
           w.entropy_weight * loss_ent;
}

SelfTrainingTerms self_training_terms(const std::vector<double>& p_clean,
                                      const std::vector<double>& p_aug, double delta) {
    if (p_clean.size() != p_aug.size())
        throw std::invalid_argument("self_training_terms: size mismatch");
    SelfTrainingTerms t;
    const std::size_t n = p_clean.size();
    t.d_p_aug.assign(n, 0.0);
    t.gate.assign(n, 0);
    t.pseudo_label.assign(n, 0);
    if (n == 0) return t;
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double conf = std::max(p_clean[i], 1.0 - p_clean[i]);
        t.pseudo_label[i] = p_clean[i] >= 0.5 ? 1 : 0;
        if (conf > delta) {
            t.gate[i] = 1;
            t.loss += scale * bce(p_aug[i], t.pseudo_label[i]);
            t.d_p_aug[i] = scale * bce_grad(p_aug[i], t.pseudo_label[i]);
        }
    }
    return t;
}

Matrix augment_features(const Matrix& x, double sigma, std::mt19937_64& rng) {
    if (sigma == 0.0) return x;
    Matrix out = x;
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& v : out.data()) v += noise(rng);
    return out;
}

double self_training_loss(const std::function<std::vector<double>(const Matrix&)>& predict,
                          const Matrix& x_clean, double delta, double aug_sigma,
                          std::mt19937_64& rng) {
    const std::vector<double> p_clean = predict(x_clean);
    const Matrix x_aug = augment_features(x_clean, aug_sigma, rng);
    const std::vector<double> p_aug = predict(x_aug);
    return self_training_terms(p_clean, p_aug, delta).loss;
}

double entropy_loss(const std::vector<double>& f_outputs) {
    if (f_outputs.empty()) return 0.0;
    double s = 0.0;
    for (double p : f_outputs) s += binary_entropy(p);
    return s / static_cast<double>(f_outputs.size());
}

}  // namespace umil
