// objectives.hpp
//
// The loss terms: MIL video-level BCE, the two pairwise losses over the
// ambiguous set, the confidence-gated self-training loss, entropy
// minimization, and the weighted total. Each loss exposes both its value
// and its gradient w.r.t. the head outputs so the trainer can backprop
// through the shared encoder.

#pragma once

#include <functional>
#include <random>
#include <vector>

#include "umil/matrix.hpp"
#include "umil/numerics.hpp"

namespace umil {

struct ObjectiveWeights {
    double alpha = 0.1;
    double beta = 0.1;
    double lambda_st = 1.0;
    double entropy_weight = 0.01;
    double tau = 0.8;    // cosine threshold for same-pair indicator (Eq. 2)
    double delta = 0.8;  // self-training confidence gate
    double aug_sigma = 0.1;
};

struct Pair {
    std::size_t i = 0;
    std::size_t j = 0;
    double similarity = 0.0;
    int label = 0;
};

struct PairBatch {
    std::vector<Pair> pairs;
};

// Video-level MIL score: max over the video's snippet predictions.
double mil_video_score(const std::vector<double>& preds);
std::size_t mil_video_argmax(const std::vector<double>& preds);

// Mean BCE over (score, label) tuples.
double mil_loss(const std::vector<std::pair<double, int>>& video_scores_and_labels);

// All unordered pairs; similarity = g_i . g_j, label = [cosine(z_i, z_j) > tau].
PairBatch build_pairs_g(const Matrix& z, const Matrix& g_outputs, double tau);

// argmax of each 2-simplex row; exact tie -> 0.
std::vector<int> cluster_assign(const Matrix& g_outputs);

// All unordered pairs; similarity = p_i p_j + (1-p_i)(1-p_j), label = same cluster.
PairBatch build_pairs_f(const std::vector<double>& f_outputs,
                        const std::vector<int>& cluster_labels);

// Mean BCE over pairs; 0 for an empty batch.
double pair_bce(const PairBatch& pairs);

// d pair_bce / d similarity per pair (mean-scaled).
std::vector<double> pair_bce_grad(const PairBatch& pairs);

double umil_total(double loss_c, double loss_af, double loss_ag, double loss_st,
                  double loss_ent, const ObjectiveWeights& weights);

// Confidence-gated self-training. The gate and pseudo-label come from the
// clean prediction and carry no gradient; the loss is BCE of the augmented
// prediction against the pseudo-label, averaged over the whole batch
// (closed gates contribute 0).
struct SelfTrainingTerms {
    double loss = 0.0;
    std::vector<double> d_p_aug;  // dL/d p_aug per sample
    std::vector<int> gate;
    std::vector<int> pseudo_label;
};
SelfTrainingTerms self_training_terms(const std::vector<double>& p_clean,
                                      const std::vector<double>& p_aug, double delta);

// Forward-only convenience over a prediction functor (rows of x are samples).
double self_training_loss(const std::function<std::vector<double>(const Matrix&)>& predict,
                          const Matrix& x_clean, double delta, double aug_sigma,
                          std::mt19937_64& rng);

// Additive Gaussian feature noise; sigma = 0 leaves x untouched and draws
// nothing from the generator.
Matrix augment_features(const Matrix& x, double sigma, std::mt19937_64& rng);

// Mean binary entropy of f outputs.
double entropy_loss(const std::vector<double>& f_outputs);

double cosine_similarity(const double* a, const double* b, std::size_t n);

}  // namespace umil
