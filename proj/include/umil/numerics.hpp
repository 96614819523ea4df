// numerics.hpp
//
// Scalar math primitives, trainable parameters, the AdamW update and the
// warmup + cosine learning-rate schedule. Everything is 64-bit and
// single-threaded; given identical inputs, every function here is bitwise
// reproducible.

#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "umil/matrix.hpp"

namespace umil {

// Clamp bound applied to any probability before a log.
inline constexpr double kProbEps = 1e-7;

inline double clamp_prob(double p) {
    if (p < kProbEps) return kProbEps;
    if (p > 1.0 - kProbEps) return 1.0 - kProbEps;
    return p;
}

// Overflow-safe logistic.
inline double sigmoid(double z) {
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// Two-way softmax, shift-invariant.
inline std::pair<double, double> softmax2(double z1, double z2) {
    const double m = z1 > z2 ? z1 : z2;
    const double e1 = std::exp(z1 - m);
    const double e2 = std::exp(z2 - m);
    const double s = e1 + e2;
    return {e1 / s, e2 / s};
}

// Binary cross-entropy with clamped prediction.
inline double bce(double y_hat, double y) {
    const double p = clamp_prob(y_hat);
    return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
}

// d bce / d y_hat; zero outside the clamp interval.
inline double bce_grad(double y_hat, double y) {
    if (y_hat < kProbEps || y_hat > 1.0 - kProbEps) return 0.0;
    return (y_hat - y) / (y_hat * (1.0 - y_hat));
}

// Binary entropy -p ln p - (1-p) ln(1-p).
inline double binary_entropy(double p) {
    const double q = clamp_prob(p);
    return -(q * std::log(q) + (1.0 - q) * std::log(1.0 - q));
}

inline double binary_entropy_grad(double p) {
    if (p < kProbEps || p > 1.0 - kProbEps) return 0.0;
    return std::log((1.0 - p) / p);
}

// A trainable tensor with its gradient and AdamW moments.
struct Parameter {
    Matrix value;
    Matrix grad;
    Matrix m1;
    Matrix m2;

    Parameter() = default;
    explicit Parameter(Matrix v)
        : value(std::move(v)),
          grad(value.rows(), value.cols()),
          m1(value.rows(), value.cols()),
          m2(value.rows(), value.cols()) {}

    void zero_grad() { grad.fill(0.0); }
};

struct OptimizerConfig {
    double lr_base = 8e-6;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.001;
    std::size_t warmup_epochs = 5;
    std::size_t total_epochs = 40;
};

// Decoupled weight decay, then bias-corrected Adam update. Grads are
// zeroed afterward.
void adamw_step(std::vector<Parameter*>& params, const OptimizerConfig& config,
                double lr_t, std::size_t step);

// Linear ramp 0 -> lr_base over the warmup fraction, then cosine decay to 0.
double cosine_warmup_lr(double epoch_progress, const OptimizerConfig& config);

// Y = X * W + b (b broadcast per row).
Matrix affine_forward(const Matrix& w, const std::vector<double>& b, const Matrix& x);

// Central-difference gradient verification. loss_fn must populate grads via
// its own backward pass when called with compute_grads = true and must leave
// parameter values untouched. Returns the max relative error over all
// parameter entries.
double grad_check(const std::function<double(bool compute_grads)>& loss_fn,
                  std::vector<Parameter*>& params, double eps);

}  // namespace umil
