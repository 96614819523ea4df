// numerics.cpp

#include "umil/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace umil {

Matrix affine_forward(const Matrix& w, const std::vector<double>& b, const Matrix& x) {
    if (x.cols() != w.rows())
        throw std::invalid_argument("affine_forward: X " + x.shape_str() + " incompatible with W " +
                                    w.shape_str());
    if (b.size() != w.cols())
        throw std::invalid_argument("affine_forward: bias length " + std::to_string(b.size()) +
                                    " != W cols " + std::to_string(w.cols()));
    Matrix y = matmul(x, w);
    for (std::size_t i = 0; i < y.rows(); ++i)
        for (std::size_t j = 0; j < y.cols(); ++j)
            y(i, j) += b[j];
    return y;
}

void adamw_step(std::vector<Parameter*>& params, const OptimizerConfig& config,
                double lr_t, std::size_t step) {
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
    for (Parameter* p : params) {
        auto& v = p->value.data();
        auto& g = p->grad.data();
        auto& m1 = p->m1.data();
        auto& m2 = p->m2.data();
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] -= lr_t * config.weight_decay * v[i];
            m1[i] = config.beta1 * m1[i] + (1.0 - config.beta1) * g[i];
            m2[i] = config.beta2 * m2[i] + (1.0 - config.beta2) * g[i] * g[i];
            const double mhat = m1[i] / bc1;
            const double vhat = m2[i] / bc2;
            v[i] -= lr_t * mhat / (std::sqrt(vhat) + config.eps);
            g[i] = 0.0;
        }
    }
}

double cosine_warmup_lr(double epoch_progress, const OptimizerConfig& config) {
    const double wf = config.total_epochs == 0
                          ? 0.0
                          : static_cast<double>(config.warmup_epochs) /
                                static_cast<double>(config.total_epochs);
    if (wf > 0.0 && epoch_progress < wf)
        return config.lr_base * (epoch_progress / wf);
    const double span = 1.0 - wf;
    const double s = span > 0.0 ? (epoch_progress - wf) / span : 1.0;
    return config.lr_base * 0.5 * (1.0 + std::cos(M_PI * s));
}

double grad_check(const std::function<double(bool)>& loss_fn,
                  std::vector<Parameter*>& params, double eps) {
    for (Parameter* p : params) p->zero_grad();
    const double base = loss_fn(true);
    if (!std::isfinite(base))
        throw std::runtime_error("grad_check: non-finite loss " + std::to_string(base));

    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.size());
    for (Parameter* p : params) analytic.push_back(p->grad.data());

    double max_err = 0.0;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        auto& v = params[pi]->value.data();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double orig = v[i];
            v[i] = orig + eps;
            const double up = loss_fn(false);
            v[i] = orig - eps;
            const double down = loss_fn(false);
            v[i] = orig;
            if (!std::isfinite(up) || !std::isfinite(down))
                throw std::runtime_error("grad_check: non-finite perturbed loss");
            const double numeric = (up - down) / (2.0 * eps);
            const double err = std::abs(analytic[pi][i] - numeric) /
                               std::max(1.0, std::abs(numeric));
            if (err > max_err) max_err = err;
        }
    }
    for (Parameter* p : params) p->zero_grad();
    return max_err;
}

}  // namespace umil
