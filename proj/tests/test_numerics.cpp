// test_numerics.cpp
//
// Scalar primitives, affine forward, AdamW, the lr schedule, and the
// finite-difference gradient checker.

#include <doctest.h>

#include <cmath>
#include <random>

#include "umil/model.hpp"
#include "umil/numerics.hpp"

using namespace umil;

TEST_CASE("sigmoid basic values") {
    CHECK(sigmoid(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(sigmoid(std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(sigmoid(-50.0) > 0.0);
    CHECK(sigmoid(-50.0) < 1e-20);
    CHECK(sigmoid(50.0) >= 1.0 - 1e-20);
    // overflow safety
    CHECK(std::isfinite(sigmoid(-1e8)));
    CHECK(std::isfinite(sigmoid(1e8)));
}

TEST_CASE("sigmoid is monotone and symmetric") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    for (int t = 0; t < 200; ++t) {
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        CHECK(sigmoid(a) <= sigmoid(b));
        CHECK(sigmoid(a) + sigmoid(-a) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("softmax2 basic values") {
    auto [p1, p2] = softmax2(0.0, 0.0);
    CHECK(p1 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p2 == doctest::Approx(0.5).epsilon(1e-15));

    auto [q1, q2] = softmax2(std::log(3.0), 0.0);
    CHECK(q1 == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(q2 == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("softmax2 shift invariance and normalization") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int t = 0; t < 200; ++t) {
        double z1 = u(rng), z2 = u(rng), c = u(rng);
        auto [a1, a2] = softmax2(z1, z2);
        auto [b1, b2] = softmax2(z1 + c, z2 + c);
        CHECK(a1 + a2 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(a1 == doctest::Approx(b1).epsilon(1e-9));
        CHECK(a2 == doctest::Approx(b2).epsilon(1e-9));
    }
    // identical shifted constants stay at (0.5, 0.5)
    for (double c : {-700.0, -1.0, 0.0, 3.5, 700.0}) {
        auto [p1, p2] = softmax2(c, c);
        CHECK(p1 == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(p2 == doctest::Approx(0.5).epsilon(1e-15));
    }
}

TEST_CASE("bce values and clamping") {
    CHECK(bce(0.5, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(bce(0.5, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(bce(1.0 - kProbEps, 1.0) < 1e-6);
    // clamp keeps extreme inputs finite
    CHECK(std::isfinite(bce(0.0, 1.0)));
    CHECK(std::isfinite(bce(1.0, 0.0)));
    CHECK(bce(0.0, 1.0) == doctest::Approx(-std::log(kProbEps)).epsilon(1e-9));
}

TEST_CASE("bce is convex in the prediction") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int t = 0; t < 200; ++t) {
        double a = u(rng), b = u(rng);
        double y = (t % 2 == 0) ? 0.0 : 1.0;
        CHECK(bce(0.5 * (a + b), y) <= 0.5 * (bce(a, y) + bce(b, y)) + 1e-12);
    }
}

TEST_CASE("bce_grad matches finite differences inside the clamp interval") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int t = 0; t < 100; ++t) {
        double p = u(rng);
        double y = (t % 2 == 0) ? 0.0 : 1.0;
        const double h = 1e-6;
        double num = (bce(p + h, y) - bce(p - h, y)) / (2.0 * h);
        CHECK(bce_grad(p, y) == doctest::Approx(num).epsilon(1e-6));
    }
    CHECK(bce_grad(kProbEps / 2.0, 1.0) == 0.0);
    CHECK(bce_grad(1.0 - kProbEps / 2.0, 0.0) == 0.0);
}

TEST_CASE("binary entropy values") {
    CHECK(binary_entropy(0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(binary_entropy(0.75) == doctest::Approx(0.562335).epsilon(1e-5));
    CHECK(binary_entropy(0.0) < 2e-6);
    CHECK(binary_entropy(1.0) < 2e-6);
}

TEST_CASE("binary entropy grad matches finite differences") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int t = 0; t < 100; ++t) {
        double p = u(rng);
        const double h = 1e-6;
        double num = (binary_entropy(p + h) - binary_entropy(p - h)) / (2.0 * h);
        CHECK(binary_entropy_grad(p) == doctest::Approx(num).epsilon(1e-6));
    }
}

TEST_CASE("affine_forward identity and scalar cases") {
    // W = identity, b = 0
    Matrix w(3, 3);
    for (std::size_t i = 0; i < 3; ++i) w(i, i) = 1.0;
    Matrix x(2, 3, {1.0, 2.0, 3.0, -4.0, 0.5, 6.0});
    Matrix y = affine_forward(w, {0.0, 0.0, 0.0}, x);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(y.data()[i] == x.data()[i]);

    // W = [[2]], b = [1], X = [[3]] -> [[7]]
    Matrix w1(1, 1, {2.0});
    Matrix x1(1, 1, {3.0});
    Matrix y1 = affine_forward(w1, {1.0}, x1);
    CHECK(y1(0, 0) == 7.0);
}

TEST_CASE("affine_forward matches the triple-loop oracle") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    Matrix w(4, 3);
    Matrix x(2, 4);
    std::vector<double> b(3);
    for (auto& v : w.data()) v = u(rng);
    for (auto& v : x.data()) v = u(rng);
    for (auto& v : b) v = u(rng);

    Matrix y = affine_forward(w, b, x);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            double s = b[j];
            for (std::size_t k = 0; k < 4; ++k) s += x(i, k) * w(k, j);
            CHECK(y(i, j) == doctest::Approx(s).epsilon(1e-12));
        }
}

TEST_CASE("affine_forward rejects mismatched shapes naming both") {
    Matrix w(4, 3);
    Matrix x(2, 5);
    try {
        affine_forward(w, {0.0, 0.0, 0.0}, x);
        FAIL("expected shape error");
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        CHECK(msg.find("(2,5)") != std::string::npos);
        CHECK(msg.find("(4,3)") != std::string::npos);
    }
}

TEST_CASE("adamw no-op when grad and decay are zero") {
    Parameter p(Matrix(2, 2, {1.0, -2.0, 3.0, 0.5}));
    std::vector<Parameter*> params{&p};
    OptimizerConfig cfg;
    cfg.weight_decay = 0.0;
    adamw_step(params, cfg, 0.01, 1);
    CHECK(p.value(0, 0) == 1.0);
    CHECK(p.value(0, 1) == -2.0);
    CHECK(p.value(1, 0) == 3.0);
    CHECK(p.value(1, 1) == 0.5);
}

TEST_CASE("adamw decay-only step scales values by (1 - lr*wd)") {
    Parameter p(Matrix(1, 3, {1.0, -2.0, 4.0}));
    std::vector<Parameter*> params{&p};
    OptimizerConfig cfg;
    cfg.weight_decay = 0.1;
    const double lr = 0.5;
    adamw_step(params, cfg, lr, 1);
    CHECK(p.value(0, 0) == doctest::Approx(1.0 * (1.0 - lr * 0.1)).epsilon(1e-15));
    CHECK(p.value(0, 1) == doctest::Approx(-2.0 * (1.0 - lr * 0.1)).epsilon(1e-15));
    CHECK(p.value(0, 2) == doctest::Approx(4.0 * (1.0 - lr * 0.1)).epsilon(1e-15));
}

TEST_CASE("adamw first step matches a hand-stepped oracle") {
    const double g = 0.3, v0 = 2.0, lr = 0.01, wd = 0.05;
    Parameter p(Matrix(1, 1, {v0}));
    p.grad(0, 0) = g;
    std::vector<Parameter*> params{&p};
    OptimizerConfig cfg;
    cfg.beta1 = 0.9;
    cfg.beta2 = 0.999;
    cfg.eps = 1e-8;
    cfg.weight_decay = wd;
    adamw_step(params, cfg, lr, 1);

    // decoupled decay first, then bias-corrected Adam
    double v = v0 - lr * wd * v0;
    double m1 = (1.0 - cfg.beta1) * g;
    double m2 = (1.0 - cfg.beta2) * g * g;
    double m1h = m1 / (1.0 - cfg.beta1);
    double m2h = m2 / (1.0 - cfg.beta2);
    v -= lr * m1h / (std::sqrt(m2h) + cfg.eps);
    CHECK(p.value(0, 0) == doctest::Approx(v).epsilon(1e-10));
    // adaptive update approximates -lr * g / (|g| + eps) at step 1
    CHECK(v0 * (1.0 - lr * wd) - p.value(0, 0) ==
          doctest::Approx(lr * g / (std::fabs(g) + cfg.eps)).epsilon(1e-6));
    // grads are consumed
    CHECK(p.grad(0, 0) == 0.0);
}

TEST_CASE("adamw two hand-stepped iterations with constant grad") {
    const double g = -0.7, lr = 0.02;
    Parameter p(Matrix(1, 1, {1.0}));
    std::vector<Parameter*> params{&p};
    OptimizerConfig cfg;
    cfg.weight_decay = 0.0;

    double v = 1.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t step = 1; step <= 2; ++step) {
        p.grad(0, 0) = g;
        adamw_step(params, cfg, lr, step);
        m1 = cfg.beta1 * m1 + (1.0 - cfg.beta1) * g;
        m2 = cfg.beta2 * m2 + (1.0 - cfg.beta2) * g * g;
        double m1h = m1 / (1.0 - std::pow(cfg.beta1, static_cast<double>(step)));
        double m2h = m2 / (1.0 - std::pow(cfg.beta2, static_cast<double>(step)));
        v -= lr * m1h / (std::sqrt(m2h) + cfg.eps);
        CHECK(p.value(0, 0) == doctest::Approx(v).epsilon(1e-12));
    }
}

TEST_CASE("cosine warmup schedule endpoints and midpoint") {
    OptimizerConfig cfg;
    cfg.lr_base = 0.4;
    cfg.warmup_epochs = 5;
    cfg.total_epochs = 40;
    const double wfrac = 5.0 / 40.0;

    CHECK(cosine_warmup_lr(0.0, cfg) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(cosine_warmup_lr(wfrac, cfg) == doctest::Approx(cfg.lr_base).epsilon(1e-12));
    CHECK(cosine_warmup_lr(1.0, cfg) == doctest::Approx(0.0).epsilon(1e-12));
    // post-warmup midpoint: cos(pi/2) = 0 -> lr_base / 2
    double mid = wfrac + 0.5 * (1.0 - wfrac);
    CHECK(cosine_warmup_lr(mid, cfg) == doctest::Approx(cfg.lr_base / 2.0).epsilon(1e-12));
    // linear ramp inside warmup
    CHECK(cosine_warmup_lr(wfrac / 2.0, cfg) ==
          doctest::Approx(cfg.lr_base / 2.0).epsilon(1e-12));
}

TEST_CASE("cosine warmup is nonnegative and bounded by lr_base") {
    OptimizerConfig cfg;
    cfg.lr_base = 1.0;
    for (int i = 0; i <= 1000; ++i) {
        double s = i / 1000.0;
        double lr = cosine_warmup_lr(s, cfg);
        CHECK(lr >= 0.0);
        CHECK(lr <= cfg.lr_base + 1e-15);
    }
}

TEST_CASE("grad_check validates affine + sigmoid + bce") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Parameter w(Matrix(3, 1));
    Parameter b(Matrix(1, 1));
    for (auto& v : w.value.data()) v = u(rng);
    b.value(0, 0) = u(rng);
    Matrix x(4, 3);
    for (auto& v : x.data()) v = u(rng);
    std::vector<double> y{1.0, 0.0, 1.0, 0.0};

    std::vector<Parameter*> params{&w, &b};
    auto loss_fn = [&](bool compute_grads) {
        Matrix logits = affine_forward(w.value, {b.value(0, 0)}, x);
        double loss = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            double p = sigmoid(logits(i, 0));
            loss += bce(p, y[i]) / 4.0;
            if (compute_grads) {
                double dlogit = bce_grad(p, y[i]) * p * (1.0 - p) / 4.0;
                for (std::size_t k = 0; k < 3; ++k) w.grad(k, 0) += dlogit * x(i, k);
                b.grad(0, 0) += dlogit;
            }
        }
        return loss;
    };
    CHECK(grad_check(loss_fn, params, 1e-6) < 1e-4);
}

TEST_CASE("grad_check passes the degenerate zero-network case") {
    Parameter w(Matrix(2, 1));
    Parameter b(Matrix(1, 1));
    Matrix x(1, 2);  // zero input
    std::vector<Parameter*> params{&w, &b};
    auto loss_fn = [&](bool compute_grads) {
        double p = sigmoid(b.value(0, 0));
        if (compute_grads) b.grad(0, 0) += bce_grad(p, 1.0) * p * (1.0 - p);
        return bce(p, 1.0);
    };
    CHECK(grad_check(loss_fn, params, 1e-6) < 1e-4);
}

TEST_CASE("grad_check flags a deliberately wrong gradient") {
    Parameter w(Matrix(1, 1, {0.3}));
    std::vector<Parameter*> params{&w};
    auto loss_fn = [&](bool compute_grads) {
        if (compute_grads) w.grad(0, 0) += 1.0;  // true gradient is 2w = 0.6
        return w.value(0, 0) * w.value(0, 0);
    };
    CHECK(grad_check(loss_fn, params, 1e-6) > 0.1);
}
