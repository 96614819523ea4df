// model.cpp

#include "umil/model.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

using nlohmann::json;

namespace umil {

Matrix Linear::forward(const Matrix& x) const {
    return affine_forward(w.value, b.value.data(), x);
}

Matrix Linear::backward(const Matrix& x, const Matrix& dy) {
    // dW += X^T dY, db += column sums of dY, dX = dY W^T
    Matrix dw = matmul_tn(x, dy);
    for (std::size_t i = 0; i < dw.size(); ++i) w.grad.data()[i] += dw.data()[i];
    for (std::size_t j = 0; j < dy.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < dy.rows(); ++i) s += dy(i, j);
        b.grad(0, j) += s;
    }
    return matmul_nt(dy, w.value);
}

Encoder::Encoder(const EncoderSpec& spec) : spec_(spec) {
    std::size_t in = spec.input_dim;
    for (std::size_t h : spec.hidden_dims) {
        layers_.emplace_back(in, h);
        in = h;
    }
    layers_.emplace_back(in, spec.output_dim);
}

Matrix Encoder::forward(const Matrix& x, EncoderCache& cache) const {
    cache.input = x;
    cache.activations.clear();
    Matrix cur = x;
    for (const Linear& layer : layers_) {
        cur = layer.forward(cur);
        for (double& v : cur.data()) v = std::tanh(v);
        cache.activations.push_back(cur);
    }
    return cur;
}

Matrix Encoder::forward(const Matrix& x) const {
    EncoderCache cache;
    return forward(x, cache);
}

void Encoder::backward(const EncoderCache& cache, const Matrix& dz) {
    Matrix d = dz;
    for (std::size_t li = layers_.size(); li-- > 0;) {
        const Matrix& act = cache.activations[li];
        // through tanh: d_pre = d * (1 - act^2)
        for (std::size_t i = 0; i < d.size(); ++i)
            d.data()[i] *= 1.0 - act.data()[i] * act.data()[i];
        const Matrix& input = li == 0 ? cache.input : cache.activations[li - 1];
        d = layers_[li].backward(input, d);
    }
}

namespace {

void init_linear(Linear& layer, std::mt19937_64& rng) {
    const double s = 1.0 / std::sqrt(static_cast<double>(layer.w.value.rows()));
    std::uniform_real_distribution<double> dist(-s, s);
    for (double& v : layer.w.value.data()) v = dist(rng);
    // biases stay zero
}

}  // namespace

ModelState::ModelState(const EncoderSpec& spec, std::uint64_t seed)
    : spec_(spec),
      encoder_(spec),
      head_f_(spec.output_dim, 1),
      head_g_(spec.output_dim, 2) {
    std::seed_seq seq{static_cast<std::uint64_t>(0x5eedu), seed};
    std::mt19937_64 rng(seq);
    for (Linear& l : encoder_.layers()) init_linear(l, rng);
    init_linear(head_f_, rng);
    init_linear(head_g_, rng);
}

std::vector<double> ModelState::forward_f(const Matrix& z) const {
    Matrix logits = head_f_.forward(z);
    std::vector<double> p(z.rows());
    for (std::size_t i = 0; i < z.rows(); ++i) p[i] = sigmoid(logits(i, 0));
    return p;
}

Matrix ModelState::backward_f(const Matrix& z, const std::vector<double>& p,
                              const std::vector<double>& dp) {
    Matrix dlogit(z.rows(), 1);
    for (std::size_t i = 0; i < z.rows(); ++i)
        dlogit(i, 0) = dp[i] * p[i] * (1.0 - p[i]);
    return head_f_.backward(z, dlogit);
}

Matrix ModelState::forward_g(const Matrix& z) const {
    Matrix logits = head_g_.forward(z);
    Matrix q(z.rows(), 2);
    for (std::size_t i = 0; i < z.rows(); ++i) {
        auto [q1, q2] = softmax2(logits(i, 0), logits(i, 1));
        q(i, 0) = q1;
        q(i, 1) = q2;
    }
    return q;
}

Matrix ModelState::backward_g(const Matrix& z, const Matrix& q, const Matrix& dq) {
    // softmax jacobian: d_logit_k = q_k * (dq_k - sum_j dq_j q_j)
    Matrix dlogit(q.rows(), 2);
    for (std::size_t i = 0; i < q.rows(); ++i) {
        const double dot = dq(i, 0) * q(i, 0) + dq(i, 1) * q(i, 1);
        dlogit(i, 0) = q(i, 0) * (dq(i, 0) - dot);
        dlogit(i, 1) = q(i, 1) * (dq(i, 1) - dot);
    }
    return head_g_.backward(z, dlogit);
}

std::vector<double> ModelState::encode(const std::vector<double>& x) const {
    Matrix in(1, x.size(), x);
    Matrix z = encoder_.forward(in);
    return z.data();
}

double ModelState::predict_f(const std::vector<double>& x) const {
    Matrix in(1, x.size(), x);
    Matrix z = encoder_.forward(in);
    return forward_f(z)[0];
}

std::vector<Parameter*> ModelState::trainable_params() {
    std::vector<Parameter*> out;
    if (!spec_.frozen)
        for (Linear& l : encoder_.layers()) {
            out.push_back(&l.w);
            out.push_back(&l.b);
        }
    out.push_back(&head_f_.w);
    out.push_back(&head_f_.b);
    out.push_back(&head_g_.w);
    out.push_back(&head_g_.b);
    return out;
}

std::vector<Parameter*> ModelState::all_params() {
    std::vector<Parameter*> out;
    for (Linear& l : encoder_.layers()) {
        out.push_back(&l.w);
        out.push_back(&l.b);
    }
    out.push_back(&head_f_.w);
    out.push_back(&head_f_.b);
    out.push_back(&head_g_.w);
    out.push_back(&head_g_.b);
    return out;
}

namespace {

json matrix_to_json(const Matrix& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

Matrix matrix_from_json(const json& j) {
    return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                  j.at("data").get<std::vector<double>>());
}

json param_to_json(const Parameter& p) {
    return json{{"value", matrix_to_json(p.value)},
                {"m1", matrix_to_json(p.m1)},
                {"m2", matrix_to_json(p.m2)}};
}

void param_from_json(const json& j, Parameter& p) {
    p.value = matrix_from_json(j.at("value"));
    p.m1 = matrix_from_json(j.at("m1"));
    p.m2 = matrix_from_json(j.at("m2"));
    p.grad = Matrix(p.value.rows(), p.value.cols());
}

}  // namespace

void ModelState::save_checkpoint(const std::string& path) const {
    json j;
    j["spec"] = {{"input_dim", spec_.input_dim},
                 {"hidden_dims", spec_.hidden_dims},
                 {"output_dim", spec_.output_dim},
                 {"frozen", spec_.frozen}};
    j["optimizer_step"] = optimizer_step;
    json enc = json::array();
    for (const Linear& l : encoder_.layers())
        enc.push_back({{"w", param_to_json(l.w)}, {"b", param_to_json(l.b)}});
    j["encoder"] = enc;
    j["head_f"] = {{"w", param_to_json(head_f_.w)}, {"b", param_to_json(head_f_.b)}};
    j["head_g"] = {{"w", param_to_json(head_g_.w)}, {"b", param_to_json(head_g_.b)}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << j.dump(2) << "\n";
}

ModelState ModelState::load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
    json j;
    in >> j;
    EncoderSpec spec;
    spec.input_dim = j.at("spec").at("input_dim").get<std::size_t>();
    spec.hidden_dims = j.at("spec").at("hidden_dims").get<std::vector<std::size_t>>();
    spec.output_dim = j.at("spec").at("output_dim").get<std::size_t>();
    spec.frozen = j.at("spec").at("frozen").get<bool>();
    ModelState m(spec, 0);
    m.optimizer_step = j.at("optimizer_step").get<std::size_t>();
    const json& enc = j.at("encoder");
    for (std::size_t i = 0; i < m.encoder_.layers().size(); ++i) {
        param_from_json(enc.at(i).at("w"), m.encoder_.layers()[i].w);
        param_from_json(enc.at(i).at("b"), m.encoder_.layers()[i].b);
    }
    param_from_json(j.at("head_f").at("w"), m.head_f_.w);
    param_from_json(j.at("head_f").at("b"), m.head_f_.b);
    param_from_json(j.at("head_g").at("w"), m.head_g_.w);
    param_from_json(j.at("head_g").at("b"), m.head_g_.b);
    return m;
}

}  // namespace umil
