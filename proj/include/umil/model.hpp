// model.hpp
//
// The learnable stack: a small tanh MLP encoder standing in for the video
// backbone, a sigmoid anomaly head f, and a two-way softmax cluster head g.
// Forward passes cache activations; backward passes accumulate gradients
// into the owning Parameters.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "umil/numerics.hpp"

namespace umil {

struct EncoderSpec {
    std::size_t input_dim = 16;
    std::vector<std::size_t> hidden_dims = {64};
    std::size_t output_dim = 32;
    bool frozen = false;
};

// One affine layer; W is (in x out), b is (1 x out).
struct Linear {
    Parameter w;
    Parameter b;

    Linear() = default;
    Linear(std::size_t in, std::size_t out) : w(Matrix(in, out)), b(Matrix(1, out)) {}

    Matrix forward(const Matrix& x) const;
    // dY -> dX; accumulates into w.grad, b.grad.
    Matrix backward(const Matrix& x, const Matrix& dy);
};

struct EncoderCache {
    Matrix input;
    std::vector<Matrix> activations;  // post-tanh output of each layer
};

// MLP with tanh after every layer (including the last).
class Encoder {
public:
    Encoder() = default;
    explicit Encoder(const EncoderSpec& spec);

    Matrix forward(const Matrix& x, EncoderCache& cache) const;
    Matrix forward(const Matrix& x) const;
    void backward(const EncoderCache& cache, const Matrix& dz);

    const EncoderSpec& spec() const { return spec_; }
    std::vector<Linear>& layers() { return layers_; }
    const std::vector<Linear>& layers() const { return layers_; }

private:
    EncoderSpec spec_;
    std::vector<Linear> layers_;
};

class ModelState {
public:
    ModelState() = default;
    ModelState(const EncoderSpec& spec, std::uint64_t seed);

    Encoder& encoder() { return encoder_; }
    const Encoder& encoder() const { return encoder_; }
    Linear& head_f() { return head_f_; }
    const Linear& head_f() const { return head_f_; }
    Linear& head_g() { return head_g_; }
    const Linear& head_g() const { return head_g_; }

    // Anomaly probability per row of z.
    std::vector<double> forward_f(const Matrix& z) const;
    // dL/dp -> dZ, accumulating head gradients.
    Matrix backward_f(const Matrix& z, const std::vector<double>& p,
                      const std::vector<double>& dp);

    // Cluster probabilities, one (q1, q2) row per input row.
    Matrix forward_g(const Matrix& z) const;
    Matrix backward_g(const Matrix& z, const Matrix& q, const Matrix& dq);

    // Single-vector conveniences.
    std::vector<double> encode(const std::vector<double>& x) const;
    double predict_f(const std::vector<double>& x) const;

    // Trainable parameters in a fixed order; excludes the encoder when frozen.
    std::vector<Parameter*> trainable_params();
    // Every parameter, frozen or not.
    std::vector<Parameter*> all_params();

    std::size_t optimizer_step = 0;

    void save_checkpoint(const std::string& path) const;
    static ModelState load_checkpoint(const std::string& path);

private:
    EncoderSpec spec_;
    Encoder encoder_;
    Linear head_f_;
    Linear head_g_;
};

}  // namespace umil
