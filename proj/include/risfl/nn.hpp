#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "risfl/linalg.hpp"
#include "risfl/rng.hpp"

namespace risfl::nn {

struct ParamTensor {
    Matrix value;
    Matrix grad;

    void zero_grad() { grad.fill(0.0); }
};

enum class OutputActivation : std::uint8_t { linear = 0, tanh_bounded = 1 };

// Intermediate values recorded by a forward pass so the corresponding
// backward pass can run: layer inputs, pre-activations, post-activations.
struct Tape {
    std::vector<Matrix> layer_inputs;
    std::vector<Matrix> pre_activations;
    std::vector<Matrix> post_activations;
};

// Fully-connected net, ReLU hidden layers, linear or tanh output head.
// 64-bit floats throughout. Weight layout is row-major (fan_in x fan_out).
class Mlp {
  public:
    Mlp() = default;
    Mlp(std::vector<std::size_t> sizes, OutputActivation out_act, Rng& rng);

    // Batch of inputs as rows. Pass a tape to enable backward().
    Matrix forward(const Matrix& input, Tape* tape = nullptr) const;
    std::vector<double> forward_one(const std::vector<double>& input) const;

    // Reverse pass for the given output gradient; accumulates parameter
    // gradients and returns the gradient w.r.t. the input batch.
    Matrix backward(const Tape& tape, const Matrix& output_grad);

    void zero_grads();
    std::vector<ParamTensor*> parameters();
    std::vector<const ParamTensor*> parameters() const;

    const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
    OutputActivation output_activation() const { return out_act_; }
    std::size_t input_dim() const { return sizes_.front(); }
    std::size_t output_dim() const { return sizes_.back(); }
    bool same_shape(const Mlp& other) const;

    void save(std::ostream& out) const;
    static Mlp load(std::istream& in);
    void save_file(const std::string& path) const;
    static Mlp load_file(const std::string& path);

  private:
    std::vector<std::size_t> sizes_;
    OutputActivation out_act_ = OutputActivation::linear;
    std::vector<ParamTensor> weights_;
    std::vector<ParamTensor> biases_;
};

// theta <- theta - lr * grad, or + for ascent
void sgd_step(Mlp& net, double lr, bool ascend = false);

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

class Adam {
  public:
    Adam(Mlp& net, AdamConfig cfg);

    // applies one update from the accumulated gradients; ascend flips sign
    void step(bool ascend = false);
    void reset();

  private:
    Mlp* net_;
    AdamConfig cfg_;
    std::vector<Matrix> m_;
    std::vector<Matrix> v_;
    long t_ = 0;
};

// target <- tau * online + (1 - tau) * target
void soft_update(Mlp& target, const Mlp& online, double tau);

}  // namespace risfl::nn
