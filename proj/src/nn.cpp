#include "risfl/nn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace risfl::nn {

namespace {

constexpr char kMagic[8] = {'R', 'F', 'L', 'M', 'L', 'P', '0', '1'};
constexpr std::uint32_t kVersion = 1;

void apply_relu(Matrix& m) {
    for (double& x : m.data) x = x > 0.0 ? x : 0.0;
}

void apply_tanh(Matrix& m) {
    for (double& x : m.data) x = std::tanh(x);
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("checkpoint stream truncated");
    return v;
}

}  // namespace

Mlp::Mlp(std::vector<std::size_t> sizes, OutputActivation out_act, Rng& rng)
    : sizes_(std::move(sizes)), out_act_(out_act) {
    if (sizes_.size() < 2) throw std::invalid_argument("Mlp needs at least two layer sizes");
    for (std::size_t s : sizes_) {
        if (s == 0) throw std::invalid_argument("layer size must be positive");
    }
    const std::size_t layers = sizes_.size() - 1;
    weights_.resize(layers);
    biases_.resize(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t fan_in = sizes_[l];
        const std::size_t fan_out = sizes_[l + 1];
        const double limit = 1.0 / std::sqrt(static_cast<double>(fan_in));
        weights_[l].value = Matrix(fan_in, fan_out);
        weights_[l].grad = Matrix(fan_in, fan_out);
        biases_[l].value = Matrix(1, fan_out);
        biases_[l].grad = Matrix(1, fan_out);
        for (double& w : weights_[l].value.data) w = rng.uniform(-limit, limit);
        for (double& b : biases_[l].value.data) b = rng.uniform(-limit, limit);
    }
}

Matrix Mlp::forward(const Matrix& input, Tape* tape) const {
    if (input.cols != sizes_.front()) {
        throw std::invalid_argument("forward: input width does not match first layer");
    }
    if (tape) {
        tape->layer_inputs.clear();
        tape->pre_activations.clear();
        tape->post_activations.clear();
    }
    Matrix x = input;
    const std::size_t layers = weights_.size();
    for (std::size_t l = 0; l < layers; ++l) {
        if (tape) tape->layer_inputs.push_back(x);
        Matrix z;
        matmul(x, weights_[l].value, z);
        add_row_vector(z, biases_[l].value.data);
        if (tape) tape->pre_activations.push_back(z);
        if (l + 1 < layers) {
            apply_relu(z);
        } else if (out_act_ == OutputActivation::tanh_bounded) {
            apply_tanh(z);
        }
        if (tape) tape->post_activations.push_back(z);
        x = std::move(z);
    }
    return x;
}

std::vector<double> Mlp::forward_one(const std::vector<double>& input) const {
    Matrix m(1, input.size());
    m.data = input;
    Matrix out = forward(m);
    return out.data;
}

Matrix Mlp::backward(const Tape& tape, const Matrix& output_grad) {
    const std::size_t layers = weights_.size();
    if (tape.layer_inputs.size() != layers) {
        throw std::invalid_argument("backward: tape does not match network");
    }
    Matrix dz = output_grad;
    // output head derivative
    if (out_act_ == OutputActivation::tanh_bounded) {
        const Matrix& y = tape.post_activations.back();
        for (std::size_t i = 0; i < dz.data.size(); ++i) {
            dz.data[i] *= 1.0 - y.data[i] * y.data[i];
        }
    }
    Matrix dx;
    for (std::size_t l = layers; l-- > 0;) {
        matmul_tn(tape.layer_inputs[l], dz, weights_[l].grad, /*accumulate=*/true);
        const auto bias_grad = column_sums(dz);
        for (std::size_t j = 0; j < bias_grad.size(); ++j) biases_[l].grad.data[j] += bias_grad[j];
        matmul_nt(dz, weights_[l].value, dx);
        if (l > 0) {
            const Matrix& z_prev = tape.pre_activations[l - 1];
            for (std::size_t i = 0; i < dx.data.size(); ++i) {
                if (z_prev.data[i] <= 0.0) dx.data[i] = 0.0;
            }
            dz = dx;
        }
    }
    return dx;
}

void Mlp::zero_grads() {
    for (auto& w : weights_) w.zero_grad();
    for (auto& b : biases_) b.zero_grad();
}

std::vector<ParamTensor*> Mlp::parameters() {
    std::vector<ParamTensor*> out;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        out.push_back(&weights_[l]);
        out.push_back(&biases_[l]);
    }
    return out;
}

std::vector<const ParamTensor*> Mlp::parameters() const {
    std::vector<const ParamTensor*> out;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        out.push_back(&weights_[l]);
        out.push_back(&biases_[l]);
    }
    return out;
}

bool Mlp::same_shape(const Mlp& other) const {
    return sizes_ == other.sizes_ && out_act_ == other.out_act_;
}

void Mlp::save(std::ostream& out) const {
    out.write(kMagic, sizeof(kMagic));
    write_pod(out, kVersion);
    write_pod(out, static_cast<std::uint8_t>(out_act_));
    write_pod(out, static_cast<std::uint32_t>(sizes_.size()));
    for (std::size_t s : sizes_) write_pod(out, static_cast<std::uint64_t>(s));
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        const auto& w = weights_[l].value;
        out.write(reinterpret_cast<const char*>(w.data.data()),
                  static_cast<std::streamsize>(w.data.size() * sizeof(double)));
        const auto& b = biases_[l].value;
        out.write(reinterpret_cast<const char*>(b.data.data()),
                  static_cast<std::streamsize>(b.data.size() * sizeof(double)));
    }
    if (!out) throw std::runtime_error("checkpoint write failed");
}

Mlp Mlp::load(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("not a network checkpoint (bad magic)");
    }
    const auto version = read_pod<std::uint32_t>(in);
    if (version != kVersion) throw std::runtime_error("unsupported checkpoint version");
    const auto act = static_cast<OutputActivation>(read_pod<std::uint8_t>(in));
    const auto n_sizes = read_pod<std::uint32_t>(in);
    if (n_sizes < 2 || n_sizes > 64) throw std::runtime_error("corrupt checkpoint sizes");

    Mlp net;
    net.out_act_ = act;
    net.sizes_.resize(n_sizes);
    for (auto& s : net.sizes_) s = static_cast<std::size_t>(read_pod<std::uint64_t>(in));
    const std::size_t layers = n_sizes - 1;
    net.weights_.resize(layers);
    net.biases_.resize(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t fan_in = net.sizes_[l];
        const std::size_t fan_out = net.sizes_[l + 1];
        net.weights_[l].value = Matrix(fan_in, fan_out);
        net.weights_[l].grad = Matrix(fan_in, fan_out);
        net.biases_[l].value = Matrix(1, fan_out);
        net.biases_[l].grad = Matrix(1, fan_out);
        in.read(reinterpret_cast<char*>(net.weights_[l].value.data.data()),
                static_cast<std::streamsize>(fan_in * fan_out * sizeof(double)));
        in.read(reinterpret_cast<char*>(net.biases_[l].value.data.data()),
                static_cast<std::streamsize>(fan_out * sizeof(double)));
        if (!in) throw std::runtime_error("checkpoint stream truncated");
    }
    return net;
}

void Mlp::save_file(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    save(f);
}

Mlp Mlp::load_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open checkpoint: " + path);
    return load(f);
}

void sgd_step(Mlp& net, double lr, bool ascend) {
    const double sign = ascend ? 1.0 : -1.0;
    for (ParamTensor* p : net.parameters()) {
        for (std::size_t i = 0; i < p->value.data.size(); ++i) {
            p->value.data[i] += sign * lr * p->grad.data[i];
        }
    }
}

Adam::Adam(Mlp& net, AdamConfig cfg) : net_(&net), cfg_(cfg) {
    for (ParamTensor* p : net_->parameters()) {
        m_.emplace_back(p->value.rows, p->value.cols);
        v_.emplace_back(p->value.rows, p->value.cols);
    }
}

void Adam::step(bool ascend) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    const double sign = ascend ? 1.0 : -1.0;
    auto params = net_->parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& value = params[i]->value.data;
        auto& grad = params[i]->grad.data;
        auto& m = m_[i].data;
        auto& v = v_[i].data;
        for (std::size_t j = 0; j < value.size(); ++j) {
            m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * grad[j];
            v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * grad[j] * grad[j];
            const double m_hat = m[j] / bc1;
            const double v_hat = v[j] / bc2;
            value[j] += sign * cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.eps);
        }
    }
}

void Adam::reset() {
    for (auto& m : m_) m.fill(0.0);
    for (auto& v : v_) v.fill(0.0);
    t_ = 0;
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
    if (!target.same_shape(online)) {
        throw std::invalid_argument("soft_update: shape mismatch");
    }
    auto tp = target.parameters();
    auto op = online.parameters();
    for (std::size_t i = 0; i < tp.size(); ++i) {
        for (std::size_t j = 0; j < tp[i]->value.data.size(); ++j) {
            tp[i]->value.data[j] =
                tau * op[i]->value.data[j] + (1.0 - tau) * tp[i]->value.data[j];
        }
    }
}

}  // namespace risfl::nn
