#include "risfl/agents.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace risfl::agents {

namespace {

constexpr char kMagic[8] = {'R', 'F', 'L', 'A', 'G', 'T', '0', '1'};

double clip(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

std::vector<std::size_t> net_sizes(int in, const std::vector<std::size_t>& hidden, int out) {
    std::vector<std::size_t> sizes;
    sizes.push_back(static_cast<std::size_t>(in));
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(static_cast<std::size_t>(out));
    return sizes;
}

Matrix concat_cols(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows, a.cols + b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        std::memcpy(out.row(i), a.row(i), a.cols * sizeof(double));
        std::memcpy(out.row(i) + a.cols, b.row(i), b.cols * sizeof(double));
    }
    return out;
}

}  // namespace

void Td3Config::validate() const {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must be in (0,1]");
    if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must be in (0,1]");
    if (!(noise_clip >= 0.0)) throw std::invalid_argument("noise_clip must be >= 0");
    if (policy_delay < 1) throw std::invalid_argument("policy_delay must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (buffer_capacity < static_cast<std::size_t>(batch_size)) {
        throw std::invalid_argument("buffer capacity below batch size");
    }
    if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) {
        throw std::invalid_argument("learning rates must be positive");
    }
}

Td3Config ddpg_variant(Td3Config cfg) {
    cfg.twin_critics = false;
    cfg.target_smoothing = false;
    cfg.policy_delay = 1;
    return cfg;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("buffer capacity must be positive");
    storage_.reserve(capacity_);
}

void ReplayBuffer::push(StoredTransition t) {
    if (size_ < capacity_) {
        storage_.push_back(std::move(t));
        ++size_;
    } else {
        storage_[head_] = std::move(t);
    }
    head_ = (head_ + 1) % capacity_;
}

Batch ReplayBuffer::sample(int batch_size, Rng& rng) const {
    if (size_ < static_cast<std::size_t>(batch_size)) {
        throw std::logic_error("sampling from a buffer smaller than the batch");
    }
    const std::size_t state_dim = storage_[0].state.size();
    const std::size_t action_dim = storage_[0].action.size();
    Batch b;
    b.states = Matrix(batch_size, state_dim);
    b.actions = Matrix(batch_size, action_dim);
    b.next_states = Matrix(batch_size, state_dim);
    b.rewards.resize(batch_size);
    b.terminal.resize(batch_size);
    for (int i = 0; i < batch_size; ++i) {
        const auto& t = storage_[rng.uniform_int(size_)];
        std::memcpy(b.states.row(i), t.state.data(), state_dim * sizeof(double));
        std::memcpy(b.actions.row(i), t.action.data(), action_dim * sizeof(double));
        std::memcpy(b.next_states.row(i), t.next_state.data(), state_dim * sizeof(double));
        b.rewards[i] = t.reward;
        b.terminal[i] = t.terminal ? 1 : 0;
    }
    return b;
}

Td3Agent::Td3Agent(int state_dim, int action_dim, const Td3Config& cfg, std::uint64_t seed)
    : state_dim_(state_dim), action_dim_(action_dim), cfg_(cfg) {
    cfg_.validate();
    Rng init = Rng(seed).fork(0xA11);
    actor_ = nn::Mlp(net_sizes(state_dim, cfg_.actor_hidden, action_dim),
                     nn::OutputActivation::tanh_bounded, init);
    critic1_ = nn::Mlp(net_sizes(state_dim + action_dim, cfg_.critic_hidden, 1),
                       nn::OutputActivation::linear, init);
    critic2_ = nn::Mlp(net_sizes(state_dim + action_dim, cfg_.critic_hidden, 1),
                       nn::OutputActivation::linear, init);
    // targets start as exact copies
    target_actor_ = actor_;
    target_critic1_ = critic1_;
    target_critic2_ = critic2_;

    actor_opt_ = std::make_unique<nn::Adam>(actor_, nn::AdamConfig{cfg_.actor_lr});
    critic1_opt_ = std::make_unique<nn::Adam>(critic1_, nn::AdamConfig{cfg_.critic_lr});
    critic2_opt_ = std::make_unique<nn::Adam>(critic2_, nn::AdamConfig{cfg_.critic_lr});
}

std::vector<double> Td3Agent::act(const std::vector<double>& state, double noise_std,
                                  Rng& rng) const {
    auto a = actor_.forward_one(state);
    if (noise_std > 0.0) {
        for (double& x : a) x = clip(x + rng.normal(0.0, noise_std), -1.0, 1.0);
    }
    return a;
}

std::vector<double> Td3Agent::act_greedy(const std::vector<double>& state) const {
    return actor_.forward_one(state);
}

Matrix Td3Agent::target_actions(const Matrix& next_states, Rng& rng) const {
    Matrix a = target_actor_.forward(next_states);
    if (cfg_.target_smoothing && cfg_.noise_clip > 0.0) {
        for (double& x : a.data) {
            const double noise =
                clip(rng.normal(0.0, cfg_.target_noise), -cfg_.noise_clip, cfg_.noise_clip);
            x = clip(x + noise, -1.0, 1.0);
        }
    }
    return a;
}

std::vector<double> Td3Agent::critic_targets(const Batch& batch, Rng& rng) const {
    const Matrix next_a = target_actions(batch.next_states, rng);
    const Matrix critic_in = concat_cols(batch.next_states, next_a);
    const Matrix q1 = target_critic1_.forward(critic_in);
    Matrix q2;
    if (cfg_.twin_critics) q2 = target_critic2_.forward(critic_in);

    std::vector<double> y(batch.size());
    for (int i = 0; i < batch.size(); ++i) {
        double bootstrap = q1.data[i];
        if (cfg_.twin_critics) bootstrap = std::min(bootstrap, q2.data[i]);
        y[i] = batch.rewards[i];
        if (!batch.terminal[i]) y[i] += cfg_.gamma * bootstrap;
    }
    return y;
}

Td3Agent::CriticLosses Td3Agent::update_critics(const Batch& batch,
                                                const std::vector<double>& targets) {
    const Matrix critic_in = concat_cols(batch.states, batch.actions);
    const int n = batch.size();
    CriticLosses losses;

    auto update_one = [&](nn::Mlp& critic, nn::Adam& opt) {
        nn::Tape tape;
        const Matrix q = critic.forward(critic_in, &tape);
        Matrix dq(q.rows, q.cols);
        double loss = 0.0;
        for (int i = 0; i < n; ++i) {
            const double err = targets[i] - q.data[i];
            loss += err * err;
            dq.data[i] = 2.0 * (q.data[i] - targets[i]) / n;
        }
        critic.zero_grads();
        critic.backward(tape, dq);
        if (cfg_.use_adam) {
            opt.step();
        } else {
            nn::sgd_step(critic, cfg_.critic_lr);
        }
        return loss / n;
    };

    losses.q1 = update_one(critic1_, *critic1_opt_);
    if (cfg_.twin_critics) losses.q2 = update_one(critic2_, *critic2_opt_);
    return losses;
}

double Td3Agent::update_actor(const Batch& batch) {
    const int n = batch.size();
    nn::Tape actor_tape;
    const Matrix actions = actor_.forward(batch.states, &actor_tape);
    const Matrix critic_in = concat_cols(batch.states, actions);

    nn::Tape critic_tape;
    const Matrix q = critic1_.forward(critic_in, &critic_tape);
    double objective = 0.0;
    for (int i = 0; i < n; ++i) objective += q.data[i];
    objective /= n;

    // d(mean Q)/d(critic input), then keep only the action columns
    Matrix dq(q.rows, q.cols);
    for (auto& x : dq.data) x = 1.0 / n;
    critic1_.zero_grads();
    const Matrix dinput = critic1_.backward(critic_tape, dq);
    critic1_.zero_grads();  // critic parameters are not trained here

    Matrix daction(n, action_dim_);
    for (int i = 0; i < n; ++i) {
        std::memcpy(daction.row(i), dinput.row(i) + state_dim_,
                    static_cast<std::size_t>(action_dim_) * sizeof(double));
    }

    actor_.zero_grads();
    actor_.backward(actor_tape, daction);
    if (cfg_.use_adam) {
        actor_opt_->step(/*ascend=*/true);
    } else {
        nn::sgd_step(actor_, cfg_.actor_lr, /*ascend=*/true);
    }
    return objective;
}

void Td3Agent::soft_update_targets() {
    nn::soft_update(target_actor_, actor_, cfg_.tau);
    nn::soft_update(target_critic1_, critic1_, cfg_.tau);
    if (cfg_.twin_critics) nn::soft_update(target_critic2_, critic2_, cfg_.tau);
}

LearnInfo Td3Agent::learn(const ReplayBuffer& buffer, Rng& rng) {
    LearnInfo info;
    if (buffer.size() < static_cast<std::size_t>(cfg_.batch_size)) return info;

    const Batch batch = buffer.sample(cfg_.batch_size, rng);
    const auto targets = critic_targets(batch, rng);
    const auto losses = update_critics(batch, targets);
    info.learned = true;
    info.critic1_loss = losses.q1;
    info.critic2_loss = losses.q2;

    ++critic_updates_;
    if (critic_updates_ % cfg_.policy_delay == 0) {
        info.actor_objective = update_actor(batch);
        info.actor_updated = true;
        soft_update_targets();
    }
    return info;
}

void Td3Agent::save_file(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open agent checkpoint for writing: " + path);
    f.write(kMagic, sizeof(kMagic));
    const std::uint32_t version = 1;
    f.write(reinterpret_cast<const char*>(&version), sizeof(version));
    const std::uint8_t twin = cfg_.twin_critics ? 1 : 0;
    f.write(reinterpret_cast<const char*>(&twin), sizeof(twin));
    const std::int32_t sd = state_dim_;
    const std::int32_t ad = action_dim_;
    f.write(reinterpret_cast<const char*>(&sd), sizeof(sd));
    f.write(reinterpret_cast<const char*>(&ad), sizeof(ad));
    actor_.save(f);
    target_actor_.save(f);
    critic1_.save(f);
    target_critic1_.save(f);
    if (cfg_.twin_critics) {
        critic2_.save(f);
        target_critic2_.save(f);
    }
}

std::unique_ptr<Td3Agent> Td3Agent::load_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open agent checkpoint: " + path);
    char magic[8];
    f.read(magic, sizeof(magic));
    if (!f || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("not an agent checkpoint (bad magic)");
    }
    std::uint32_t version = 0;
    f.read(reinterpret_cast<char*>(&version), sizeof(version));
    if (version != 1) throw std::runtime_error("unsupported agent checkpoint version");
    std::uint8_t twin = 0;
    f.read(reinterpret_cast<char*>(&twin), sizeof(twin));
    std::int32_t sd = 0, ad = 0;
    f.read(reinterpret_cast<char*>(&sd), sizeof(sd));
    f.read(reinterpret_cast<char*>(&ad), sizeof(ad));
    if (!f) throw std::runtime_error("agent checkpoint truncated");

    Td3Config cfg;
    cfg.twin_critics = twin != 0;
    auto agent = std::make_unique<Td3Agent>(sd, ad, cfg, /*seed=*/0);
    agent->actor_ = nn::Mlp::load(f);
    agent->target_actor_ = nn::Mlp::load(f);
    agent->critic1_ = nn::Mlp::load(f);
    agent->target_critic1_ = nn::Mlp::load(f);
    if (cfg.twin_critics) {
        agent->critic2_ = nn::Mlp::load(f);
        agent->target_critic2_ = nn::Mlp::load(f);
    }
    // rebuild optimizer moment buffers against the loaded tensors
    agent->actor_opt_ = std::make_unique<nn::Adam>(agent->actor_, nn::AdamConfig{cfg.actor_lr});
    agent->critic1_opt_ =
        std::make_unique<nn::Adam>(agent->critic1_, nn::AdamConfig{cfg.critic_lr});
    agent->critic2_opt_ =
        std::make_unique<nn::Adam>(agent->critic2_, nn::AdamConfig{cfg.critic_lr});
    return agent;
}

TrainResult train(env::Environment& environment, const Td3Config& cfg, int episodes,
                  std::uint64_t seed) {
    cfg.validate();
    TrainResult result;
    result.agent = std::make_unique<Td3Agent>(environment.state_dim(), environment.action_dim(),
                                              cfg, seed);
    if (episodes <= 0) return result;

    ReplayBuffer buffer(cfg.buffer_capacity);
    Rng noise_rng = Rng(seed).fork(0xB0);
    Rng warmup_rng = Rng(seed).fork(0xC0);
    Rng sample_rng = Rng(seed).fork(0xD0);

    long total_steps = 0;
    for (int ep = 0; ep < episodes; ++ep) {
        auto state = environment.reset();
        double reward_sum = 0.0;
        double latency_sum = 0.0;
        const int steps = environment.episode_steps();
        for (int s = 0; s < steps; ++s) {
            std::vector<double> action;
            if (total_steps < cfg.warmup_steps) {
                action.resize(environment.action_dim());
                for (double& x : action) x = warmup_rng.uniform(-1.0, 1.0);
            } else {
                action = result.agent->act(state, cfg.explore_noise, noise_rng);
            }
            auto outcome = environment.step(action);
            reward_sum += outcome.transition.reward;
            latency_sum += outcome.latency_s;

            StoredTransition st;
            st.state = std::move(outcome.transition.state);
            st.action = std::move(outcome.transition.action);
            st.reward = outcome.transition.reward;
            st.next_state = outcome.transition.next_state;
            st.terminal = false;  // episodes end only by time limit
            buffer.push(std::move(st));

            state = std::move(outcome.transition.next_state);
            ++total_steps;
            if (total_steps >= cfg.warmup_steps) {
                result.agent->learn(buffer, sample_rng);
            }
        }
        result.episode_rewards.push_back(reward_sum / steps);
        result.episode_latencies.push_back(latency_sum / steps);
    }
    result.env_steps = total_steps;
    return result;
}

EvalSummary evaluate_policy(env::Environment& environment, const Td3Agent& agent, int episodes) {
    EvalSummary summary;
    double feasible = 0.0;
    for (int ep = 0; ep < episodes; ++ep) {
        auto state = environment.reset();
        for (int s = 0; s < environment.episode_steps(); ++s) {
            const auto action = agent.act_greedy(state);
            auto outcome = environment.step(action);
            summary.mean_reward += outcome.transition.reward;
            summary.mean_latency_s += outcome.latency_s;
            feasible += problem::all_satisfied(outcome.eval.slacks) ? 1.0 : 0.0;
            state = std::move(outcome.transition.next_state);
            ++summary.steps;
        }
    }
    if (summary.steps > 0) {
        summary.mean_reward /= summary.steps;
        summary.mean_latency_s /= summary.steps;
        summary.feasible_fraction = feasible / summary.steps;
    }
    return summary;
}

}  // namespace risfl::agents
