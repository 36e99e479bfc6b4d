#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "risfl/env.hpp"
#include "risfl/nn.hpp"
#include "risfl/rng.hpp"

namespace risfl::agents {

struct Td3Config {
    double actor_lr = 1e-4;
    double critic_lr = 5e-4;
    double gamma = 0.99;
    double tau = 0.001;
    int batch_size = 128;
    std::size_t buffer_capacity = 10000;
    double explore_noise = 0.1;   // sigma on executed actions
    double target_noise = 0.2;    // sigma of target policy smoothing
    double noise_clip = 0.5;      // clip bound of the smoothing noise
    int policy_delay = 2;
    int warmup_steps = 1000;      // uniform random actions before learning
    std::vector<std::size_t> actor_hidden{64, 64};
    std::vector<std::size_t> critic_hidden{512, 512};
    bool use_adam = true;
    bool twin_critics = true;      // off: single critic (the DDPG ablation)
    bool target_smoothing = true;  // off: raw target action (DDPG)

    void validate() const;
};

// Same loop with one critic, no smoothing, no delayed actor.
Td3Config ddpg_variant(Td3Config cfg);

struct StoredTransition {
    std::vector<double> state;
    std::vector<double> action;
    double reward = 0.0;
    std::vector<double> next_state;
    bool terminal = false;  // true only for genuine terminal states, not time limits
};

struct Batch {
    Matrix states;
    Matrix actions;
    std::vector<double> rewards;
    Matrix next_states;
    std::vector<std::uint8_t> terminal;

    int size() const { return static_cast<int>(rewards.size()); }
};

// Fixed-capacity ring; once full, new transitions overwrite the oldest.
class ReplayBuffer {
  public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(StoredTransition t);
    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    const StoredTransition& at(std::size_t i) const { return storage_[i]; }

    // uniform with replacement
    Batch sample(int batch_size, Rng& rng) const;

  private:
    std::size_t capacity_;
    std::size_t head_ = 0;
    std::size_t size_ = 0;
    std::vector<StoredTransition> storage_;
};

struct LearnInfo {
    bool learned = false;
    double critic1_loss = 0.0;
    double critic2_loss = 0.0;
    bool actor_updated = false;
    double actor_objective = 0.0;
};

// Twin-delayed deterministic actor-critic over a continuous action box.
// Six networks in the full variant: actor, two critics, and their targets,
// with targets initialized as exact copies.
class Td3Agent {
  public:
    Td3Agent(int state_dim, int action_dim, const Td3Config& cfg, std::uint64_t seed);

    int state_dim() const { return state_dim_; }
    int action_dim() const { return action_dim_; }
    const Td3Config& config() const { return cfg_; }

    // actor output plus exploration noise, clipped to the action box
    std::vector<double> act(const std::vector<double>& state, double noise_std, Rng& rng) const;
    std::vector<double> act_greedy(const std::vector<double>& state) const;

    // target actor plus clipped smoothing noise, result clipped to the box
    Matrix target_actions(const Matrix& next_states, Rng& rng) const;

    // y = r + gamma * min_j Q'_j(s', a~'), bootstrap omitted on terminal rows
    std::vector<double> critic_targets(const Batch& batch, Rng& rng) const;

    struct CriticLosses {
        double q1 = 0.0;
        double q2 = 0.0;
    };
    CriticLosses update_critics(const Batch& batch, const std::vector<double>& targets);

    // ascends mean Q1(s, actor(s)); returns the pre-update objective value
    double update_actor(const Batch& batch);

    void soft_update_targets();

    // one interaction-time learning step with the delay bookkeeping
    LearnInfo learn(const ReplayBuffer& buffer, Rng& rng);

    const nn::Mlp& actor() const { return actor_; }
    const nn::Mlp& target_actor() const { return target_actor_; }
    const nn::Mlp& critic(int j) const { return j == 0 ? critic1_ : critic2_; }
    const nn::Mlp& target_critic(int j) const { return j == 0 ? target_critic1_ : target_critic2_; }
    nn::Mlp& mutable_critic(int j) { return j == 0 ? critic1_ : critic2_; }
    nn::Mlp& mutable_target_critic(int j) { return j == 0 ? target_critic1_ : target_critic2_; }
    nn::Mlp& mutable_actor() { return actor_; }

    void save_file(const std::string& path) const;
    static std::unique_ptr<Td3Agent> load_file(const std::string& path);

  private:
    int state_dim_;
    int action_dim_;
    Td3Config cfg_;
    nn::Mlp actor_, target_actor_;
    nn::Mlp critic1_, target_critic1_;
    nn::Mlp critic2_, target_critic2_;
    std::unique_ptr<nn::Adam> actor_opt_;
    std::unique_ptr<nn::Adam> critic1_opt_;
    std::unique_ptr<nn::Adam> critic2_opt_;
    long critic_updates_ = 0;
};

struct TrainResult {
    std::vector<double> episode_rewards;    // mean step reward per episode
    std::vector<double> episode_latencies;  // mean capped round latency per episode
    long env_steps = 0;
    std::unique_ptr<Td3Agent> agent;
};

// Runs `episodes` episodes of interaction with per-step learning after the
// warmup, returning the learning curve and the trained agent.
TrainResult train(env::Environment& environment, const Td3Config& cfg, int episodes,
                  std::uint64_t seed);

struct EvalSummary {
    double mean_reward = 0.0;
    double mean_latency_s = 0.0;
    double feasible_fraction = 0.0;
    long steps = 0;
};

// Greedy rollout (no exploration noise) over fresh episodes.
EvalSummary evaluate_policy(env::Environment& environment, const Td3Agent& agent, int episodes);

}  // namespace risfl::agents
