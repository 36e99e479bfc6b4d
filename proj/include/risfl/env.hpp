#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "risfl/problem.hpp"
#include "risfl/rng.hpp"

namespace risfl::env {

// Scenario constants the environment needs. Built from the experiment
// config; geometry is already frozen at this point.
struct EnvParams {
    channel::Geometry geometry;
    channel::LinkBudget budget;
    phy::DevicePool pool;
    phy::NoisePowers noise;
    double system_bandwidth_hz = 1e7;
    std::size_t ris_elements = 16;
    convergence::ConvergenceParams conv;
    double secrecy_min_bps = 2e4;
    problem::PenaltyParams penalty;
    int episode_steps = 200;
    double state_gain_scale = 1e4;
    bool bandwidth_normalizer = true;
};

// Scheme masks. equal_bandwidth pins b to an even split over participants;
// random_phase replaces decoded phases with fresh uniform draws each step;
// freeze_channels holds one channel realization for the whole run so a
// trained policy can be compared against the exhaustive solver. When
// fixed_channels is set it supplies that frozen realization directly.
struct EnvOptions {
    bool equal_bandwidth = false;
    bool random_phase = false;
    bool freeze_channels = false;
    std::optional<channel::ChannelRealization> fixed_channels;
};

struct DecodeOptions {
    bool equal_bandwidth = false;
    bool bandwidth_normalizer = true;
};

struct DecodeResult {
    problem::Decision decision;
    int clipped_entries = 0;
};

// Maps a raw vector in [-1,1]^(2K+M) to a decision.
//   selection: raw[k] > 0
//   bandwidth: softplus of the participants' logits over (sum + 1), so the
//              total stays strictly below 1 by construction
//   phases:    pi * (raw + 1), covering [0, 2*pi]
// Out-of-box inputs are clipped and counted.
DecodeResult decode_action(std::span<const double> raw, std::size_t devices,
                           std::size_t ris_elements, const DecodeOptions& opts);

struct Transition {
    std::vector<double> state;
    std::vector<double> action;
    double reward = 0.0;
    std::vector<double> next_state;
    bool done = false;
};

struct StepOutcome {
    Transition transition;
    problem::Evaluation eval;
    problem::Decision decision;
    double penalty = 0.0;
    double latency_s = 0.0;  // capped round latency actually charged
    int clipped_entries = 0;
};

// The sequential decision process: one step is one training round under a
// fresh channel draw. State is the previous step's allocated-bandwidth total
// plus the real/imaginary effective gains of every device under the
// previous step's phase configuration.
class Environment {
  public:
    Environment(EnvParams params, EnvOptions options, std::uint64_t seed);

    int state_dim() const { return static_cast<int>(2 * devices() + 1); }
    int action_dim() const { return static_cast<int>(2 * devices() + params_.ris_elements); }
    std::size_t devices() const { return params_.pool.devices(); }
    std::size_t ris_elements() const { return params_.ris_elements; }
    int episode_steps() const { return params_.episode_steps; }

    std::vector<double> reset();
    StepOutcome step(std::span<const double> raw_action);

    // largest latency any feasible decision can incur (secrecy floor bounds
    // the feasible upload rate from below), times a safety factor; infinite
    // round latencies are charged at this value so rewards stay finite
    double latency_cap_s() const { return latency_cap_s_; }

    const channel::ChannelRealization& current_channels() const { return channels_; }
    const EnvParams& params() const { return params_; }
    const EnvOptions& options() const { return options_; }

    // instance over the current channel realization, for solver comparisons
    problem::ProblemInstance instance_snapshot() const;

  private:
    std::vector<double> build_state(double bandwidth_sum) const;
    void redraw_channels();

    EnvParams params_;
    EnvOptions options_;
    Rng channel_rng_;
    Rng phase_rng_;
    channel::ChannelRealization channels_;
    channel::RisConfig previous_phases_;
    double previous_bandwidth_sum_ = 0.0;
    int steps_taken_ = 0;
    double latency_cap_s_ = 0.0;
};

}  // namespace risfl::env
