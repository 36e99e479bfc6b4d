#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "risfl/agents.hpp"
#include "risfl/channel.hpp"
#include "risfl/env.hpp"

namespace risfl::exp {

// Every scenario, training, and penalty constant in one validated record.
// Defaults are the reference configuration; named profiles under configs/
// override the pieces that matter for CI-scale runs.
struct SystemConfig {
    int devices = 5;
    int ris_elements = 50;
    double arena_m = 60.0;
    std::array<double, 2> bs_pos{30.0, 30.0};
    std::array<double, 2> ris_pos{24.0, 36.0};
    std::array<double, 2> eve_pos{48.0, 15.0};

    channel::LinkBudget budget;  // reference path loss, exponents, Rician factors

    // identical devices unless a config overrides per-device entries
    double model_bits = 3e6;
    double cpu_hz = 1e9;
    double cycles_per_datum = 1000.0;
    double data_size = 6250.0;
    double tx_power_w = 0.1;

    double noise_bs_w = 1e-14;
    double noise_eve_w = 1e-14;
    double bandwidth_hz = 1e7;
    double secrecy_min_bps = 2e4;

    convergence::ConvergenceParams conv;
    problem::PenaltyParams penalty;
    agents::Td3Config td3;

    int episode_steps = 200;
    int episodes = 300;
    int eval_episodes = 10;
    double state_gain_scale = 1e4;
    bool bandwidth_normalizer = true;

    void validate() const;
    std::uint64_t hash() const;
    std::string to_json_string(int indent = 2) const;
    static SystemConfig from_json_string(const std::string& text);
};

// Empty or missing-keys files fall back to the defaults; unknown keys and
// out-of-range values are load errors that name the offending field.
SystemConfig load_config(const std::string& path);
void save_config(const SystemConfig& cfg, const std::string& path);

// Device positions are uniform in the arena, drawn once per experiment seed
// and frozen for the whole run.
channel::Geometry make_geometry(const SystemConfig& cfg, std::uint64_t seed);
phy::DevicePool make_pool(const SystemConfig& cfg);
env::EnvParams make_env_params(const SystemConfig& cfg, channel::Geometry geometry);

}  // namespace risfl::exp
