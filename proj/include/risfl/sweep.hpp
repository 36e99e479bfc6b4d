#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "risfl/agents.hpp"
#include "risfl/config.hpp"
#include "risfl/env.hpp"

namespace risfl::exp {

enum class Scheme { td3, ddpg, fba, random_phase, rds };

std::string scheme_name(Scheme s);
std::optional<Scheme> scheme_from_name(const std::string& name);

env::EnvOptions scheme_options(Scheme s);
agents::Td3Config scheme_agent_config(const SystemConfig& cfg, Scheme s);

struct RunOutcome {
    Scheme scheme = Scheme::td3;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    std::vector<double> episode_rewards;
    std::vector<double> episode_latencies;
    agents::EvalSummary eval;
    double wall_seconds = 0.0;
};

// Trains (or, for the random-selection scheme, just rolls out) one scheme
// on the configured scenario and evaluates it greedily on fresh episodes.
// When checkpoint_path is given the trained agent is saved there.
RunOutcome run_scheme(const SystemConfig& cfg, Scheme scheme, std::uint64_t seed,
                      const std::string* checkpoint_path = nullptr);

enum class SweepAxis { model_size, ris_elements, bandwidth, accuracy_eps };

std::string axis_name(SweepAxis a);
std::optional<SweepAxis> axis_from_name(const std::string& name);
SystemConfig apply_axis(SystemConfig cfg, SweepAxis axis, double value);

struct SweepRow {
    std::string axis;
    double value = 0.0;
    std::string scheme;
    std::uint64_t seed = 0;
    double latency_s = 0.0;
    double reward = 0.0;
};

// Full factorial (value x scheme x seed) with a small worker pool; rows come
// back sorted so output is independent of scheduling.
std::vector<SweepRow> run_sweep(SweepAxis axis, const std::vector<double>& values,
                                const SystemConfig& cfg, const std::vector<Scheme>& schemes,
                                const std::vector<std::uint64_t>& seeds, int workers = 0);

// ---- result persistence -------------------------------------------------

// CSV column sets are part of the schema; tests pin them.
extern const char* const kCurveCsvHeader;   // episode,reward,mean_latency_s
extern const char* const kSweepCsvHeader;   // axis,value,scheme,seed,latency_s,reward
extern const char* const kStepCsvHeader;    // per-step diagnostics
extern const char* const kTraceCsvHeader;   // round,grad_norm_sq
constexpr int kCsvSchemaVersion = 1;

void write_curve_csv(const std::string& path, const RunOutcome& outcome);
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);
void write_trace_csv(const std::string& path, const std::vector<double>& grad_norms);

// one row per participant per step of a greedy rollout
void write_step_csv(const std::string& path, env::Environment& environment,
                    const agents::Td3Agent& agent, int episodes);

// Run manifest: config hash, seed, scheme, episode count, rewards, wall
// clock, checkpoint path. JSON, schema-versioned, append-only by convention.
void write_manifest(const std::string& path, const SystemConfig& cfg, const RunOutcome& outcome,
                    const std::string& checkpoint_path);

// ---- bound verification harness ------------------------------------------

struct BoundCase {
    std::uint64_t seed = 0;
    int participants = 0;
    double measured = 0.0;
    double bound = 0.0;
    bool holds = false;
};

// Synthetic-task check that the measured average squared gradient norm stays
// under the participation bound, across seeds and participant counts.
std::vector<BoundCase> verify_bound_suite(int seeds, int devices, int dim, int rounds,
                                          const std::vector<int>& participant_counts);

}  // namespace risfl::exp
