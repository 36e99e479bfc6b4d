#pragma once

#include <cstdint>
#include <string>

#include "risfl/agents.hpp"
#include "risfl/env.hpp"
#include "risfl/problem.hpp"
#include "risfl/rng.hpp"

namespace risfl::oracle {

// Enumeration grid for the exhaustive solver. Bandwidth points lie on the
// exact-sum lattice (the objective is monotone in bandwidth, so the best
// feasible split always uses the full budget), phases on a uniform circle
// grid.
struct GridSpec {
    int phase_levels = 16;
    int bandwidth_points = 21;  // lattice points per axis, denominators of 1/(points-1)
    int max_devices = 4;
    int max_elements = 3;
    std::uint64_t enumeration_budget = 50000000;
};

struct OracleResult {
    bool feasible = false;
    problem::Decision decision;
    double latency_s = 0.0;
    std::uint64_t enumerated = 0;
};

// Brute force over all selections x phase grid x bandwidth lattice. Ties on
// the objective break toward the lexicographically smallest decision vector,
// so the result is independent of enumeration order.
OracleResult exhaustive_solve(const problem::ProblemInstance& instance, const GridSpec& grid);

std::uint64_t instance_hash(const problem::ProblemInstance& instance);

// JSON record of (instance hash, grid, optimum) for downstream checks.
void write_certificate(const std::string& path, const problem::ProblemInstance& instance,
                       const GridSpec& grid, const OracleResult& result);

// Random-selection baseline: participant count uniform in
// [min_participants, K], uniform subset, even bandwidth split, uniform
// phases. No training involved.
problem::Decision rds_solve(const problem::ProblemInstance& instance, Rng& rng);

// Training budget shared by the schemes that optimize a subset of the
// decision variables on a frozen instance.
struct BaselineBudget {
    int episodes = 60;
    agents::Td3Config agent;
};

// Trains the agent on the frozen instance with the scheme's mask and
// returns the best feasible decision found in a short greedy rollout.
problem::Decision td3_solve(const env::EnvParams& params,
                            const channel::ChannelRealization& channels,
                            const BaselineBudget& budget, std::uint64_t seed);
problem::Decision fba_solve(const env::EnvParams& params,
                            const channel::ChannelRealization& channels,
                            const BaselineBudget& budget, std::uint64_t seed);
problem::Decision random_phase_solve(const env::EnvParams& params,
                                     const channel::ChannelRealization& channels,
                                     const BaselineBudget& budget, std::uint64_t seed);

}  // namespace risfl::oracle
