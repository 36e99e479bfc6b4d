#include "risfl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace risfl::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t compositions_count(int total, int parts) {
    // C(total + parts - 1, parts - 1)
    std::uint64_t result = 1;
    for (int i = 1; i < parts; ++i) {
        result = result * static_cast<std::uint64_t>(total + i) / static_cast<std::uint64_t>(i);
    }
    return result;
}

// selection flags in ascending lexicographic order of (x_0, ..., x_{K-1})
std::vector<std::uint8_t> lex_selection(std::uint64_t index, int devices) {
    std::vector<std::uint8_t> flags(devices, 0);
    for (int k = 0; k < devices; ++k) {
        flags[k] = (index >> (devices - 1 - k)) & 1u;
    }
    return flags;
}

std::vector<double> decision_vector(const problem::Decision& d) {
    std::vector<double> v;
    v.reserve(d.selection.flags.size() + d.alloc.coeff.size() + d.ris.phases.size());
    for (auto f : d.selection.flags) v.push_back(static_cast<double>(f));
    v.insert(v.end(), d.alloc.coeff.begin(), d.alloc.coeff.end());
    v.insert(v.end(), d.ris.phases.begin(), d.ris.phases.end());
    return v;
}

bool lexicographically_before(const problem::Decision& a, const problem::Decision& b) {
    return decision_vector(a) < decision_vector(b);
}

template <typename Fn>
void for_each_composition(int total, int parts, std::vector<int>& scratch, int index, int left,
                          Fn&& fn) {
    if (index == parts - 1) {
        scratch[index] = left;
        fn(scratch);
        return;
    }
    for (int c = 0; c <= left; ++c) {
        scratch[index] = c;
        for_each_composition(total, parts, scratch, index + 1, left - c, fn);
    }
}

void fnv_mix(std::uint64_t& h, const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
}

void fnv_mix_complex(std::uint64_t& h, const channel::ComplexVec& v) {
    for (const auto& z : v) {
        const double re = z.real();
        const double im = z.imag();
        fnv_mix(h, &re, sizeof(re));
        fnv_mix(h, &im, sizeof(im));
    }
}

problem::Decision best_greedy_decision(env::Environment& environment,
                                       const agents::Td3Agent& agent, int rollout_steps) {
    auto state = environment.reset();
    problem::Decision best;
    double best_latency = kInf;
    bool best_feasible = false;
    for (int s = 0; s < rollout_steps; ++s) {
        const auto action = agent.act_greedy(state);
        auto outcome = environment.step(action);
        const bool feasible = problem::all_satisfied(outcome.eval.slacks);
        const double latency = outcome.eval.report.round_latency_s;
        const bool better = best_feasible == feasible ? latency < best_latency : feasible;
        if (s == 0 || better) {
            best = outcome.decision;
            best_latency = latency;
            best_feasible = feasible;
        }
        state = std::move(outcome.transition.next_state);
    }
    return best;
}

problem::Decision solve_with_mask(const env::EnvParams& params,
                                  const channel::ChannelRealization& channels,
                                  const BaselineBudget& budget, std::uint64_t seed,
                                  env::EnvOptions options) {
    options.fixed_channels = channels;
    options.freeze_channels = true;
    env::Environment environment(params, options, seed);
    auto result = agents::train(environment, budget.agent, budget.episodes, seed);
    return best_greedy_decision(environment, *result.agent, 10);
}

}  // namespace

OracleResult exhaustive_solve(const problem::ProblemInstance& instance, const GridSpec& grid) {
    const int devices = static_cast<int>(instance.devices());
    const int elements = static_cast<int>(instance.channels.elements());
    if (devices > grid.max_devices || elements > grid.max_elements) {
        throw std::invalid_argument("exhaustive_solve: instance exceeds the grid caps");
    }
    if (grid.phase_levels < 1 || grid.bandwidth_points < 2) {
        throw std::invalid_argument("exhaustive_solve: degenerate grid");
    }

    // prune selections through the participation bound before counting
    std::vector<std::vector<std::uint8_t>> selections;
    for (std::uint64_t idx = 0; idx < (1ull << devices); ++idx) {
        auto flags = lex_selection(idx, devices);
        int participants = 0;
        for (auto f : flags) participants += f;
        if (participants == 0) continue;
        if (convergence::bound_value(instance.conv, devices, participants) >
            instance.conv.epsilon) {
            continue;
        }
        selections.push_back(std::move(flags));
    }

    const int lattice = grid.bandwidth_points - 1;
    std::uint64_t phase_combos = 1;
    for (int m = 0; m < elements; ++m) phase_combos *= grid.phase_levels;
    std::uint64_t total = 0;
    for (const auto& flags : selections) {
        int participants = 0;
        for (auto f : flags) participants += f;
        total += compositions_count(lattice, participants) * phase_combos;
    }
    if (total > grid.enumeration_budget) {
        throw std::invalid_argument("exhaustive_solve: enumeration of " + std::to_string(total) +
                                    " decisions exceeds the budget of " +
                                    std::to_string(grid.enumeration_budget));
    }

    OracleResult best;
    best.latency_s = kInf;

    problem::Decision candidate;
    candidate.alloc.system_bandwidth_hz = instance.system_bandwidth_hz;
    candidate.alloc.coeff.assign(devices, 0.0);
    candidate.ris.phases.assign(elements, 0.0);

    std::vector<int> phase_digits(elements, 0);
    std::vector<int> split;
    for (const auto& flags : selections) {
        candidate.selection.flags = flags;
        const auto participants = candidate.selection.participants();
        split.assign(participants.size(), 0);

        std::fill(phase_digits.begin(), phase_digits.end(), 0);
        for (;;) {
            for (int m = 0; m < elements; ++m) {
                candidate.ris.phases[m] =
                    channel::kTwoPi * phase_digits[m] / grid.phase_levels;
            }
            for_each_composition(
                lattice, static_cast<int>(participants.size()), split, 0, lattice,
                [&](const std::vector<int>& counts) {
                    ++best.enumerated;
                    std::fill(candidate.alloc.coeff.begin(), candidate.alloc.coeff.end(), 0.0);
                    for (std::size_t i = 0; i < participants.size(); ++i) {
                        candidate.alloc.coeff[participants[i]] =
                            static_cast<double>(counts[i]) / lattice;
                    }
                    const auto evaluation = problem::evaluate_decision(instance, candidate);
                    if (!problem::all_satisfied(evaluation.slacks)) return;
                    const double latency = evaluation.report.round_latency_s;
                    if (!best.feasible || latency < best.latency_s ||
                        (latency == best.latency_s &&
                         lexicographically_before(candidate, best.decision))) {
                        best.feasible = true;
                        best.latency_s = latency;
                        best.decision = candidate;
                    }
                });

            int m = elements - 1;
            for (; m >= 0; --m) {
                if (++phase_digits[m] < grid.phase_levels) break;
                phase_digits[m] = 0;
            }
            if (m < 0) break;
        }
    }
    return best;
}

std::uint64_t instance_hash(const problem::ProblemInstance& instance) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix_double = [&h](double d) { fnv_mix(h, &d, sizeof(d)); };
    for (std::size_t k = 0; k < instance.devices(); ++k) {
        mix_double(instance.pool.cycles_per_datum[k]);
        mix_double(instance.pool.data_size[k]);
        mix_double(instance.pool.cpu_hz[k]);
        mix_double(instance.pool.tx_power_w[k]);
        mix_double(instance.pool.model_bits[k]);
    }
    mix_double(instance.noise.bs_w);
    mix_double(instance.noise.eve_w);
    mix_double(instance.system_bandwidth_hz);
    mix_double(instance.secrecy_min_bps);
    mix_double(instance.conv.mu);
    mix_double(instance.conv.delta);
    mix_double(instance.conv.f0);
    mix_double(instance.conv.f_star);
    mix_double(static_cast<double>(instance.conv.rounds));
    mix_double(instance.conv.epsilon);
    fnv_mix_complex(h, instance.channels.ris_to_bs);
    fnv_mix_complex(h, instance.channels.ris_to_eve);
    for (const auto& v : instance.channels.device_to_ris) fnv_mix_complex(h, v);
    fnv_mix_complex(h, instance.channels.device_to_bs);
    fnv_mix_complex(h, instance.channels.device_to_eve);
    return h;
}

void write_certificate(const std::string& path, const problem::ProblemInstance& instance,
                       const GridSpec& grid, const OracleResult& result) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["instance_hash"] = instance_hash(instance);
    j["grid"] = {{"phase_levels", grid.phase_levels},
                 {"bandwidth_points", grid.bandwidth_points}};
    j["feasible"] = result.feasible;
    j["enumerated"] = result.enumerated;
    if (result.feasible) {
        j["latency_s"] = result.latency_s;
        j["selection"] = result.decision.selection.flags;
        j["bandwidth"] = result.decision.alloc.coeff;
        j["phases"] = result.decision.ris.phases;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write certificate: " + path);
    f << j.dump(2) << "\n";
}

problem::Decision rds_solve(const problem::ProblemInstance& instance, Rng& rng) {
    const int devices = static_cast<int>(instance.devices());
    const auto required = convergence::min_participants(instance.conv, devices);
    const int floor = required.value_or(devices);
    const int count = floor + static_cast<int>(rng.uniform_int(devices - floor + 1));

    std::vector<int> order(devices);
    for (int i = 0; i < devices; ++i) order[i] = i;
    for (int i = 0; i < count; ++i) {
        const int j = i + static_cast<int>(rng.uniform_int(devices - i));
        std::swap(order[i], order[j]);
    }

    problem::Decision d;
    d.selection.flags.assign(devices, 0);
    for (int i = 0; i < count; ++i) d.selection.flags[order[i]] = 1;
    d.alloc.system_bandwidth_hz = instance.system_bandwidth_hz;
    d.alloc.coeff.assign(devices, 0.0);
    for (int i = 0; i < count; ++i) d.alloc.coeff[order[i]] = 1.0 / count;
    d.ris.phases.resize(instance.channels.elements());
    for (double& theta : d.ris.phases) theta = rng.uniform(0.0, channel::kTwoPi);
    return d;
}

problem::Decision td3_solve(const env::EnvParams& params,
                            const channel::ChannelRealization& channels,
                            const BaselineBudget& budget, std::uint64_t seed) {
    return solve_with_mask(params, channels, budget, seed, env::EnvOptions{});
}

problem::Decision fba_solve(const env::EnvParams& params,
                            const channel::ChannelRealization& channels,
                            const BaselineBudget& budget, std::uint64_t seed) {
    env::EnvOptions options;
    options.equal_bandwidth = true;
    return solve_with_mask(params, channels, budget, seed, options);
}

problem::Decision random_phase_solve(const env::EnvParams& params,
                                     const channel::ChannelRealization& channels,
                                     const BaselineBudget& budget, std::uint64_t seed) {
    env::EnvOptions options;
    options.random_phase = true;
    return solve_with_mask(params, channels, budget, seed, options);
}

}  // namespace risfl::oracle
