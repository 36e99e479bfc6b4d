#include "risfl/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "risfl/convergence.hpp"

namespace risfl::exp {

namespace {

double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// Random-selection baseline policy expressed through raw env actions: the
// env runs with the equal-bandwidth mask, so only selection bits and phases
// need encoding.
std::vector<double> rds_action(const env::Environment& environment, int min_participants,
                               Rng& rng) {
    const auto devices = environment.devices();
    const auto elements = environment.ris_elements();
    const int k = static_cast<int>(devices);
    const int floor = std::min(min_participants, k);
    const int count = floor + static_cast<int>(rng.uniform_int(k - floor + 1));

    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) order[i] = i;
    for (int i = 0; i < count; ++i) {
        const int j = i + static_cast<int>(rng.uniform_int(k - i));
        std::swap(order[i], order[j]);
    }
    std::vector<double> raw(environment.action_dim(), -1.0);
    for (int i = 0; i < count; ++i) raw[order[i]] = 1.0;
    for (std::size_t m = 0; m < elements; ++m) {
        // theta = pi * (raw + 1) inverts to raw = theta/pi - 1
        raw[2 * devices + m] = rng.uniform(0.0, 2.0) - 1.0;
    }
    return raw;
}

RunOutcome run_rds(const SystemConfig& cfg, std::uint64_t seed) {
    RunOutcome outcome;
    outcome.scheme = Scheme::rds;
    outcome.seed = seed;
    outcome.config_hash = cfg.hash();

    auto params = make_env_params(cfg, make_geometry(cfg, seed));
    env::EnvOptions options;
    options.equal_bandwidth = true;
    env::Environment environment(params, options, seed);
    Rng rng = Rng(seed).fork(0x2D5);
    const int min_p =
        convergence::min_participants(cfg.conv, cfg.devices).value_or(cfg.devices);

    double reward_sum = 0.0;
    double latency_sum = 0.0;
    long steps = 0;
    double feasible = 0.0;
    for (int ep = 0; ep < cfg.eval_episodes; ++ep) {
        environment.reset();
        for (int s = 0; s < environment.episode_steps(); ++s) {
            const auto action = rds_action(environment, min_p, rng);
            auto step = environment.step(action);
            reward_sum += step.transition.reward;
            latency_sum += step.latency_s;
            feasible += problem::all_satisfied(step.eval.slacks) ? 1.0 : 0.0;
            ++steps;
        }
    }
    outcome.eval.mean_reward = reward_sum / steps;
    outcome.eval.mean_latency_s = latency_sum / steps;
    outcome.eval.feasible_fraction = feasible / steps;
    outcome.eval.steps = steps;
    return outcome;
}

}  // namespace

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::td3: return "td3";
        case Scheme::ddpg: return "ddpg";
        case Scheme::fba: return "fba";
        case Scheme::random_phase: return "random-phase";
        case Scheme::rds: return "rds";
    }
    return "unknown";
}

std::optional<Scheme> scheme_from_name(const std::string& name) {
    if (name == "td3") return Scheme::td3;
    if (name == "ddpg") return Scheme::ddpg;
    if (name == "fba") return Scheme::fba;
    if (name == "random-phase" || name == "random_phase") return Scheme::random_phase;
    if (name == "rds") return Scheme::rds;
    return std::nullopt;
}

env::EnvOptions scheme_options(Scheme s) {
    env::EnvOptions o;
    if (s == Scheme::fba || s == Scheme::rds) o.equal_bandwidth = true;
    if (s == Scheme::random_phase) o.random_phase = true;
    return o;
}

agents::Td3Config scheme_agent_config(const SystemConfig& cfg, Scheme s) {
    agents::Td3Config a = cfg.td3;
    if (s == Scheme::ddpg) a = agents::ddpg_variant(a);
    return a;
}

RunOutcome run_scheme(const SystemConfig& cfg, Scheme scheme, std::uint64_t seed,
                      const std::string* checkpoint_path) {
    const double t0 = now_seconds();
    if (scheme == Scheme::rds) {
        RunOutcome outcome = run_rds(cfg, seed);
        outcome.wall_seconds = now_seconds() - t0;
        return outcome;
    }

    RunOutcome outcome;
    outcome.scheme = scheme;
    outcome.seed = seed;
    outcome.config_hash = cfg.hash();

    auto params = make_env_params(cfg, make_geometry(cfg, seed));
    env::Environment environment(params, scheme_options(scheme), seed);
    const auto agent_cfg = scheme_agent_config(cfg, scheme);
    auto result = agents::train(environment, agent_cfg, cfg.episodes, seed);
    outcome.episode_rewards = std::move(result.episode_rewards);
    outcome.episode_latencies = std::move(result.episode_latencies);
    outcome.eval = agents::evaluate_policy(environment, *result.agent, cfg.eval_episodes);
    if (checkpoint_path) result.agent->save_file(*checkpoint_path);
    outcome.wall_seconds = now_seconds() - t0;
    return outcome;
}

std::string axis_name(SweepAxis a) {
    switch (a) {
        case SweepAxis::model_size: return "model_size";
        case SweepAxis::ris_elements: return "ris_elements";
        case SweepAxis::bandwidth: return "bandwidth";
        case SweepAxis::accuracy_eps: return "accuracy_eps";
    }
    return "unknown";
}

std::optional<SweepAxis> axis_from_name(const std::string& name) {
    if (name == "model_size") return SweepAxis::model_size;
    if (name == "ris_elements") return SweepAxis::ris_elements;
    if (name == "bandwidth") return SweepAxis::bandwidth;
    if (name == "accuracy_eps") return SweepAxis::accuracy_eps;
    return std::nullopt;
}

SystemConfig apply_axis(SystemConfig cfg, SweepAxis axis, double value) {
    switch (axis) {
        case SweepAxis::model_size:
            cfg.model_bits = value;
            break;
        case SweepAxis::ris_elements:
            cfg.ris_elements = static_cast<int>(value);
            break;
        case SweepAxis::bandwidth:
            cfg.bandwidth_hz = value;
            break;
        case SweepAxis::accuracy_eps:
            cfg.conv.epsilon = value;
            break;
    }
    cfg.validate();
    return cfg;
}

std::vector<SweepRow> run_sweep(SweepAxis axis, const std::vector<double>& values,
                                const SystemConfig& cfg, const std::vector<Scheme>& schemes,
                                const std::vector<std::uint64_t>& seeds, int workers) {
    struct Job {
        double value;
        Scheme scheme;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (double v : values) {
        for (Scheme s : schemes) {
            for (std::uint64_t seed : seeds) jobs.push_back({v, s, seed});
        }
    }

    std::vector<SweepRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const Job& job = jobs[i];
            const SystemConfig point_cfg = apply_axis(cfg, axis, job.value);
            const RunOutcome outcome = run_scheme(point_cfg, job.scheme, job.seed);
            rows[i] = SweepRow{axis_name(axis), job.value,    scheme_name(job.scheme),
                               job.seed,        outcome.eval.mean_latency_s,
                               outcome.eval.mean_reward};
        }
    };

    int n_workers = workers > 0 ? workers
                                : static_cast<int>(std::thread::hardware_concurrency());
    n_workers = std::max(1, std::min<int>(n_workers, static_cast<int>(jobs.size())));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return rows;
}

const char* const kCurveCsvHeader = "episode,reward,mean_latency_s";
const char* const kSweepCsvHeader = "axis,value,scheme,seed,latency_s,reward";
const char* const kStepCsvHeader =
    "step,device,selected,bandwidth,rate_bs_bps,rate_eve_bps,secrecy_bps,t_local_s,"
    "t_upload_s,t_total_s,round_latency_s,slack_bandwidth,slack_accuracy,slack_secrecy_min,"
    "penalty,reward";
const char* const kTraceCsvHeader = "round,grad_norm_sq";

namespace {

std::ofstream open_csv(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write csv: " + path);
    f.precision(17);
    return f;
}

}  // namespace

void write_curve_csv(const std::string& path, const RunOutcome& outcome) {
    auto f = open_csv(path);
    f << kCurveCsvHeader << "\n";
    for (std::size_t ep = 0; ep < outcome.episode_rewards.size(); ++ep) {
        f << ep << "," << outcome.episode_rewards[ep] << ","
          << outcome.episode_latencies[ep] << "\n";
    }
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    auto f = open_csv(path);
    f << kSweepCsvHeader << "\n";
    for (const auto& r : rows) {
        f << r.axis << "," << r.value << "," << r.scheme << "," << r.seed << "," << r.latency_s
          << "," << r.reward << "\n";
    }
}

void write_trace_csv(const std::string& path, const std::vector<double>& grad_norms) {
    auto f = open_csv(path);
    f << kTraceCsvHeader << "\n";
    for (std::size_t t = 0; t < grad_norms.size(); ++t) {
        f << t << "," << grad_norms[t] << "\n";
    }
}

void write_step_csv(const std::string& path, env::Environment& environment,
                    const agents::Td3Agent& agent, int episodes) {
    auto f = open_csv(path);
    f << kStepCsvHeader << "\n";
    long step_index = 0;
    for (int ep = 0; ep < episodes; ++ep) {
        auto state = environment.reset();
        for (int s = 0; s < environment.episode_steps(); ++s) {
            const auto action = agent.act_greedy(state);
            auto outcome = environment.step(action);
            const auto& slacks = outcome.eval.slacks;
            for (const auto& row : outcome.eval.report.rows) {
                f << step_index << "," << row.device << ",1," << outcome.decision.alloc.coeff[row.device]
                  << "," << row.rate_bs_bps << "," << row.rate_eve_bps << "," << row.secrecy_bps
                  << "," << row.t_local_s << "," << row.t_upload_s << "," << row.t_total_s << ","
                  << outcome.eval.report.round_latency_s << "," << slacks.bandwidth << ","
                  << slacks.accuracy << "," << slacks.secrecy_min << "," << outcome.penalty << ","
                  << outcome.transition.reward << "\n";
            }
            state = std::move(outcome.transition.next_state);
            ++step_index;
        }
    }
}

void write_manifest(const std::string& path, const SystemConfig& cfg, const RunOutcome& outcome,
                    const std::string& checkpoint_path) {
    nlohmann::json j;
    j["schema_version"] = kCsvSchemaVersion;
    j["config_hash"] = outcome.config_hash;
    j["seed"] = outcome.seed;
    j["scheme"] = scheme_name(outcome.scheme);
    j["episodes"] = outcome.episode_rewards.size();
    j["episode_rewards"] = outcome.episode_rewards;
    j["eval_mean_reward"] = outcome.eval.mean_reward;
    j["eval_mean_latency_s"] = outcome.eval.mean_latency_s;
    j["eval_feasible_fraction"] = outcome.eval.feasible_fraction;
    j["wall_seconds"] = outcome.wall_seconds;
    j["checkpoint"] = checkpoint_path;
    j["config"] = nlohmann::json::parse(cfg.to_json_string());
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write manifest: " + path);
    f << j.dump(2) << "\n";
}

std::vector<BoundCase> verify_bound_suite(int seeds, int devices, int dim, int rounds,
                                          const std::vector<int>& participant_counts) {
    std::vector<BoundCase> cases;
    for (int s = 0; s < seeds; ++s) {
        const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(s);
        Rng rng(seed);
        const auto task = convergence::make_toy_task(devices, dim, rng);
        convergence::ConvergenceParams p;
        p.mu = task.mu();
        p.delta = task.delta_bound();
        p.f0 = task.loss(task.w0);
        p.f_star = task.f_star();
        p.rounds = rounds;
        p.alpha_fl = 1.0 / p.mu;
        for (int a : participant_counts) {
            const auto schedule = convergence::SelectionSchedule::random_subset(a, seed ^ 0x5E1);
            const auto trace = convergence::run_toy_fl(task, p, schedule);
            BoundCase c;
            c.seed = seed;
            c.participants = a;
            c.measured = convergence::mean(trace);
            c.bound = convergence::bound_value(p, devices, a);
            c.holds = c.measured <= c.bound;
            cases.push_back(c);
        }
    }
    return cases;
}

}  // namespace risfl::exp
