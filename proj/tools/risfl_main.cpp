// risfl command line: train schemes, evaluate checkpoints, run the
// exhaustive solver, sweep scenario axes, and verify the participation
// bound. Exit codes: 0 success, 2 configuration/usage error, 3 infeasible
// solver instance.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "risfl/agents.hpp"
#include "risfl/malloc_tuning.hpp"
#include "risfl/config.hpp"
#include "risfl/convergence.hpp"
#include "risfl/oracle.hpp"
#include "risfl/sweep.hpp"

namespace fs = std::filesystem;
using namespace risfl;

namespace {

exp::SystemConfig load_or_default(const std::string& path) {
    if (path.empty()) return exp::SystemConfig{};
    return exp::load_config(path);
}

int cmd_train(const std::string& config_path, const std::string& scheme_str,
              std::uint64_t seed, const std::string& out_dir, int episodes_override) {
    auto cfg = load_or_default(config_path);
    if (episodes_override >= 0) cfg.episodes = episodes_override;
    const auto scheme = exp::scheme_from_name(scheme_str);
    if (!scheme) throw std::invalid_argument("unknown scheme: " + scheme_str);

    fs::create_directories(out_dir);
    const std::string checkpoint = (fs::path(out_dir) / "checkpoint.bin").string();
    const std::string* checkpoint_arg = *scheme == exp::Scheme::rds ? nullptr : &checkpoint;
    const auto outcome = exp::run_scheme(cfg, *scheme, seed, checkpoint_arg);

    exp::write_curve_csv((fs::path(out_dir) / "curve.csv").string(), outcome);
    exp::write_manifest((fs::path(out_dir) / "manifest.json").string(), cfg, outcome,
                        checkpoint_arg ? checkpoint : "");
    std::printf("scheme=%s seed=%llu episodes=%zu eval_reward=%.6f eval_latency_s=%.6f\n",
                exp::scheme_name(*scheme).c_str(), static_cast<unsigned long long>(seed),
                outcome.episode_rewards.size(), outcome.eval.mean_reward,
                outcome.eval.mean_latency_s);
    return 0;
}

int cmd_eval(const std::string& config_path, const std::string& checkpoint,
             std::uint64_t seed, const std::string& out_dir, int episodes) {
    auto cfg = load_or_default(config_path);
    auto agent = agents::Td3Agent::load_file(checkpoint);
    auto params = exp::make_env_params(cfg, exp::make_geometry(cfg, seed));
    env::Environment environment(params, env::EnvOptions{}, seed);
    if (environment.state_dim() != agent->state_dim() ||
        environment.action_dim() != agent->action_dim()) {
        throw std::invalid_argument("checkpoint dimensions do not match the config");
    }

    const auto summary = agents::evaluate_policy(environment, *agent, episodes);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        exp::write_step_csv((fs::path(out_dir) / "steps.csv").string(), environment, *agent,
                            episodes);
    }
    std::printf("eval_reward=%.6f eval_latency_s=%.6f feasible_fraction=%.3f steps=%ld\n",
                summary.mean_reward, summary.mean_latency_s, summary.feasible_fraction,
                summary.steps);
    return 0;
}

int cmd_oracle(const std::string& config_path, std::uint64_t seed, const std::string& out_dir,
               int phase_levels, int bandwidth_points) {
    auto cfg = load_or_default(config_path);
    auto params = exp::make_env_params(cfg, exp::make_geometry(cfg, seed));
    env::Environment environment(params, env::EnvOptions{.freeze_channels = true}, seed);
    auto instance = environment.instance_snapshot();

    oracle::GridSpec grid;
    grid.phase_levels = phase_levels;
    grid.bandwidth_points = bandwidth_points;
    const auto result = oracle::exhaustive_solve(instance, grid);

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        oracle::write_certificate((fs::path(out_dir) / "certificate.json").string(), instance,
                                  grid, result);
    }
    if (!result.feasible) {
        std::printf("infeasible: no decision on the grid satisfies every constraint "
                    "(%llu decisions enumerated)\n",
                    static_cast<unsigned long long>(result.enumerated));
        return 3;
    }
    std::printf("optimum_latency_s=%.9f enumerated=%llu\n", result.latency_s,
                static_cast<unsigned long long>(result.enumerated));
    std::printf("selection=");
    for (auto f : result.decision.selection.flags) std::printf("%d", static_cast<int>(f));
    std::printf(" bandwidth=");
    for (double b : result.decision.alloc.coeff) std::printf("%.4f ", b);
    std::printf("\n");
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& axis_str,
              std::vector<double> values, std::vector<std::string> scheme_strs,
              std::vector<std::uint64_t> seeds, const std::string& out_dir, int workers) {
    auto cfg = load_or_default(config_path);
    const auto axis = exp::axis_from_name(axis_str);
    if (!axis) throw std::invalid_argument("unknown sweep axis: " + axis_str);
    if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
    if (seeds.empty()) seeds = {1};
    std::vector<exp::Scheme> schemes;
    if (scheme_strs.empty()) scheme_strs = {"td3", "fba", "rds", "random-phase"};
    for (const auto& s : scheme_strs) {
        const auto scheme = exp::scheme_from_name(s);
        if (!scheme) throw std::invalid_argument("unknown scheme: " + s);
        schemes.push_back(*scheme);
    }

    const auto rows = exp::run_sweep(*axis, values, cfg, schemes, seeds, workers);
    fs::create_directories(out_dir);
    const std::string csv = (fs::path(out_dir) / "sweep.csv").string();
    exp::write_sweep_csv(csv, rows);
    std::printf("wrote %zu rows to %s\n", rows.size(), csv.c_str());
    return 0;
}

int cmd_verify_bound(int seeds, int devices, int dim, int rounds, const std::string& out_dir) {
    std::vector<int> counts{1, (devices + 1) / 2, devices};
    const auto cases = exp::verify_bound_suite(seeds, devices, dim, rounds, counts);
    int failures = 0;
    for (const auto& c : cases) {
        std::printf("[%s] seed=%llu participants=%d measured=%.6e bound=%.6e\n",
                    c.holds ? "PASS" : "FAIL", static_cast<unsigned long long>(c.seed),
                    c.participants, c.measured, c.bound);
        failures += c.holds ? 0 : 1;
    }
    std::printf("%zu cases, %d failures\n", cases.size(), failures);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        nlohmann::json j = nlohmann::json::array();
        for (const auto& c : cases) {
            j.push_back({{"seed", c.seed},
                         {"participants", c.participants},
                         {"measured", c.measured},
                         {"bound", c.bound},
                         {"holds", c.holds}});
        }
        std::ofstream f(fs::path(out_dir) / "bound_verification.json");
        f << j.dump(2) << "\n";

        // one showcase gradient-norm trace in the standard CSV schema
        Rng rng(1000);
        const auto task = convergence::make_toy_task(devices, dim, rng);
        convergence::ConvergenceParams p;
        p.mu = task.mu();
        p.delta = task.delta_bound();
        p.f0 = task.loss(task.w0);
        p.f_star = task.f_star();
        p.rounds = rounds;
        p.alpha_fl = 1.0 / p.mu;
        const auto trace = convergence::run_toy_fl(
            task, p, convergence::SelectionSchedule::random_subset((devices + 1) / 2, 1));
        exp::write_trace_csv((fs::path(out_dir) / "trace.csv").string(), trace);
    }
    return failures == 0 ? 0 : 1;
}

int cmd_export(const std::string& run_dir, const std::string& out_path) {
    // flatten every manifest under run_dir into one summary CSV
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot write: " + out_path);
    f.precision(17);
    f << "scheme,seed,config_hash,episodes,eval_reward,eval_latency_s,wall_seconds\n";
    std::size_t rows = 0;
    for (const auto& entry : fs::recursive_directory_iterator(run_dir)) {
        if (entry.path().filename() != "manifest.json") continue;
        std::ifstream mf(entry.path());
        nlohmann::json j = nlohmann::json::parse(mf);
        f << j["scheme"].get<std::string>() << "," << j["seed"].get<std::uint64_t>() << ","
          << j["config_hash"].get<std::uint64_t>() << "," << j["episodes"].get<std::size_t>()
          << "," << j["eval_mean_reward"].get<double>() << ","
          << j["eval_mean_latency_s"].get<double>() << "," << j["wall_seconds"].get<double>()
          << "\n";
        ++rows;
    }
    std::printf("exported %zu runs to %s\n", rows, out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    risfl::tune_malloc_for_training();
    CLI::App app{"risfl: secure RIS-assisted federated learning latency lab"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::uint64_t seed = 1;
    std::string out_dir = "runs/out";
    app.add_option("--config", config_path, "JSON config file (defaults when omitted)");
    app.add_option("--seed", seed, "experiment seed");
    app.add_option("--out-dir", out_dir, "output directory");

    auto* train = app.add_subcommand("train", "train one scheme and save its checkpoint");
    std::string scheme = "td3";
    int episodes_override = -1;
    train->add_option("--scheme", scheme, "td3|ddpg|fba|random-phase|rds");
    train->add_option("--episodes", episodes_override, "override configured episode count");

    auto* eval = app.add_subcommand("eval", "greedy rollout of a saved checkpoint");
    std::string checkpoint;
    int eval_episodes = 10;
    eval->add_option("--checkpoint", checkpoint, "agent checkpoint path")->required();
    eval->add_option("--episodes", eval_episodes, "evaluation episodes");

    auto* oracle_cmd = app.add_subcommand("oracle", "exhaustive solve of a frozen tiny instance");
    int phase_levels = 16;
    int bandwidth_points = 21;
    oracle_cmd->add_option("--phase-levels", phase_levels, "phase grid levels per element");
    oracle_cmd->add_option("--bandwidth-points", bandwidth_points, "bandwidth lattice points");

    auto* sweep = app.add_subcommand("sweep", "train schemes across one scenario axis");
    std::string axis;
    std::vector<double> values;
    std::vector<std::string> schemes;
    std::vector<std::uint64_t> sweep_seeds;
    int workers = 0;
    sweep->add_option("--axis", axis, "model_size|ris_elements|bandwidth|accuracy_eps")
        ->required();
    sweep->add_option("--values", values, "axis values")->required()->delimiter(',');
    sweep->add_option("--schemes", schemes, "schemes to run")->delimiter(',');
    sweep->add_option("--seeds", sweep_seeds, "seeds")->delimiter(',');
    sweep->add_option("--workers", workers, "worker threads (0 = hardware)");

    auto* verify = app.add_subcommand("verify-bound", "participation bound verification suite");
    int vb_seeds = 50;
    int vb_devices = 5;
    int vb_dim = 8;
    int vb_rounds = 100;
    verify->add_option("--seeds", vb_seeds, "number of seeds");
    verify->add_option("--devices", vb_devices, "device count of the synthetic task");
    verify->add_option("--dim", vb_dim, "model dimension");
    verify->add_option("--rounds", vb_rounds, "training rounds");

    auto* export_cmd = app.add_subcommand("export", "flatten run manifests into a CSV");
    std::string run_dir = "runs";
    std::string export_path = "runs/summary.csv";
    export_cmd->add_option("--run-dir", run_dir, "directory with manifests");
    export_cmd->add_option("--out", export_path, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (train->parsed()) {
            return cmd_train(config_path, scheme, seed, out_dir, episodes_override);
        }
        if (eval->parsed()) {
            return cmd_eval(config_path, checkpoint, seed, out_dir, eval_episodes);
        }
        if (oracle_cmd->parsed()) {
            return cmd_oracle(config_path, seed, out_dir, phase_levels, bandwidth_points);
        }
        if (sweep->parsed()) {
            return cmd_sweep(config_path, axis, values, schemes, sweep_seeds, out_dir, workers);
        }
        if (verify->parsed()) {
            return cmd_verify_bound(vb_seeds, vb_devices, vb_dim, vb_rounds, out_dir);
        }
        if (export_cmd->parsed()) {
            return cmd_export(run_dir, export_path);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
