// Python bindings for the core operations: channel draws, rate/latency
// evaluation, the participation bound, the decision environment, the
// exhaustive solver, and scheme training.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "risfl/agents.hpp"
#include "risfl/channel.hpp"
#include "risfl/config.hpp"
#include "risfl/convergence.hpp"
#include "risfl/env.hpp"
#include "risfl/nn.hpp"
#include "risfl/oracle.hpp"
#include "risfl/problem.hpp"
#include "risfl/sweep.hpp"

namespace py = pybind11;
using namespace risfl;

namespace {

exp::SystemConfig config_from_json(const std::string& text) {
    return exp::SystemConfig::from_json_string(text);
}

env::Environment make_environment(const std::string& config_json, const std::string& scheme,
                                  std::uint64_t seed) {
    const auto cfg = config_from_json(config_json);
    const auto s = exp::scheme_from_name(scheme.empty() ? "td3" : scheme);
    if (!s) throw std::invalid_argument("unknown scheme: " + scheme);
    auto params = exp::make_env_params(cfg, exp::make_geometry(cfg, seed));
    return env::Environment(params, exp::scheme_options(*s), seed);
}

py::dict step_to_dict(const env::StepOutcome& outcome) {
    py::dict d;
    d["reward"] = outcome.transition.reward;
    d["latency_s"] = outcome.latency_s;
    d["penalty"] = outcome.penalty;
    d["done"] = outcome.transition.done;
    d["next_state"] = outcome.transition.next_state;
    d["round_latency_s"] = outcome.eval.report.round_latency_s;
    d["feasible"] = problem::all_satisfied(outcome.eval.slacks);
    d["selection"] = outcome.decision.selection.flags;
    d["bandwidth"] = outcome.decision.alloc.coeff;
    d["phases"] = outcome.decision.ris.phases;
    d["slack_bandwidth"] = outcome.eval.slacks.bandwidth;
    d["slack_accuracy"] = outcome.eval.slacks.accuracy;
    d["slack_secrecy_min"] = outcome.eval.slacks.secrecy_min;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "secure RIS-assisted federated learning latency lab (native core)";

    py::class_<Rng>(m, "Rng")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("uniform", py::overload_cast<>(&Rng::uniform))
        .def("normal", py::overload_cast<>(&Rng::normal))
        .def("fork", &Rng::fork, py::arg("tag"));

    // ---- channels ----
    py::class_<channel::ChannelParams>(m, "ChannelParams")
        .def(py::init<>())
        .def_readwrite("ref_path_loss_db", &channel::ChannelParams::ref_path_loss_db)
        .def_readwrite("distance_m", &channel::ChannelParams::distance_m)
        .def_readwrite("path_loss_exp", &channel::ChannelParams::path_loss_exp)
        .def_readwrite("rician_k", &channel::ChannelParams::rician_k)
        .def_readwrite("los_angle_rad", &channel::ChannelParams::los_angle_rad);

    py::class_<channel::RisConfig>(m, "RisConfig")
        .def(py::init<>())
        .def_static("identity", &channel::RisConfig::identity, py::arg("elements"))
        .def_readwrite("phases", &channel::RisConfig::phases);

    m.def("draw_channel", &channel::draw_channel, py::arg("params"), py::arg("length"),
          py::arg("rng"), "Rician channel draw with large-scale path loss");
    m.def("effective_gain", &channel::effective_gain, py::arg("h_ris_rx"), py::arg("ris"),
          py::arg("h_tx_ris"), py::arg("h_direct"),
          "reflected cascade through the phase shifts plus the direct link");
    m.def("optimal_single_link_phases", &channel::optimal_single_link_phases,
          py::arg("h_ris_rx"), py::arg("h_tx_ris"), py::arg("h_direct"));
    m.def("wrap_phase", &channel::wrap_phase, py::arg("theta"));

    // ---- participation bound ----
    py::class_<convergence::ConvergenceParams>(m, "ConvergenceParams")
        .def(py::init<>())
        .def_readwrite("mu", &convergence::ConvergenceParams::mu)
        .def_readwrite("delta", &convergence::ConvergenceParams::delta)
        .def_readwrite("f0", &convergence::ConvergenceParams::f0)
        .def_readwrite("f_star", &convergence::ConvergenceParams::f_star)
        .def_readwrite("rounds", &convergence::ConvergenceParams::rounds)
        .def_readwrite("epsilon", &convergence::ConvergenceParams::epsilon)
        .def_readwrite("alpha_fl", &convergence::ConvergenceParams::alpha_fl);

    m.def("bound_value",
          py::overload_cast<const convergence::ConvergenceParams&, int, int>(
              &convergence::bound_value),
          py::arg("params"), py::arg("total_devices"), py::arg("participants"));
    m.def(
        "min_participants",
        [](const convergence::ConvergenceParams& p, int k) -> py::object {
            const auto r = convergence::min_participants(p, k);
            if (!r) return py::none();
            return py::int_(*r);
        },
        py::arg("params"), py::arg("total_devices"));
    m.def("epsilon_for_min_participants", &convergence::epsilon_for_min_participants,
          py::arg("params"), py::arg("total_devices"), py::arg("target"));

    py::class_<convergence::ToyFlTask>(m, "ToyFlTask")
        .def_readonly("dim", &convergence::ToyFlTask::dim)
        .def_readonly("optima", &convergence::ToyFlTask::optima)
        .def_readonly("curvature", &convergence::ToyFlTask::curvature)
        .def_readonly("w0", &convergence::ToyFlTask::w0)
        .def("mu", &convergence::ToyFlTask::mu)
        .def("delta_bound", &convergence::ToyFlTask::delta_bound)
        .def("loss", &convergence::ToyFlTask::loss)
        .def("f_star", &convergence::ToyFlTask::f_star);

    m.def("make_toy_task", &convergence::make_toy_task, py::arg("devices"), py::arg("dim"),
          py::arg("rng"), py::arg("isotropic") = false);
    m.def(
        "run_toy_fl",
        [](const convergence::ToyFlTask& task, const convergence::ConvergenceParams& p,
           int participants, std::uint64_t seed) {
            return convergence::run_toy_fl(
                task, p, convergence::SelectionSchedule::random_subset(participants, seed));
        },
        py::arg("task"), py::arg("params"), py::arg("participants"), py::arg("seed"),
        "synchronous rounds with a fresh uniform participant draw each round");

    // ---- environment ----
    py::class_<env::Environment>(m, "Environment")
        .def(py::init(&make_environment), py::arg("config_json") = "",
             py::arg("scheme") = "td3", py::arg("seed") = 1)
        .def_property_readonly("state_dim", &env::Environment::state_dim)
        .def_property_readonly("action_dim", &env::Environment::action_dim)
        .def_property_readonly("latency_cap_s", &env::Environment::latency_cap_s)
        .def("reset", &env::Environment::reset)
        .def(
            "step",
            [](env::Environment& e, const std::vector<double>& action) {
                return step_to_dict(e.step(action));
            },
            py::arg("action"));

    m.def(
        "decode_action",
        [](const std::vector<double>& raw, std::size_t devices, std::size_t elements,
           bool equal_bandwidth) {
            env::DecodeOptions opts;
            opts.equal_bandwidth = equal_bandwidth;
            const auto result = env::decode_action(raw, devices, elements, opts);
            py::dict d;
            d["selection"] = result.decision.selection.flags;
            d["bandwidth"] = result.decision.alloc.coeff;
            d["phases"] = result.decision.ris.phases;
            d["clipped"] = result.clipped_entries;
            return d;
        },
        py::arg("raw"), py::arg("devices"), py::arg("ris_elements"),
        py::arg("equal_bandwidth") = false);

    // ---- config and schemes ----
    m.def("default_config_json", [] { return exp::SystemConfig{}.to_json_string(); });
    m.def(
        "config_hash",
        [](const std::string& text) { return config_from_json(text).hash(); },
        py::arg("config_json"));
    m.def(
        "validate_config",
        [](const std::string& text) {
            config_from_json(text);
            return true;
        },
        py::arg("config_json"));

    m.def(
        "run_scheme",
        [](const std::string& config_json, const std::string& scheme, std::uint64_t seed,
           const std::string& checkpoint_path) {
            const auto cfg = config_from_json(config_json);
            const auto s = exp::scheme_from_name(scheme);
            if (!s) throw std::invalid_argument("unknown scheme: " + scheme);
            const auto outcome =
                exp::run_scheme(cfg, *s, seed,
                                checkpoint_path.empty() ? nullptr : &checkpoint_path);
            py::dict d;
            d["scheme"] = exp::scheme_name(outcome.scheme);
            d["seed"] = outcome.seed;
            d["config_hash"] = outcome.config_hash;
            d["episode_rewards"] = outcome.episode_rewards;
            d["episode_latencies"] = outcome.episode_latencies;
            d["eval_mean_reward"] = outcome.eval.mean_reward;
            d["eval_mean_latency_s"] = outcome.eval.mean_latency_s;
            d["eval_feasible_fraction"] = outcome.eval.feasible_fraction;
            return d;
        },
        py::arg("config_json"), py::arg("scheme") = "td3", py::arg("seed") = 1,
        py::arg("checkpoint_path") = "",
        "train (or roll out) one scheme and evaluate it greedily");

    m.def(
        "exhaustive_solve",
        [](const std::string& config_json, std::uint64_t seed, int phase_levels,
           int bandwidth_points) {
            const auto cfg = config_from_json(config_json);
            auto params = exp::make_env_params(cfg, exp::make_geometry(cfg, seed));
            env::EnvOptions options;
            options.freeze_channels = true;
            env::Environment environment(params, options, seed);
            const auto instance = environment.instance_snapshot();
            oracle::GridSpec grid;
            grid.phase_levels = phase_levels;
            grid.bandwidth_points = bandwidth_points;
            const auto result = oracle::exhaustive_solve(instance, grid);
            py::dict d;
            d["feasible"] = result.feasible;
            d["latency_s"] = result.latency_s;
            d["enumerated"] = result.enumerated;
            d["selection"] = result.decision.selection.flags;
            d["bandwidth"] = result.decision.alloc.coeff;
            d["phases"] = result.decision.ris.phases;
            return d;
        },
        py::arg("config_json"), py::arg("seed") = 1, py::arg("phase_levels") = 16,
        py::arg("bandwidth_points") = 21,
        "brute-force optimum of a frozen tiny instance");

    // ---- networks ----
    py::class_<nn::Mlp>(m, "Mlp")
        .def(py::init([](const std::vector<std::size_t>& sizes, bool tanh_output,
                         std::uint64_t seed) {
                 Rng rng(seed);
                 return nn::Mlp(sizes,
                                tanh_output ? nn::OutputActivation::tanh_bounded
                                            : nn::OutputActivation::linear,
                                rng);
             }),
             py::arg("sizes"), py::arg("tanh_output") = false, py::arg("seed") = 1)
        .def("forward", &nn::Mlp::forward_one, py::arg("input"))
        .def("save", &nn::Mlp::save_file, py::arg("path"))
        .def_static("load", &nn::Mlp::load_file, py::arg("path"))
        .def_property_readonly("layer_sizes", &nn::Mlp::layer_sizes);
}
