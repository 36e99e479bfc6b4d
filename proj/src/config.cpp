#include "risfl/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace risfl::exp {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw std::invalid_argument(message); }

// Reads known keys from an object and rejects anything unexpected so typos
// surface at load time instead of silently using defaults.
class Section {
  public:
    Section(json j, std::string name) : j_(std::move(j)), name_(std::move(name)) {
        if (!j_.is_object()) fail("config section '" + name_ + "' must be an object");
    }

    ~Section() = default;

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            fail("config field '" + name_ + "." + key + "' has the wrong type");
        }
    }

    void get_pos(const char* key, std::array<double, 2>& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_array() || v.size() != 2) {
            fail("config field '" + name_ + "." + key + "' must be [x, y]");
        }
        out = {v[0].get<double>(), v[1].get<double>()};
    }

    json subsection(const char* key) {
        seen_.insert(key);
        if (!j_.contains(key)) return json::object();
        return j_.at(key);
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) {
                fail("unknown config key '" + name_ + "." + it.key() + "'");
            }
        }
    }

  private:
    json j_;
    std::string name_;
    std::set<std::string> seen_;
};

void check_positive(double v, const char* field) {
    if (!(v > 0.0)) fail(std::string("config field '") + field + "' must be > 0");
}

void check_non_negative(double v, const char* field) {
    if (!(v >= 0.0)) fail(std::string("config field '") + field + "' must be >= 0");
}

json to_json(const SystemConfig& c) {
    json j;
    j["scenario"] = {
        {"devices", c.devices},
        {"ris_elements", c.ris_elements},
        {"arena_m", c.arena_m},
        {"bs_pos", c.bs_pos},
        {"ris_pos", c.ris_pos},
        {"eve_pos", c.eve_pos},
        {"bandwidth_hz", c.bandwidth_hz},
        {"secrecy_min_bps", c.secrecy_min_bps},
        {"noise_bs_w", c.noise_bs_w},
        {"noise_eve_w", c.noise_eve_w},
    };
    j["pathloss"] = {
        {"ref_db", c.budget.ref_path_loss_db},
        {"exp_device_ris", c.budget.beta_device_ris},
        {"exp_ris_bs", c.budget.beta_ris_bs},
        {"exp_ris_eve", c.budget.beta_ris_eve},
        {"exp_device_bs", c.budget.beta_device_bs},
        {"exp_device_eve", c.budget.beta_device_eve},
        {"rician_device_ris", c.budget.k_device_ris},
        {"rician_ris_bs", c.budget.k_ris_bs},
        {"rician_ris_eve", c.budget.k_ris_eve},
        {"rician_device_bs", c.budget.k_device_bs},
        {"rician_device_eve", c.budget.k_device_eve},
    };
    j["device"] = {
        {"model_bits", c.model_bits},
        {"cpu_hz", c.cpu_hz},
        {"cycles_per_datum", c.cycles_per_datum},
        {"data_size", c.data_size},
        {"tx_power_w", c.tx_power_w},
    };
    j["convergence"] = {
        {"mu", c.conv.mu},
        {"delta", c.conv.delta},
        {"f0", c.conv.f0},
        {"f_star", c.conv.f_star},
        {"rounds", c.conv.rounds},
        {"epsilon", c.conv.epsilon},
        {"alpha_fl", c.conv.alpha_fl},
    };
    j["penalty"] = {
        {"base_bandwidth", c.penalty.base_bandwidth},
        {"base_accuracy", c.penalty.base_accuracy},
        {"base_secrecy", c.penalty.base_secrecy},
        {"scale_bandwidth", c.penalty.scale_bandwidth},
        {"scale_accuracy", c.penalty.scale_accuracy},
        {"scale_secrecy", c.penalty.scale_secrecy},
    };
    j["agent"] = {
        {"actor_lr", c.td3.actor_lr},
        {"critic_lr", c.td3.critic_lr},
        {"gamma", c.td3.gamma},
        {"tau", c.td3.tau},
        {"batch_size", c.td3.batch_size},
        {"buffer_capacity", c.td3.buffer_capacity},
        {"explore_noise", c.td3.explore_noise},
        {"target_noise", c.td3.target_noise},
        {"noise_clip", c.td3.noise_clip},
        {"policy_delay", c.td3.policy_delay},
        {"warmup_steps", c.td3.warmup_steps},
        {"actor_hidden", c.td3.actor_hidden},
        {"critic_hidden", c.td3.critic_hidden},
        {"use_adam", c.td3.use_adam},
    };
    j["run"] = {
        {"episode_steps", c.episode_steps},
        {"episodes", c.episodes},
        {"eval_episodes", c.eval_episodes},
        {"state_gain_scale", c.state_gain_scale},
        {"bandwidth_normalizer", c.bandwidth_normalizer},
    };
    return j;
}

SystemConfig from_json(const json& j) {
    SystemConfig c;
    if (j.is_null()) return c;
    if (!j.is_object()) fail("config root must be a JSON object");

    Section root(j, "root");
    {
        Section s(root.subsection("scenario"), "scenario");
        s.get("devices", c.devices);
        s.get("ris_elements", c.ris_elements);
        s.get("arena_m", c.arena_m);
        s.get_pos("bs_pos", c.bs_pos);
        s.get_pos("ris_pos", c.ris_pos);
        s.get_pos("eve_pos", c.eve_pos);
        s.get("bandwidth_hz", c.bandwidth_hz);
        s.get("secrecy_min_bps", c.secrecy_min_bps);
        s.get("noise_bs_w", c.noise_bs_w);
        s.get("noise_eve_w", c.noise_eve_w);
        s.finish();
    }
    {
        Section s(root.subsection("pathloss"), "pathloss");
        s.get("ref_db", c.budget.ref_path_loss_db);
        s.get("exp_device_ris", c.budget.beta_device_ris);
        s.get("exp_ris_bs", c.budget.beta_ris_bs);
        s.get("exp_ris_eve", c.budget.beta_ris_eve);
        s.get("exp_device_bs", c.budget.beta_device_bs);
        s.get("exp_device_eve", c.budget.beta_device_eve);
        s.get("rician_device_ris", c.budget.k_device_ris);
        s.get("rician_ris_bs", c.budget.k_ris_bs);
        s.get("rician_ris_eve", c.budget.k_ris_eve);
        s.get("rician_device_bs", c.budget.k_device_bs);
        s.get("rician_device_eve", c.budget.k_device_eve);
        s.finish();
    }
    {
        Section s(root.subsection("device"), "device");
        s.get("model_bits", c.model_bits);
        s.get("cpu_hz", c.cpu_hz);
        s.get("cycles_per_datum", c.cycles_per_datum);
        s.get("data_size", c.data_size);
        s.get("tx_power_w", c.tx_power_w);
        s.finish();
    }
    {
        Section s(root.subsection("convergence"), "convergence");
        s.get("mu", c.conv.mu);
        s.get("delta", c.conv.delta);
        s.get("f0", c.conv.f0);
        s.get("f_star", c.conv.f_star);
        s.get("rounds", c.conv.rounds);
        s.get("epsilon", c.conv.epsilon);
        s.get("alpha_fl", c.conv.alpha_fl);
        s.finish();
    }
    {
        Section s(root.subsection("penalty"), "penalty");
        s.get("base_bandwidth", c.penalty.base_bandwidth);
        s.get("base_accuracy", c.penalty.base_accuracy);
        s.get("base_secrecy", c.penalty.base_secrecy);
        s.get("scale_bandwidth", c.penalty.scale_bandwidth);
        s.get("scale_accuracy", c.penalty.scale_accuracy);
        s.get("scale_secrecy", c.penalty.scale_secrecy);
        s.finish();
    }
    {
        Section s(root.subsection("agent"), "agent");
        s.get("actor_lr", c.td3.actor_lr);
        s.get("critic_lr", c.td3.critic_lr);
        s.get("gamma", c.td3.gamma);
        s.get("tau", c.td3.tau);
        s.get("batch_size", c.td3.batch_size);
        s.get("buffer_capacity", c.td3.buffer_capacity);
        s.get("explore_noise", c.td3.explore_noise);
        s.get("target_noise", c.td3.target_noise);
        s.get("noise_clip", c.td3.noise_clip);
        s.get("policy_delay", c.td3.policy_delay);
        s.get("warmup_steps", c.td3.warmup_steps);
        s.get("actor_hidden", c.td3.actor_hidden);
        s.get("critic_hidden", c.td3.critic_hidden);
        s.get("use_adam", c.td3.use_adam);
        s.finish();
    }
    {
        Section s(root.subsection("run"), "run");
        s.get("episode_steps", c.episode_steps);
        s.get("episodes", c.episodes);
        s.get("eval_episodes", c.eval_episodes);
        s.get("state_gain_scale", c.state_gain_scale);
        s.get("bandwidth_normalizer", c.bandwidth_normalizer);
        s.finish();
    }
    root.finish();
    c.validate();
    return c;
}

}  // namespace

void SystemConfig::validate() const {
    if (devices < 2) fail("config field 'scenario.devices' must be >= 2");
    if (ris_elements < 1) fail("config field 'scenario.ris_elements' must be >= 1");
    check_positive(arena_m, "scenario.arena_m");
    check_positive(bandwidth_hz, "scenario.bandwidth_hz");
    check_non_negative(secrecy_min_bps, "scenario.secrecy_min_bps");
    check_positive(noise_bs_w, "scenario.noise_bs_w");
    check_positive(noise_eve_w, "scenario.noise_eve_w");
    check_positive(model_bits, "device.model_bits");
    check_positive(cpu_hz, "device.cpu_hz");
    check_positive(cycles_per_datum, "device.cycles_per_datum");
    check_positive(data_size, "device.data_size");
    check_positive(tx_power_w, "device.tx_power_w");
    check_positive(budget.beta_device_ris, "pathloss.exp_device_ris");
    check_positive(budget.beta_ris_bs, "pathloss.exp_ris_bs");
    check_positive(budget.beta_ris_eve, "pathloss.exp_ris_eve");
    check_positive(budget.beta_device_bs, "pathloss.exp_device_bs");
    check_positive(budget.beta_device_eve, "pathloss.exp_device_eve");
    check_non_negative(budget.k_device_ris, "pathloss.rician_device_ris");
    check_non_negative(budget.k_ris_bs, "pathloss.rician_ris_bs");
    check_non_negative(budget.k_ris_eve, "pathloss.rician_ris_eve");
    check_non_negative(budget.k_device_bs, "pathloss.rician_device_bs");
    check_non_negative(budget.k_device_eve, "pathloss.rician_device_eve");
    check_positive(state_gain_scale, "run.state_gain_scale");
    if (episode_steps < 1) fail("config field 'run.episode_steps' must be >= 1");
    if (episodes < 0) fail("config field 'run.episodes' must be >= 0");
    if (eval_episodes < 1) fail("config field 'run.eval_episodes' must be >= 1");
    try {
        conv.validate();
    } catch (const std::exception& e) {
        fail(std::string("config section 'convergence': ") + e.what());
    }
    try {
        td3.validate();
    } catch (const std::exception& e) {
        fail(std::string("config section 'agent': ") + e.what());
    }
    auto inside = [this](const std::array<double, 2>& p, const char* field) {
        if (p[0] < 0.0 || p[0] > arena_m || p[1] < 0.0 || p[1] > arena_m) {
            fail(std::string("config field 'scenario.") + field + "' outside the arena");
        }
    };
    inside(bs_pos, "bs_pos");
    inside(ris_pos, "ris_pos");
    inside(eve_pos, "eve_pos");
}

std::uint64_t SystemConfig::hash() const {
    const std::string dump = to_json(*this).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : dump) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string SystemConfig::to_json_string(int indent) const {
    return to_json(*this).dump(indent);
}

SystemConfig SystemConfig::from_json_string(const std::string& text) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return SystemConfig{};
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(std::string("config is not valid JSON: ") + e.what());
    }
    return from_json(j);
}

SystemConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail("cannot open config file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return SystemConfig::from_json_string(buf.str());
}

void save_config(const SystemConfig& cfg, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write config file: " + path);
    f << cfg.to_json_string() << "\n";
}

channel::Geometry make_geometry(const SystemConfig& cfg, std::uint64_t seed) {
    channel::Geometry g;
    g.arena_m = cfg.arena_m;
    g.bs = {cfg.bs_pos[0], cfg.bs_pos[1]};
    g.ris = {cfg.ris_pos[0], cfg.ris_pos[1]};
    g.eve = {cfg.eve_pos[0], cfg.eve_pos[1]};
    Rng rng = Rng(seed).fork(0x6E0);
    g.devices.resize(cfg.devices);
    for (auto& d : g.devices) {
        d.x = rng.uniform(0.0, cfg.arena_m);
        d.y = rng.uniform(0.0, cfg.arena_m);
    }
    g.validate();
    return g;
}

phy::DevicePool make_pool(const SystemConfig& cfg) {
    phy::DevicePool pool;
    const auto k = static_cast<std::size_t>(cfg.devices);
    pool.cycles_per_datum.assign(k, cfg.cycles_per_datum);
    pool.data_size.assign(k, cfg.data_size);
    pool.cpu_hz.assign(k, cfg.cpu_hz);
    pool.tx_power_w.assign(k, cfg.tx_power_w);
    pool.model_bits.assign(k, cfg.model_bits);
    return pool;
}

env::EnvParams make_env_params(const SystemConfig& cfg, channel::Geometry geometry) {
    env::EnvParams p;
    p.geometry = std::move(geometry);
    p.budget = cfg.budget;
    p.pool = make_pool(cfg);
    p.noise = {cfg.noise_bs_w, cfg.noise_eve_w};
    p.system_bandwidth_hz = cfg.bandwidth_hz;
    p.ris_elements = static_cast<std::size_t>(cfg.ris_elements);
    p.conv = cfg.conv;
    p.secrecy_min_bps = cfg.secrecy_min_bps;
    p.penalty = cfg.penalty;
    p.episode_steps = cfg.episode_steps;
    p.state_gain_scale = cfg.state_gain_scale;
    p.bandwidth_normalizer = cfg.bandwidth_normalizer;
    return p;
}

}  // namespace risfl::exp
