#include "risfl/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace risfl::env {

namespace {

double softplus(double x) { return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0); }

double clip(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

}  // namespace

DecodeResult decode_action(std::span<const double> raw, std::size_t devices,
                           std::size_t ris_elements, const DecodeOptions& opts) {
    const std::size_t expected = 2 * devices + ris_elements;
    if (raw.size() != expected) {
        throw std::invalid_argument("decode_action: raw action has wrong dimension");
    }

    DecodeResult out;
    std::vector<double> r(raw.begin(), raw.end());
    for (double& x : r) {
        if (x < -1.0 || x > 1.0) {
            x = clip(x, -1.0, 1.0);
            ++out.clipped_entries;
        }
    }

    auto& decision = out.decision;
    decision.selection.flags.resize(devices);
    for (std::size_t k = 0; k < devices; ++k) {
        decision.selection.flags[k] = r[k] > 0.0 ? 1 : 0;
    }

    decision.alloc.coeff.assign(devices, 0.0);
    const auto participants = decision.selection.participants();
    if (!participants.empty()) {
        if (opts.equal_bandwidth) {
            const double share = 1.0 / static_cast<double>(participants.size());
            for (std::size_t k : participants) decision.alloc.coeff[k] = share;
        } else if (opts.bandwidth_normalizer) {
            double denom = 1.0;
            for (std::size_t k : participants) denom += softplus(r[devices + k]);
            for (std::size_t k : participants) {
                decision.alloc.coeff[k] = softplus(r[devices + k]) / denom;
            }
        } else {
            // ablation path: plain box map, the budget constraint can break
            for (std::size_t k : participants) {
                decision.alloc.coeff[k] = 0.5 * (r[devices + k] + 1.0);
            }
        }
    }

    decision.ris.phases.resize(ris_elements);
    for (std::size_t m = 0; m < ris_elements; ++m) {
        const double theta = 3.14159265358979323846 * (r[2 * devices + m] + 1.0);
        decision.ris.phases[m] = std::min(theta, channel::kTwoPi);
    }
    return out;
}

Environment::Environment(EnvParams params, EnvOptions options, std::uint64_t seed)
    : params_(std::move(params)),
      options_(options),
      channel_rng_(Rng(seed).fork(0x11)),
      phase_rng_(Rng(seed).fork(0x22)),
      previous_phases_(channel::RisConfig::identity(params_.ris_elements)) {
    params_.geometry.validate();
    params_.pool.validate();
    params_.noise.validate();
    if (params_.geometry.devices.size() != params_.pool.devices()) {
        throw std::invalid_argument("geometry/pool device counts differ");
    }

    double max_local = 0.0;
    double max_bits = 0.0;
    for (std::size_t k = 0; k < devices(); ++k) {
        max_local = std::max(max_local, phy::local_latency(k, params_.pool));
        max_bits = std::max(max_bits, params_.pool.model_bits[k]);
    }
    // Reference pessimistic-but-feasible round: equal bandwidth split at one
    // bit per second per hertz. Ten times that caps the latency charged to
    // the reward so critics stay bounded; anything above it is equally
    // hopeless for the policy.
    const double reference_rate = params_.system_bandwidth_hz / static_cast<double>(devices());
    latency_cap_s_ = 10.0 * (max_local + max_bits / std::max(reference_rate, 1.0));

    if (options_.fixed_channels) {
        options_.freeze_channels = true;
        channels_ = *options_.fixed_channels;
        if (channels_.devices() != devices() || channels_.elements() != params_.ris_elements) {
            throw std::invalid_argument("fixed channel realization has wrong dimensions");
        }
    } else {
        channels_ = channel::draw_realization(params_.geometry, params_.budget,
                                              params_.ris_elements, channel_rng_);
    }
}

void Environment::redraw_channels() {
    if (options_.freeze_channels) return;
    channels_ = channel::draw_realization(params_.geometry, params_.budget,
                                          params_.ris_elements, channel_rng_);
}

std::vector<double> Environment::build_state(double bandwidth_sum) const {
    std::vector<double> s;
    s.reserve(state_dim());
    s.push_back(bandwidth_sum);
    for (std::size_t k = 0; k < devices(); ++k) {
        const auto gain = channel::effective_gain(channels_.ris_to_bs, previous_phases_,
                                                  channels_.device_to_ris[k],
                                                  channels_.device_to_bs[k]);
        s.push_back(gain.real() * params_.state_gain_scale);
        s.push_back(gain.imag() * params_.state_gain_scale);
    }
    return s;
}

std::vector<double> Environment::reset() {
    steps_taken_ = 0;
    previous_bandwidth_sum_ = 0.0;
    previous_phases_ = channel::RisConfig::identity(params_.ris_elements);
    redraw_channels();
    return build_state(0.0);
}

problem::ProblemInstance Environment::instance_snapshot() const {
    problem::ProblemInstance inst;
    inst.pool = params_.pool;
    inst.noise = params_.noise;
    inst.system_bandwidth_hz = params_.system_bandwidth_hz;
    inst.channels = channels_;
    inst.conv = params_.conv;
    inst.secrecy_min_bps = params_.secrecy_min_bps;
    inst.penalty_params = params_.penalty;
    return inst;
}

StepOutcome Environment::step(std::span<const double> raw_action) {
    StepOutcome out;
    out.transition.state = build_state(previous_bandwidth_sum_);

    DecodeOptions dopts;
    dopts.equal_bandwidth = options_.equal_bandwidth;
    dopts.bandwidth_normalizer = params_.bandwidth_normalizer;
    auto decoded = decode_action(raw_action, devices(), params_.ris_elements, dopts);
    out.clipped_entries = decoded.clipped_entries;
    out.decision = std::move(decoded.decision);
    if (options_.random_phase) {
        for (double& theta : out.decision.ris.phases) {
            theta = phase_rng_.uniform(0.0, channel::kTwoPi);
        }
    }
    out.decision.alloc.system_bandwidth_hz = params_.system_bandwidth_hz;

    const auto instance = instance_snapshot();
    out.eval = problem::evaluate_decision(instance, out.decision);
    out.penalty = problem::penalty(instance, out.eval.slacks);
    out.latency_s = std::min(out.eval.report.round_latency_s, latency_cap_s_);

    out.transition.action.assign(raw_action.begin(), raw_action.end());
    for (double& x : out.transition.action) x = clip(x, -1.0, 1.0);
    out.transition.reward = -out.latency_s - out.penalty;

    ++steps_taken_;
    out.transition.done = steps_taken_ >= params_.episode_steps;

    previous_bandwidth_sum_ = out.eval.report.bandwidth_sum;
    previous_phases_ = out.decision.ris;
    redraw_channels();
    out.transition.next_state = build_state(previous_bandwidth_sum_);
    return out;
}

}  // namespace risfl::env
