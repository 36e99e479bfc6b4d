#include "risfl/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace risfl::channel {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(name) + " must be finite");
    }
}

}  // namespace

void ChannelParams::validate() const {
    require_finite(ref_path_loss_db, "ref_path_loss_db");
    require_finite(distance_m, "distance_m");
    require_finite(path_loss_exp, "path_loss_exp");
    require_finite(rician_k, "rician_k");
    require_finite(los_angle_rad, "los_angle_rad");
    if (distance_m <= 0.0) throw std::invalid_argument("distance_m must be > 0");
    if (path_loss_exp <= 0.0) throw std::invalid_argument("path_loss_exp must be > 0");
    if (rician_k < 0.0) throw std::invalid_argument("rician_k must be >= 0");
}

double distance(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

double bearing(const Vec2& from, const Vec2& to) {
    return std::atan2(to.y - from.y, to.x - from.x);
}

void Geometry::validate() const {
    if (arena_m <= 0.0) throw std::invalid_argument("arena_m must be > 0");
    if (devices.size() < 2) throw std::invalid_argument("need at least 2 devices");
    auto inside = [this](const Vec2& p) {
        return p.x >= 0.0 && p.x <= arena_m && p.y >= 0.0 && p.y <= arena_m;
    };
    if (!inside(bs) || !inside(ris) || !inside(eve)) {
        throw std::invalid_argument("bs/ris/eve positions must lie inside the arena");
    }
    for (const auto& d : devices) {
        if (!inside(d)) throw std::invalid_argument("device position outside the arena");
    }
}

double wrap_phase(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
    return t;
}

void RisConfig::validate() const {
    for (double p : phases) {
        if (!(p >= 0.0 && p <= kTwoPi)) {
            throw std::invalid_argument("phase outside [0, 2*pi]");
        }
    }
}

ComplexVec draw_channel(const ChannelParams& params, std::size_t length, Rng& rng) {
    params.validate();
    if (length < 1) throw std::invalid_argument("length must be >= 1");

    const double eps_linear = std::pow(10.0, params.ref_path_loss_db / 10.0);
    const double amplitude =
        std::sqrt(eps_linear * std::pow(params.distance_m, -params.path_loss_exp));
    const double los_weight = std::sqrt(params.rician_k / (params.rician_k + 1.0));
    const double nlos_weight = std::sqrt(1.0 / (params.rician_k + 1.0));
    const double sin_angle = std::sin(params.los_angle_rad);

    ComplexVec h(length);
    for (std::size_t m = 0; m < length; ++m) {
        const double steer = 3.14159265358979323846 * static_cast<double>(m) * sin_angle;
        const Complex los = std::polar(1.0, steer);
        h[m] = amplitude * (los_weight * los + nlos_weight * rng.cnormal());
    }
    return h;
}

Complex effective_gain(const ComplexVec& h_ris_rx, const RisConfig& ris,
                       const ComplexVec& h_tx_ris, Complex h_direct) {
    const std::size_t m = ris.elements();
    if (h_ris_rx.size() != m || h_tx_ris.size() != m) {
        throw std::invalid_argument("effective_gain: vector lengths must match RIS size");
    }
    Complex sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sum += std::conj(h_ris_rx[i]) * std::polar(1.0, ris.phases[i]) * h_tx_ris[i];
    }
    return sum + h_direct;
}

RisConfig optimal_single_link_phases(const ComplexVec& h_ris_rx,
                                     const ComplexVec& h_tx_ris, Complex h_direct) {
    if (h_ris_rx.size() != h_tx_ris.size()) {
        throw std::invalid_argument("optimal_single_link_phases: length mismatch");
    }
    const double target = std::arg(h_direct);
    RisConfig ris;
    ris.phases.resize(h_ris_rx.size());
    for (std::size_t m = 0; m < h_ris_rx.size(); ++m) {
        const double term = std::arg(std::conj(h_ris_rx[m]) * h_tx_ris[m]);
        ris.phases[m] = wrap_phase(target - term);
    }
    return ris;
}

ChannelParams link_params(const LinkBudget& budget, const Vec2& from, const Vec2& to,
                          double beta, double rician_k) {
    ChannelParams p;
    p.ref_path_loss_db = budget.ref_path_loss_db;
    p.distance_m = distance(from, to);
    p.path_loss_exp = beta;
    p.rician_k = rician_k;
    p.los_angle_rad = bearing(from, to);
    return p;
}

ChannelRealization draw_realization(const Geometry& geom, const LinkBudget& budget,
                                    std::size_t elements, Rng& rng) {
    const std::size_t k = geom.devices.size();
    ChannelRealization out;
    out.ris_to_bs = draw_channel(
        link_params(budget, geom.ris, geom.bs, budget.beta_ris_bs, budget.k_ris_bs),
        elements, rng);
    out.ris_to_eve = draw_channel(
        link_params(budget, geom.ris, geom.eve, budget.beta_ris_eve, budget.k_ris_eve),
        elements, rng);
    out.device_to_ris.resize(k);
    out.device_to_bs.resize(k);
    out.device_to_eve.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        const Vec2& dev = geom.devices[i];
        out.device_to_ris[i] = draw_channel(
            link_params(budget, dev, geom.ris, budget.beta_device_ris, budget.k_device_ris),
            elements, rng);
        out.device_to_bs[i] = draw_channel(
            link_params(budget, dev, geom.bs, budget.beta_device_bs, budget.k_device_bs), 1,
            rng)[0];
        out.device_to_eve[i] = draw_channel(
            link_params(budget, dev, geom.eve, budget.beta_device_eve, budget.k_device_eve),
            1, rng)[0];
    }
    return out;
}

}  // namespace risfl::channel
