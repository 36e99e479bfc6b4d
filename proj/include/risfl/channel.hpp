#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "risfl/rng.hpp"

namespace risfl::channel {

using Complex = std::complex<double>;
using ComplexVec = std::vector<Complex>;

constexpr double kTwoPi = 6.28318530717958647692;

// One wireless link: reference path loss at 1 m (dB), node distance,
// path-loss exponent, Rician factor, and the line-of-sight departure angle
// used for the deterministic steering component.
struct ChannelParams {
    double ref_path_loss_db = -30.0;
    double distance_m = 1.0;
    double path_loss_exp = 2.2;
    double rician_k = 0.0;
    double los_angle_rad = 0.0;

    void validate() const;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

double distance(const Vec2& a, const Vec2& b);
double bearing(const Vec2& from, const Vec2& to);

// Node layout inside a square arena. Device positions are drawn once per
// experiment seed and then frozen for the whole run.
struct Geometry {
    double arena_m = 60.0;
    Vec2 bs;
    Vec2 ris;
    Vec2 eve;
    std::vector<Vec2> devices;

    void validate() const;
};

// Phase shift of each reflecting element, stored in [0, 2*pi).
struct RisConfig {
    std::vector<double> phases;

    static RisConfig identity(std::size_t elements) {
        return RisConfig{std::vector<double>(elements, 0.0)};
    }
    std::size_t elements() const { return phases.size(); }
    void validate() const;
};

double wrap_phase(double theta);  // into [0, 2*pi)

// All channel coefficients of one time slot: RIS->BS, each device->RIS,
// each device->BS (scalar), RIS->Eve, each device->Eve (scalar).
struct ChannelRealization {
    ComplexVec ris_to_bs;
    std::vector<ComplexVec> device_to_ris;
    std::vector<Complex> device_to_bs;
    ComplexVec ris_to_eve;
    std::vector<Complex> device_to_eve;

    std::size_t devices() const { return device_to_ris.size(); }
    std::size_t elements() const { return ris_to_bs.size(); }
};

// Rician draw with large-scale path loss:
//   sqrt(eps * d^-beta) * ( sqrt(k/(k+1)) * los + sqrt(1/(k+1)) * nlos )
// where nlos entries are i.i.d. CN(0,1) and los is the unit-modulus
// uniform-linear-array steering vector exp(j*pi*m*sin(angle)).
ComplexVec draw_channel(const ChannelParams& params, std::size_t length, Rng& rng);

// h_rx^H * diag(exp(j*theta)) * h_tx + h_direct
Complex effective_gain(const ComplexVec& h_ris_rx, const RisConfig& ris,
                       const ComplexVec& h_tx_ris, Complex h_direct);

// Co-phasing for a single link: aligns every reflected term with the direct
// one, maximizing |effective_gain|. Test fixture and upper-bound reference.
RisConfig optimal_single_link_phases(const ComplexVec& h_ris_rx,
                                     const ComplexVec& h_tx_ris, Complex h_direct);

// Per-link-class parameters used to assemble a full realization.
struct LinkBudget {
    double ref_path_loss_db = -30.0;
    double beta_device_ris = 2.2;
    double beta_ris_bs = 2.2;
    double beta_ris_eve = 2.2;
    double beta_device_bs = 3.6;
    double beta_device_eve = 3.6;
    double k_device_ris = 4.0;
    double k_ris_bs = 4.0;
    double k_ris_eve = 4.0;
    double k_device_bs = 0.0;
    double k_device_eve = 0.0;
};

ChannelParams link_params(const LinkBudget& budget, const Vec2& from, const Vec2& to,
                          double beta, double rician_k);

ChannelRealization draw_realization(const Geometry& geom, const LinkBudget& budget,
                                    std::size_t elements, Rng& rng);

}  // namespace risfl::channel
