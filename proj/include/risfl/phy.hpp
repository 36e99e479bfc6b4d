#pragma once

#include <cstddef>
#include <vector>

#include "risfl/channel.hpp"

namespace risfl::phy {

// Per-device compute and radio constants. Index-aligned vectors, one entry
// per device.
struct DevicePool {
    std::vector<double> cycles_per_datum;  // CPU cycles per data unit
    std::vector<double> data_size;         // local data units
    std::vector<double> cpu_hz;            // CPU frequency
    std::vector<double> tx_power_w;        // transmit power, participants and jammers
    std::vector<double> model_bits;        // uploaded model size

    std::size_t devices() const { return cpu_hz.size(); }
    void validate() const;
};

// Binary participation vector. Devices with flag 1 upload their model;
// devices with flag 0 actively transmit jamming signals.
struct Selection {
    std::vector<std::uint8_t> flags;

    static Selection from_flags(std::vector<std::uint8_t> f) { return Selection{std::move(f)}; }
    std::size_t devices() const { return flags.size(); }
    bool is_participant(std::size_t k) const { return flags[k] != 0; }
    std::size_t participant_count() const;
    std::vector<std::size_t> participants() const;
    std::vector<std::size_t> jammers() const;
};

// Bandwidth coefficients, index-aligned with the device pool; entries of
// non-participants are zero. system_bandwidth_hz is the shared total.
struct BandwidthAlloc {
    std::vector<double> coeff;
    double system_bandwidth_hz = 0.0;

    double sum() const;
    void validate() const;
};

struct NoisePowers {
    double bs_w = 0.0;
    double eve_w = 0.0;
    void validate() const;
};

struct DeviceReport {
    std::size_t device = 0;
    double rate_bs_bps = 0.0;
    double rate_eve_bps = 0.0;
    double secrecy_bps = 0.0;
    double t_local_s = 0.0;
    double t_upload_s = 0.0;
    double t_total_s = 0.0;
};

// One evaluated round: per-participant rates and latencies plus the
// round latency max. An empty participant set yields an infinite round
// latency sentinel rather than an error so reward paths never throw.
struct EvalReport {
    std::vector<DeviceReport> rows;
    double round_latency_s = 0.0;
    double bandwidth_sum = 0.0;
    double slack_bandwidth = 0.0;  // 1 - sum(b)
    bool selection_nonempty = false;
};

// Achievable uplink rate of participant k toward the BS: allocated bandwidth
// times log2(1 + SINR), where the interference sum runs over all jammers.
double rate_to_bs(std::size_t k, const Selection& sel, const BandwidthAlloc& alloc,
                  const channel::RisConfig& ris, const channel::ChannelRealization& chans,
                  const DevicePool& pool, const NoisePowers& noise);

// Same structure toward the eavesdropper, on the participant's sub-band.
double rate_to_eve(std::size_t k, const Selection& sel, const BandwidthAlloc& alloc,
                   const channel::RisConfig& ris, const channel::ChannelRealization& chans,
                   const DevicePool& pool, const NoisePowers& noise);

// max(0, rate_to_bs - rate_to_eve)
double secrecy_rate(std::size_t k, const Selection& sel, const BandwidthAlloc& alloc,
                    const channel::RisConfig& ris, const channel::ChannelRealization& chans,
                    const DevicePool& pool, const NoisePowers& noise);

// cycles * data / frequency
double local_latency(std::size_t k, const DevicePool& pool);

// model bits / uplink rate; +infinity when the rate is zero
double upload_latency_from_rate(double model_bits, double rate_bps);

EvalReport evaluate(const Selection& sel, const BandwidthAlloc& alloc,
                    const channel::RisConfig& ris, const channel::ChannelRealization& chans,
                    const DevicePool& pool, const NoisePowers& noise);

}  // namespace risfl::phy
