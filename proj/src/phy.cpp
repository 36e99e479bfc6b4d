#include "risfl/phy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace risfl::phy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(const std::vector<double>& v, const char* name) {
    for (double x : v) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            throw std::invalid_argument(std::string(name) + " entries must be positive");
        }
    }
}

double norm_sq(std::complex<double> z) { return std::norm(z); }

// signal-plus-interference denominator seen at a receiver: sum of jammer
// powers through that receiver's channels plus thermal noise
double interference_plus_noise(const Selection& sel, const channel::RisConfig& ris,
                               const channel::ComplexVec& ris_to_rx,
                               const std::vector<channel::ComplexVec>& device_to_ris,
                               const std::vector<channel::Complex>& device_to_rx,
                               const DevicePool& pool, double noise_w) {
    double sum = noise_w;
    for (std::size_t j = 0; j < sel.devices(); ++j) {
        if (sel.is_participant(j)) continue;
        const auto gain =
            channel::effective_gain(ris_to_rx, ris, device_to_ris[j], device_to_rx[j]);
        sum += pool.tx_power_w[j] * norm_sq(gain);
    }
    return sum;
}

double rate_common(std::size_t k, const Selection& sel, const BandwidthAlloc& alloc,
                   const channel::RisConfig& ris, const channel::ChannelRealization& chans,
                   const DevicePool& pool, const channel::ComplexVec& ris_to_rx,
                   const std::vector<channel::Complex>& device_to_rx, double noise_w) {
    if (k >= sel.devices() || !sel.is_participant(k)) {
        throw std::domain_error("rate requested for a device outside the participant set");
    }
    const auto gain =
        channel::effective_gain(ris_to_rx, ris, chans.device_to_ris[k], device_to_rx[k]);
    const double signal = pool.tx_power_w[k] * norm_sq(gain);
    const double denom = interference_plus_noise(sel, ris, ris_to_rx, chans.device_to_ris,
                                                 device_to_rx, pool, noise_w);
    const double sinr = signal / denom;
    return alloc.coeff[k] * alloc.system_bandwidth_hz * std::log2(1.0 + sinr);
}

}  // namespace

void DevicePool::validate() const {
    const std::size_t k = devices();
    if (k == 0) throw std::invalid_argument("device pool is empty");
    if (cycles_per_datum.size() != k || data_size.size() != k || tx_power_w.size() != k ||
        model_bits.size() != k) {
        throw std::invalid_argument("device pool vectors must have equal length");
    }
    require_positive(cycles_per_datum, "cycles_per_datum");
    require_positive(data_size, "data_size");
    require_positive(cpu_hz, "cpu_hz");
    require_positive(tx_power_w, "tx_power_w");
    require_positive(model_bits, "model_bits");
}

std::size_t Selection::participant_count() const {
    std::size_t n = 0;
    for (auto f : flags) n += (f != 0);
    return n;
}

std::vector<std::size_t> Selection::participants() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < flags.size(); ++k) {
        if (flags[k]) out.push_back(k);
    }
    return out;
}

std::vector<std::size_t> Selection::jammers() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < flags.size(); ++k) {
        if (!flags[k]) out.push_back(k);
    }
    return out;
}

double BandwidthAlloc::sum() const {
    double s = 0.0;
    for (double b : coeff) s += b;
    return s;
}

void BandwidthAlloc::validate() const {
    if (!(system_bandwidth_hz > 0.0)) {
        throw std::invalid_argument("system_bandwidth_hz must be positive");
    }
    for (double b : coeff) {
        if (!(b >= 0.0) || !std::isfinite(b)) {
            throw std::invalid_argument("bandwidth coefficients must be >= 0 and finite");
        }
    }
}

void NoisePowers::validate() const {
    if (!(bs_w > 0.0) || !(eve_w > 0.0)) {
        throw std::invalid_argument("noise powers must be strictly positive");
    }
}

double rate_to_bs(std::size_t k, const Selection& sel, const BandwidthAlloc& alloc,
                  const channel::RisConfig& ris, const channel::ChannelRealization& chans,
                  const DevicePool& pool, const NoisePowers& noise) {
    return rate_common(k, sel, alloc, ris, chans, pool, chans.ris_to_bs, chans.device_to_bs,
                       noise.bs_w);
}

double rate_to_eve(std::size_t k, const Selection& sel, const BandwidthAlloc& alloc,
                   const channel::RisConfig& ris, const channel::ChannelRealization& chans,
                   const DevicePool& pool, const NoisePowers& noise) {
    return rate_common(k, sel, alloc, ris, chans, pool, chans.ris_to_eve, chans.device_to_eve,
                       noise.eve_w);
}

double secrecy_rate(std::size_t k, const Selection& sel, const BandwidthAlloc& alloc,
                    const channel::RisConfig& ris, const channel::ChannelRealization& chans,
                    const DevicePool& pool, const NoisePowers& noise) {
    const double rb = rate_to_bs(k, sel, alloc, ris, chans, pool, noise);
    const double re = rate_to_eve(k, sel, alloc, ris, chans, pool, noise);
    return std::max(0.0, rb - re);
}

double local_latency(std::size_t k, const DevicePool& pool) {
    if (k >= pool.devices()) throw std::domain_error("device index out of range");
    return pool.cycles_per_datum[k] * pool.data_size[k] / pool.cpu_hz[k];
}

double upload_latency_from_rate(double model_bits, double rate_bps) {
    if (rate_bps <= 0.0) return kInf;
    return model_bits / rate_bps;
}

EvalReport evaluate(const Selection& sel, const BandwidthAlloc& alloc,
                    const channel::RisConfig& ris, const channel::ChannelRealization& chans,
                    const DevicePool& pool, const NoisePowers& noise) {
    EvalReport report;
    report.bandwidth_sum = alloc.sum();
    report.slack_bandwidth = 1.0 - report.bandwidth_sum;
    report.selection_nonempty = sel.participant_count() > 0;

    if (!report.selection_nonempty) {
        report.round_latency_s = kInf;
        return report;
    }

    double worst = 0.0;
    for (std::size_t k : sel.participants()) {
        DeviceReport row;
        row.device = k;
        row.rate_bs_bps = rate_to_bs(k, sel, alloc, ris, chans, pool, noise);
        row.rate_eve_bps = rate_to_eve(k, sel, alloc, ris, chans, pool, noise);
        row.secrecy_bps = std::max(0.0, row.rate_bs_bps - row.rate_eve_bps);
        row.t_local_s = local_latency(k, pool);
        row.t_upload_s = upload_latency_from_rate(pool.model_bits[k], row.rate_bs_bps);
        row.t_total_s = row.t_local_s + row.t_upload_s;
        worst = std::max(worst, row.t_total_s);
        report.rows.push_back(row);
    }
    report.round_latency_s = worst;
    return report;
}

}  // namespace risfl::phy
