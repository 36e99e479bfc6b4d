#include <doctest.h>

#include <cmath>
#include <limits>

#include "risfl/phy.hpp"
#include "test_helpers.hpp"

using namespace risfl;
using namespace risfl::phy;
using testutil::close_rel;

namespace {

// fixed-size random scenario shared by the oracle comparisons
struct Scenario {
    Selection sel;
    BandwidthAlloc alloc;
    channel::RisConfig ris;
    channel::ChannelRealization chans;
    DevicePool pool;
    NoisePowers noise;

    ref::Instance to_ref() const {
        ref::Instance in;
        in.ris_to_bs = testutil::to_ref(chans.ris_to_bs);
        in.ris_to_eve = testutil::to_ref(chans.ris_to_eve);
        for (const auto& v : chans.device_to_ris) in.device_to_ris.push_back(testutil::to_ref(v));
        in.device_to_bs = testutil::to_ref(chans.device_to_bs);
        in.device_to_eve = testutil::to_ref(chans.device_to_eve);
        for (auto f : sel.flags) in.selected.push_back(f);
        in.bandwidth = alloc.coeff;
        in.phases = ris.phases;
        in.tx_power = pool.tx_power_w;
        in.model_bits = pool.model_bits;
        in.cycles = pool.cycles_per_datum;
        in.data = pool.data_size;
        in.cpu_hz = pool.cpu_hz;
        in.system_bandwidth = alloc.system_bandwidth_hz;
        in.noise_bs = noise.bs_w;
        in.noise_eve = noise.eve_w;
        return in;
    }
};

Scenario random_scenario(int devices, int elements, Rng& rng,
                         std::vector<std::uint8_t> flags = {}) {
    Scenario s;
    if (flags.empty()) {
        flags.assign(devices, 0);
        // at least one participant
        flags[0] = 1;
        for (int k = 1; k < devices; ++k) flags[k] = rng.uniform() < 0.5 ? 1 : 0;
    }
    s.sel = Selection::from_flags(flags);
    s.alloc.system_bandwidth_hz = 1e7;
    s.alloc.coeff.assign(devices, 0.0);
    for (std::size_t k : s.sel.participants()) s.alloc.coeff[k] = rng.uniform(0.05, 0.3);
    for (int m = 0; m < elements; ++m) s.ris.phases.push_back(rng.uniform(0.0, channel::kTwoPi));
    s.chans.ris_to_bs = testutil::random_cvec(elements, rng, 1e-3);
    s.chans.ris_to_eve = testutil::random_cvec(elements, rng, 1e-3);
    for (int k = 0; k < devices; ++k) {
        s.chans.device_to_ris.push_back(testutil::random_cvec(elements, rng, 1e-2));
        s.chans.device_to_bs.push_back(
            {1e-4 * rng.uniform(-1.0, 1.0), 1e-4 * rng.uniform(-1.0, 1.0)});
        s.chans.device_to_eve.push_back(
            {1e-4 * rng.uniform(-1.0, 1.0), 1e-4 * rng.uniform(-1.0, 1.0)});
    }
    s.pool.cycles_per_datum.assign(devices, 1000.0);
    s.pool.data_size.assign(devices, 6250.0);
    s.pool.cpu_hz.assign(devices, 1e9);
    s.pool.tx_power_w.assign(devices, 0.1);
    s.pool.model_bits.assign(devices, 3e6);
    s.noise = {1e-14, 1e-14};
    return s;
}

}  // namespace

TEST_SUITE("phy") {

TEST_CASE("unit-SNR single participant gives one bit per second per hertz") {
    // engineered so P|G|^2 / sigma^2 == 1 with b = B = 1
    Rng rng(1);
    Scenario s = random_scenario(1, 1, rng);
    s.sel = Selection::from_flags({1});
    s.alloc.coeff = {1.0};
    s.alloc.system_bandwidth_hz = 1.0;
    s.ris.phases = {0.0};
    s.chans.ris_to_bs = {{0.0, 0.0}};
    s.chans.device_to_ris[0] = {{0.0, 0.0}};
    s.chans.device_to_bs = {{1.0, 0.0}};
    s.pool.tx_power_w = {1.0};
    s.noise.bs_w = 1.0;
    CHECK(rate_to_bs(0, s.sel, s.alloc, s.ris, s.chans, s.pool, s.noise) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero bandwidth coefficient forces a zero rate") {
    Rng rng(2);
    auto s = random_scenario(3, 2, rng, {1, 1, 0});
    s.alloc.coeff[0] = 0.0;
    CHECK(rate_to_bs(0, s.sel, s.alloc, s.ris, s.chans, s.pool, s.noise) == 0.0);
}

TEST_CASE("rates for non-participants are a domain error") {
    Rng rng(3);
    auto s = random_scenario(3, 2, rng, {1, 0, 1});
    CHECK_THROWS_AS(rate_to_bs(1, s.sel, s.alloc, s.ris, s.chans, s.pool, s.noise),
                    std::domain_error);
}

TEST_CASE("rates match the scalar oracle on random instances") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        auto s = random_scenario(3, 2, rng);
        const auto in = s.to_ref();
        for (std::size_t k : s.sel.participants()) {
            CHECK(close_rel(rate_to_bs(k, s.sel, s.alloc, s.ris, s.chans, s.pool, s.noise),
                            ref::rate(in, k, false), 1e-9));
            CHECK(close_rel(rate_to_eve(k, s.sel, s.alloc, s.ris, s.chans, s.pool, s.noise),
                            ref::rate(in, k, true), 1e-9));
        }
    }
}

TEST_CASE("zero eavesdropper channels silence the eavesdropper rate") {
    Rng rng(7);
    auto s = random_scenario(3, 2, rng, {1, 1, 1});
    s.chans.ris_to_eve.assign(2, {0.0, 0.0});
    s.chans.device_to_eve.assign(3, {0.0, 0.0});
    CHECK(rate_to_eve(0, s.sel, s.alloc, s.ris, s.chans, s.pool, s.noise) == 0.0);
}

TEST_CASE("identical channels and noise make both rates equal") {
    Rng rng(11);
    auto s = random_scenario(3, 4, rng);
    s.chans.ris_to_eve = s.chans.ris_to_bs;
    s.chans.device_to_eve = s.chans.device_to_bs;
    s.noise.eve_w = s.noise.bs_w;
    for (std::size_t k : s.sel.participants()) {
        CHECK(rate_to_bs(k, s.sel, s.alloc, s.ris, s.chans, s.pool, s.noise) ==
              doctest::Approx(rate_to_eve(k, s.sel, s.alloc, s.ris, s.chans, s.pool, s.noise))
                  .epsilon(1e-12));
        CHECK(secrecy_rate(k, s.sel, s.alloc, s.ris, s.chans, s.pool, s.noise) == 0.0);
    }
}

TEST_CASE("secrecy rate is the clipped rate difference") {
    Rng rng(13);
    auto s = random_scenario(4, 3, rng);
    const auto in = s.to_ref();
    for (std::size_t k : s.sel.participants()) {
        const double rs = secrecy_rate(k, s.sel, s.alloc, s.ris, s.chans, s.pool, s.noise);
        CHECK(close_rel(rs, ref::secrecy(in, k), 1e-9, 1e-12));
        CHECK(rs >= 0.0);
        CHECK(rs <= rate_to_bs(k, s.sel, s.alloc, s.ris, s.chans, s.pool, s.noise) *
                        (1.0 + 1e-12));
    }
}

TEST_CASE("local latency follows cycles * data / frequency") {
    DevicePool pool;
    pool.cycles_per_datum = {1000.0};
    pool.data_size = {6250.0};
    pool.cpu_hz = {1e9};
    pool.tx_power_w = {0.1};
    pool.model_bits = {3e6};
    CHECK(local_latency(0, pool) == doctest::Approx(6.25e-3).epsilon(1e-12));
    pool.cpu_hz = {2e9};
    CHECK(local_latency(0, pool) == doctest::Approx(3.125e-3).epsilon(1e-12));
}

TEST_CASE("zero local data is a degenerate but well-defined case") {
    DevicePool pool;  // bypasses validate() on purpose
    pool.cycles_per_datum = {1000.0};
    pool.data_size = {0.0};
    pool.cpu_hz = {1e9};
    pool.tx_power_w = {0.1};
    pool.model_bits = {3e6};
    CHECK(local_latency(0, pool) == 0.0);
}

TEST_CASE("upload latency divides bits by rate with an infinite sentinel at zero") {
    CHECK(upload_latency_from_rate(3e6, 1e6) == doctest::Approx(3.0));
    CHECK(std::isinf(upload_latency_from_rate(3e6, 0.0)));
    CHECK(upload_latency_from_rate(3e6, std::numeric_limits<double>::infinity()) == 0.0);
}

TEST_CASE("evaluate: single participant, no jammers") {
    Rng rng(17);
    auto s = random_scenario(1, 2, rng, {1});
    const auto report = evaluate(s.sel, s.alloc, s.ris, s.chans, s.pool, s.noise);
    REQUIRE(report.rows.size() == 1);
    CHECK(report.round_latency_s ==
          doctest::Approx(report.rows[0].t_local_s + report.rows[0].t_upload_s));
}

TEST_CASE("evaluate: symmetric participants tie") {
    Rng rng(19);
    auto s = random_scenario(2, 2, rng, {1, 1});
    s.alloc.coeff = {0.5, 0.5};
    s.chans.device_to_ris[1] = s.chans.device_to_ris[0];
    s.chans.device_to_bs[1] = s.chans.device_to_bs[0];
    s.chans.device_to_eve[1] = s.chans.device_to_eve[0];
    const auto report = evaluate(s.sel, s.alloc, s.ris, s.chans, s.pool, s.noise);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].t_total_s == doctest::Approx(report.rows[1].t_total_s).epsilon(1e-12));
    CHECK(report.round_latency_s == doctest::Approx(report.rows[0].t_total_s).epsilon(1e-12));
}

TEST_CASE("evaluate matches the scalar oracle end to end") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        auto s = random_scenario(5, 3, rng);
        const auto in = s.to_ref();
        const auto report = evaluate(s.sel, s.alloc, s.ris, s.chans, s.pool, s.noise);
        CHECK(close_rel(report.round_latency_s, ref::round_latency(in), 1e-9));
        for (const auto& row : report.rows) {
            CHECK(close_rel(row.rate_bs_bps, ref::rate(in, row.device, false), 1e-9));
            CHECK(close_rel(row.rate_eve_bps, ref::rate(in, row.device, true), 1e-9));
            CHECK(close_rel(row.t_upload_s, ref::upload_latency(in, row.device), 1e-9));
        }
    }
}

TEST_CASE("empty selection yields the infinite-latency sentinel") {
    Rng rng(29);
    auto s = random_scenario(3, 2, rng, {1, 1, 1});
    s.sel = Selection::from_flags({0, 0, 0});
    const auto report = evaluate(s.sel, s.alloc, s.ris, s.chans, s.pool, s.noise);
    CHECK(std::isinf(report.round_latency_s));
    CHECK_FALSE(report.selection_nonempty);
    CHECK(report.rows.empty());
}

TEST_CASE("more bandwidth never hurts the rate or the upload latency") {
    Rng rng(31);
    auto s = random_scenario(4, 3, rng);
    const auto k = s.sel.participants()[0];
    const double r0 = rate_to_bs(k, s.sel, s.alloc, s.ris, s.chans, s.pool, s.noise);
    const double t0 = upload_latency_from_rate(s.pool.model_bits[k], r0);
    s.alloc.coeff[k] *= 2.0;
    const double r1 = rate_to_bs(k, s.sel, s.alloc, s.ris, s.chans, s.pool, s.noise);
    const double t1 = upload_latency_from_rate(s.pool.model_bits[k], r1);
    CHECK(r1 >= r0);
    CHECK(t1 <= t0);
}

TEST_CASE("adding a jammer never raises anyone's rate") {
    Rng rng(37);
    auto s = random_scenario(5, 3, rng, {1, 1, 1, 1, 1});
    const auto k = 0;
    const double before_bs = rate_to_bs(k, s.sel, s.alloc, s.ris, s.chans, s.pool, s.noise);
    const double before_eve = rate_to_eve(k, s.sel, s.alloc, s.ris, s.chans, s.pool, s.noise);
    // turn the last participant into a jammer
    auto flags = s.sel.flags;
    flags[4] = 0;
    s.sel = Selection::from_flags(flags);
    s.alloc.coeff[4] = 0.0;
    const double after_bs = rate_to_bs(k, s.sel, s.alloc, s.ris, s.chans, s.pool, s.noise);
    const double after_eve = rate_to_eve(k, s.sel, s.alloc, s.ris, s.chans, s.pool, s.noise);
    CHECK(after_bs <= before_bs);
    CHECK(after_eve <= before_eve);
}

TEST_CASE("round latency is invariant to permuting device indices") {
    Rng rng(41);
    auto s = random_scenario(4, 2, rng);
    const auto report = evaluate(s.sel, s.alloc, s.ris, s.chans, s.pool, s.noise);

    // rotate all device-indexed data by one
    auto rot = [](auto v) {
        std::rotate(v.begin(), v.begin() + 1, v.end());
        return v;
    };
    Scenario p = s;
    p.sel = Selection::from_flags(rot(s.sel.flags));
    p.alloc.coeff = rot(s.alloc.coeff);
    p.chans.device_to_ris = rot(s.chans.device_to_ris);
    p.chans.device_to_bs = rot(s.chans.device_to_bs);
    p.chans.device_to_eve = rot(s.chans.device_to_eve);
    p.pool.cycles_per_datum = rot(s.pool.cycles_per_datum);
    p.pool.data_size = rot(s.pool.data_size);
    p.pool.cpu_hz = rot(s.pool.cpu_hz);
    p.pool.tx_power_w = rot(s.pool.tx_power_w);
    p.pool.model_bits = rot(s.pool.model_bits);
    const auto permuted = evaluate(p.sel, p.alloc, p.ris, p.chans, p.pool, p.noise);
    CHECK(close_rel(report.round_latency_s, permuted.round_latency_s, 1e-12));
}

TEST_CASE("device pool validation rejects non-positive entries") {
    DevicePool pool;
    pool.cycles_per_datum = {1000.0, 1000.0};
    pool.data_size = {6250.0, 6250.0};
    pool.cpu_hz = {1e9, 0.0};
    pool.tx_power_w = {0.1, 0.1};
    pool.model_bits = {3e6, 3e6};
    CHECK_THROWS_AS(pool.validate(), std::invalid_argument);
}

}  // TEST_SUITE
