#include <doctest.h>

#include <cmath>
#include <complex>

#include "risfl/channel.hpp"
#include "test_helpers.hpp"

using namespace risfl;
using namespace risfl::channel;
using testutil::close_rel;

TEST_SUITE("channel") {

TEST_CASE("huge rician factor gives a pure unit-modulus draw") {
    ChannelParams p;
    p.ref_path_loss_db = 0.0;
    p.distance_m = 1.0;
    p.path_loss_exp = 2.2;
    p.rician_k = 1e12;
    p.los_angle_rad = 0.7;
    Rng rng(7);
    const auto h = draw_channel(p, 16, rng);
    for (const auto& z : h) {
        CHECK(std::abs(std::abs(z) - 1.0) < 1e-5);
    }
}

TEST_CASE("zero rician factor matches the scattered-only statistics") {
    ChannelParams p;
    p.ref_path_loss_db = -30.0;
    p.distance_m = 20.0;
    p.path_loss_exp = 3.6;
    p.rician_k = 0.0;
    const double expected_power =
        std::pow(10.0, p.ref_path_loss_db / 10.0) * std::pow(p.distance_m, -p.path_loss_exp);

    Rng rng(11);
    const int draws = 100000;
    double power_sum = 0.0;
    std::complex<double> mean_sum = 0.0;
    for (int i = 0; i < draws; ++i) {
        const auto h = draw_channel(p, 1, rng);
        power_sum += std::norm(h[0]);
        mean_sum += h[0];
    }
    const double mean_power = power_sum / draws;
    CHECK(close_rel(mean_power, expected_power, 0.02));
    CHECK(std::abs(mean_sum / static_cast<double>(draws)) < 0.02 * std::sqrt(expected_power));
}

TEST_CASE("reference path loss at 1 m sets the per-entry power") {
    // -30 dB, d = 1, beta = 2.2 -> expected power 1e-3 per entry
    ChannelParams p;
    p.ref_path_loss_db = -30.0;
    p.distance_m = 1.0;
    p.path_loss_exp = 2.2;
    p.rician_k = 0.0;
    Rng rng(3);
    double power = 0.0;
    const int draws = 200000;
    for (int i = 0; i < draws; ++i) power += std::norm(draw_channel(p, 1, rng)[0]);
    CHECK(close_rel(power / draws, 1e-3, 0.02));
}

TEST_CASE("scattered component shrinks with the rician factor") {
    ChannelParams p;
    p.ref_path_loss_db = 0.0;
    p.distance_m = 1.0;
    p.path_loss_exp = 2.0;
    p.rician_k = 4.0;
    Rng rng(17);
    const int draws = 100000;
    double dev_power = 0.0;
    std::complex<double> mean = 0.0;
    std::vector<std::complex<double>> all(draws);
    for (int i = 0; i < draws; ++i) {
        all[i] = draw_channel(p, 1, rng)[0];
        mean += all[i];
    }
    mean /= static_cast<double>(draws);
    for (const auto& z : all) dev_power += std::norm(z - mean);
    dev_power /= draws;
    // scattered power is 1/(k+1) of the unit total
    CHECK(close_rel(dev_power, 1.0 / 5.0, 0.02));
}

TEST_CASE("invalid parameters are rejected") {
    ChannelParams p;
    p.distance_m = 0.0;
    Rng rng(1);
    CHECK_THROWS_AS(draw_channel(p, 4, rng), std::invalid_argument);
    p.distance_m = 1.0;
    p.rician_k = -1.0;
    CHECK_THROWS_AS(draw_channel(p, 4, rng), std::invalid_argument);
    p.rician_k = std::nan("");
    CHECK_THROWS_AS(draw_channel(p, 4, rng), std::invalid_argument);
}

TEST_CASE("effective gain: identity phases and unit channels") {
    const ComplexVec ones(4, {1.0, 0.0});
    const auto g = effective_gain(ones, RisConfig::identity(4), ones, {0.0, 0.0});
    CHECK(g.real() == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(g.imag() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("effective gain: no reflected path leaves the direct link") {
    const ComplexVec zeros(3, {0.0, 0.0});
    const ComplexVec any(3, {0.4, -0.2});
    const auto g = effective_gain(zeros, RisConfig::identity(3), any, {2.0, 1.0});
    CHECK(g == std::complex<double>(2.0, 1.0));
}

TEST_CASE("effective gain matches the scalar-loop reference on random instances") {
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = 8;
        const auto rx = testutil::random_cvec(m, rng);
        const auto tx = testutil::random_cvec(m, rng);
        RisConfig ris;
        for (std::size_t i = 0; i < m; ++i) ris.phases.push_back(rng.uniform(0.0, kTwoPi));
        const std::complex<double> direct{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};

        const auto got = effective_gain(rx, ris, tx, direct);
        const auto want = ref::effective_gain(testutil::to_ref(rx), ris.phases,
                                              testutil::to_ref(tx), {direct.real(), direct.imag()});
        CHECK(close_rel(got.real(), want.re, 1e-12, 1e-15));
        CHECK(close_rel(got.imag(), want.im, 1e-12, 1e-15));
    }
}

TEST_CASE("effective gain rejects mismatched lengths") {
    const ComplexVec a(4, {1.0, 0.0});
    const ComplexVec b(3, {1.0, 0.0});
    CHECK_THROWS_AS(effective_gain(a, RisConfig::identity(4), b, {0, 0}),
                    std::invalid_argument);
}

TEST_CASE("co-phasing: aligned scalar link") {
    const ComplexVec one(1, {1.0, 0.0});
    const auto ris = optimal_single_link_phases(one, one, {1.0, 0.0});
    CHECK(ris.phases[0] == doctest::Approx(0.0));
    const auto g = effective_gain(one, ris, one, {1.0, 0.0});
    CHECK(std::abs(g) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("co-phasing beats random phase draws") {
    Rng rng(31);
    const std::size_t m = 4;
    const auto rx = testutil::random_cvec(m, rng);
    const auto tx = testutil::random_cvec(m, rng);
    const std::complex<double> direct{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const auto best = optimal_single_link_phases(rx, tx, direct);
    const double best_gain = std::abs(effective_gain(rx, best, tx, direct));
    for (int trial = 0; trial < 10000; ++trial) {
        RisConfig ris;
        for (std::size_t i = 0; i < m; ++i) ris.phases.push_back(rng.uniform(0.0, kTwoPi));
        CHECK(std::abs(effective_gain(rx, ris, tx, direct)) <= best_gain * (1.0 + 1e-12));
    }
}

TEST_CASE("co-phasing with no direct link hits the triangle equality") {
    Rng rng(37);
    const std::size_t m = 6;
    const auto rx = testutil::random_cvec(m, rng);
    const auto tx = testutil::random_cvec(m, rng);
    const auto ris = optimal_single_link_phases(rx, tx, {0.0, 0.0});
    double amplitude_sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) amplitude_sum += std::abs(rx[i]) * std::abs(tx[i]);
    CHECK(std::abs(effective_gain(rx, ris, tx, {0.0, 0.0})) ==
          doctest::Approx(amplitude_sum).epsilon(1e-9));
}

TEST_CASE("global phase shift changes nothing when the direct link is zero") {
    Rng rng(41);
    const std::size_t m = 5;
    const auto rx = testutil::random_cvec(m, rng);
    const auto tx = testutil::random_cvec(m, rng);
    RisConfig ris;
    for (std::size_t i = 0; i < m; ++i) ris.phases.push_back(rng.uniform(0.0, kTwoPi));

    const double base = std::abs(effective_gain(rx, ris, tx, {0.0, 0.0}));
    RisConfig shifted = ris;
    const double global = 1.234;
    for (auto& t : shifted.phases) t = wrap_phase(t + global);
    CHECK(std::abs(effective_gain(rx, shifted, tx, {0.0, 0.0})) ==
          doctest::Approx(base).epsilon(1e-12));

    // with a direct link the magnitude does move
    const double with_direct = std::abs(effective_gain(rx, ris, tx, {0.5, 0.0}));
    const double with_direct_shifted = std::abs(effective_gain(rx, shifted, tx, {0.5, 0.0}));
    CHECK(std::abs(with_direct - with_direct_shifted) > 1e-9);
}

TEST_CASE("effective gain is linear in the direct link and the tx vector") {
    Rng rng(43);
    const std::size_t m = 4;
    const auto rx = testutil::random_cvec(m, rng);
    auto tx = testutil::random_cvec(m, rng);
    RisConfig ris;
    for (std::size_t i = 0; i < m; ++i) ris.phases.push_back(rng.uniform(0.0, kTwoPi));

    const std::complex<double> d1{0.3, -0.7};
    const auto g0 = effective_gain(rx, ris, tx, {0.0, 0.0});
    const auto g1 = effective_gain(rx, ris, tx, d1);
    CHECK(close_rel((g1 - g0).real(), d1.real(), 1e-12, 1e-15));
    CHECK(close_rel((g1 - g0).imag(), d1.imag(), 1e-12, 1e-15));

    auto tx2 = tx;
    for (auto& z : tx2) z *= 2.0;
    const auto gd = effective_gain(rx, ris, tx2, {0.0, 0.0});
    CHECK(close_rel(gd.real(), 2.0 * g0.real(), 1e-12, 1e-15));
    CHECK(close_rel(gd.imag(), 2.0 * g0.imag(), 1e-12, 1e-15));
}

TEST_CASE("phase wrap stays in [0, 2pi)") {
    CHECK(wrap_phase(-0.1) == doctest::Approx(kTwoPi - 0.1));
    CHECK(wrap_phase(kTwoPi) == 0.0);
    CHECK(wrap_phase(3 * kTwoPi + 1.0) == doctest::Approx(1.0));
}

TEST_CASE("realization has consistent dimensions and finite entries") {
    Geometry g;
    g.bs = {30, 30};
    g.ris = {24, 36};
    g.eve = {42, 24};
    g.devices = {{10, 10}, {50, 50}, {20, 40}};
    LinkBudget budget;
    Rng rng(5);
    const auto r = draw_realization(g, budget, 8, rng);
    CHECK(r.devices() == 3);
    CHECK(r.elements() == 8);
    CHECK(r.device_to_bs.size() == 3);
    CHECK(r.device_to_eve.size() == 3);
    for (const auto& v : r.device_to_ris) CHECK(v.size() == 8);
    for (const auto& z : r.ris_to_bs) CHECK(std::isfinite(std::abs(z)));
}

}  // TEST_SUITE
