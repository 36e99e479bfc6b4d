#include <doctest.h>

#include <cmath>

#include "risfl/problem.hpp"
#include "test_helpers.hpp"

using namespace risfl;
using namespace risfl::problem;
using testutil::close_rel;

namespace {

ProblemInstance tiny_instance(Rng& rng, int devices = 3, int elements = 2) {
    ProblemInstance inst;
    inst.pool.cycles_per_datum.assign(devices, 1000.0);
    inst.pool.data_size.assign(devices, 6250.0);
    inst.pool.cpu_hz.assign(devices, 1e9);
    inst.pool.tx_power_w.assign(devices, 0.1);
    inst.pool.model_bits.assign(devices, 3e6);
    inst.noise = {1e-14, 1e-14};
    inst.system_bandwidth_hz = 1e7;
    inst.secrecy_min_bps = 2e4;
    inst.conv.mu = 1.0;
    inst.conv.delta = 0.1;
    inst.conv.f0 = 1.0;
    inst.conv.f_star = 0.0;
    inst.conv.rounds = 100;
    inst.conv.epsilon = 0.5;

    inst.channels.ris_to_bs = testutil::random_cvec(elements, rng, 1e-3);
    inst.channels.ris_to_eve = testutil::random_cvec(elements, rng, 1e-3);
    for (int k = 0; k < devices; ++k) {
        inst.channels.device_to_ris.push_back(testutil::random_cvec(elements, rng, 1e-2));
        inst.channels.device_to_bs.push_back(
            {1e-4 * rng.uniform(-1.0, 1.0), 1e-4 * rng.uniform(-1.0, 1.0)});
        inst.channels.device_to_eve.push_back(
            {1e-5 * rng.uniform(-1.0, 1.0), 1e-5 * rng.uniform(-1.0, 1.0)});
    }
    return inst;
}

ref::Instance to_ref_instance(const ProblemInstance& inst, const Decision& d) {
    ref::Instance in;
    in.ris_to_bs = testutil::to_ref(inst.channels.ris_to_bs);
    in.ris_to_eve = testutil::to_ref(inst.channels.ris_to_eve);
    for (const auto& v : inst.channels.device_to_ris) {
        in.device_to_ris.push_back(testutil::to_ref(v));
    }
    in.device_to_bs = testutil::to_ref(inst.channels.device_to_bs);
    in.device_to_eve = testutil::to_ref(inst.channels.device_to_eve);
    for (auto f : d.selection.flags) in.selected.push_back(f);
    in.bandwidth = d.alloc.coeff;
    in.phases = d.ris.phases;
    in.tx_power = inst.pool.tx_power_w;
    in.model_bits = inst.pool.model_bits;
    in.cycles = inst.pool.cycles_per_datum;
    in.data = inst.pool.data_size;
    in.cpu_hz = inst.pool.cpu_hz;
    in.system_bandwidth = inst.system_bandwidth_hz;
    in.noise_bs = inst.noise.bs_w;
    in.noise_eve = inst.noise.eve_w;
    return in;
}

Decision simple_decision(const ProblemInstance& inst, std::vector<std::uint8_t> flags) {
    Decision d;
    d.selection = phy::Selection::from_flags(std::move(flags));
    d.alloc.system_bandwidth_hz = inst.system_bandwidth_hz;
    d.alloc.coeff.assign(inst.devices(), 0.0);
    const auto participants = d.selection.participants();
    for (auto k : participants) d.alloc.coeff[k] = 1.0 / participants.size();
    d.ris.phases.assign(inst.channels.elements(), 0.0);
    return d;
}

}  // namespace

TEST_SUITE("problem") {

TEST_CASE("bandwidth overrun shows up as negative slack") {
    Rng rng(1);
    auto inst = tiny_instance(rng);
    auto d = simple_decision(inst, {1, 1, 0});
    d.alloc.coeff = {0.6, 0.6, 0.0};
    const auto slacks = check_feasibility(inst, d);
    CHECK(slacks.bandwidth == doctest::Approx(-0.2).epsilon(1e-12));
}

TEST_CASE("empty participant set flags the accuracy constraint") {
    Rng rng(2);
    auto inst = tiny_instance(rng);
    const auto d = simple_decision(inst, {0, 0, 0});
    const auto slacks = check_feasibility(inst, d);
    CHECK(std::isinf(slacks.accuracy));
    CHECK(slacks.accuracy < 0.0);
    CHECK_FALSE(slacks.selection_nonempty);
    CHECK_FALSE(all_satisfied(slacks));
    // the penalty stays finite
    CHECK(std::isfinite(penalty(inst, slacks)));
    CHECK(penalty(inst, slacks) > 0.0);
}

TEST_CASE("slacks match an independent recomputation on a fixed instance") {
    Rng rng(42);
    auto inst = tiny_instance(rng, 5, 3);
    auto d = simple_decision(inst, {1, 0, 1, 1, 0});
    const auto slacks = check_feasibility(inst, d);

    ref::Instance in;
    in.ris_to_bs = testutil::to_ref(inst.channels.ris_to_bs);
    in.ris_to_eve = testutil::to_ref(inst.channels.ris_to_eve);
    for (const auto& v : inst.channels.device_to_ris) in.device_to_ris.push_back(testutil::to_ref(v));
    in.device_to_bs = testutil::to_ref(inst.channels.device_to_bs);
    in.device_to_eve = testutil::to_ref(inst.channels.device_to_eve);
    for (auto f : d.selection.flags) in.selected.push_back(f);
    in.bandwidth = d.alloc.coeff;
    in.phases = d.ris.phases;
    in.tx_power = inst.pool.tx_power_w;
    in.model_bits = inst.pool.model_bits;
    in.cycles = inst.pool.cycles_per_datum;
    in.data = inst.pool.data_size;
    in.cpu_hz = inst.pool.cpu_hz;
    in.system_bandwidth = inst.system_bandwidth_hz;
    in.noise_bs = inst.noise.bs_w;
    in.noise_eve = inst.noise.eve_w;

    double bw = 0.0;
    for (double b : d.alloc.coeff) bw += b;
    CHECK(close_rel(slacks.bandwidth, 1.0 - bw, 1e-12));
    CHECK(close_rel(slacks.accuracy,
                    inst.conv.epsilon - ref::bound(inst.conv.mu, inst.conv.delta, inst.conv.f0,
                                                   inst.conv.f_star, inst.conv.rounds, 5, 3),
                    1e-12));
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < 5; ++k) {
        if (!d.selection.flags[k]) continue;
        worst = std::min(worst, ref::secrecy(in, k) - inst.secrecy_min_bps);
    }
    CHECK(close_rel(slacks.secrecy_min, worst, 1e-9));
}

TEST_CASE("penalty is zero exactly when every slack is satisfied") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        auto inst = tiny_instance(rng);
        std::vector<std::uint8_t> flags(3);
        for (auto& f : flags) f = rng.uniform() < 0.5 ? 1 : 0;
        auto d = simple_decision(inst, flags);
        if (!d.selection.participants().empty() && rng.uniform() < 0.5) {
            // random overload to exercise the violated side
            d.alloc.coeff[d.selection.participants()[0]] += rng.uniform(0.0, 2.0);
        }
        const auto slacks = check_feasibility(inst, d);
        const double p = penalty(inst, slacks);
        CHECK(p >= 0.0);
        CHECK((p == 0.0) == all_satisfied(slacks));
    }
}

TEST_CASE("penalty isolates the violated constraint") {
    Rng rng(11);
    auto inst = tiny_instance(rng);
    inst.secrecy_min_bps = 0.0;     // secrecy always satisfied
    inst.conv.epsilon = 100.0;      // accuracy always satisfied
    auto d = simple_decision(inst, {1, 1, 0});
    d.alloc.coeff = {0.9, 0.9, 0.0};  // bandwidth violated by 0.8
    const auto slacks = check_feasibility(inst, d);
    const double p = penalty(inst, slacks);
    CHECK(p == doctest::Approx(inst.penalty_params.base_bandwidth +
                               inst.penalty_params.scale_bandwidth * 0.8)
                   .epsilon(1e-9));
}

TEST_CASE("simultaneous violations add their terms") {
    Rng rng(13);
    auto inst = tiny_instance(rng);
    inst.conv.epsilon = 0.0;           // accuracy unsatisfiable
    inst.secrecy_min_bps = 1e12;       // secrecy unsatisfiable
    auto d = simple_decision(inst, {1, 1, 1});
    d.alloc.coeff = {0.5, 0.5, 0.5};   // bandwidth violated by 0.5
    const auto slacks = check_feasibility(inst, d);
    const auto in3 = to_ref_instance(inst, d);

    const auto& pp = inst.penalty_params;
    const double accuracy_violation =
        (ref::bound(inst.conv.mu, inst.conv.delta, inst.conv.f0, inst.conv.f_star,
                    inst.conv.rounds, 3, 3) -
         inst.conv.epsilon) /
        1e-12;  // epsilon floor in the normalizer
    double shortfall = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < 3; ++k) {
        const double rb = ref::rate(in3, k, false);
        const double re = ref::rate(in3, k, true);
        shortfall = std::min(shortfall, rb - re - inst.secrecy_min_bps);
    }
    const double secrecy_violation = -shortfall / inst.system_bandwidth_hz;
    const double expected = (pp.base_bandwidth + pp.scale_bandwidth * 0.5) +
                            (pp.base_accuracy + pp.scale_accuracy * accuracy_violation) +
                            (pp.base_secrecy + pp.scale_secrecy * secrecy_violation);
    CHECK(close_rel(penalty(inst, slacks), expected, 1e-9));
}

TEST_CASE("penalty grows with the violation magnitude") {
    Rng rng(17);
    auto inst = tiny_instance(rng);
    auto d = simple_decision(inst, {1, 1, 0});
    d.alloc.coeff = {0.7, 0.7, 0.0};
    const auto s1 = check_feasibility(inst, d);
    d.alloc.coeff = {0.9, 0.9, 0.0};
    const auto s2 = check_feasibility(inst, d);
    CHECK(penalty(inst, s2) > penalty(inst, s1));
}

TEST_CASE("check_feasibility does not mutate the decision") {
    Rng rng(19);
    auto inst = tiny_instance(rng);
    const auto d = simple_decision(inst, {1, 0, 1});
    const auto before = d.alloc.coeff;
    const auto before_phases = d.ris.phases;
    (void)check_feasibility(inst, d);
    CHECK(d.alloc.coeff == before);
    CHECK(d.ris.phases == before_phases);
}

TEST_CASE("objective delegates to the round latency") {
    Rng rng(23);
    auto inst = tiny_instance(rng);
    const auto d = simple_decision(inst, {1, 1, 0});
    const auto eval = evaluate_decision(inst, d);
    CHECK(objective(inst, d) == doctest::Approx(eval.report.round_latency_s));
}

}  // TEST_SUITE
