#include "risfl/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace risfl::problem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ConstraintSlacks slacks_from(const ProblemInstance& instance, const Decision& decision,
                             const phy::EvalReport& report) {
    ConstraintSlacks s;
    s.bandwidth = 1.0 - report.bandwidth_sum;
    s.selection_nonempty = report.selection_nonempty;

    const int k = static_cast<int>(instance.devices());
    const int participants = static_cast<int>(decision.selection.participant_count());
    if (participants >= 1) {
        s.accuracy =
            instance.conv.epsilon - convergence::bound_value(instance.conv, k, participants);
    } else {
        s.accuracy = -kInf;
    }

    s.secrecy_min = kInf;
    s.secrecy_shortfall_bps = kInf;
    for (const auto& row : report.rows) {
        const double slack = row.secrecy_bps - instance.secrecy_min_bps;
        s.secrecy.push_back(slack);
        s.secrecy_min = std::min(s.secrecy_min, slack);
        const double unclipped =
            row.rate_bs_bps - row.rate_eve_bps - instance.secrecy_min_bps;
        s.secrecy_shortfall_bps = std::min(s.secrecy_shortfall_bps, unclipped);
    }

    for (double b : decision.alloc.coeff) {
        if (b < 0.0 || !std::isfinite(b)) s.box_bandwidth_ok = false;
    }
    for (double theta : decision.ris.phases) {
        if (!(theta >= 0.0 && theta <= channel::kTwoPi)) s.box_phase_ok = false;
    }
    return s;
}

}  // namespace

Evaluation evaluate_decision(const ProblemInstance& instance, const Decision& decision) {
    Evaluation out;
    out.report = phy::evaluate(decision.selection, decision.alloc, decision.ris,
                               instance.channels, instance.pool, instance.noise);
    out.slacks = slacks_from(instance, decision, out.report);
    return out;
}

ConstraintSlacks check_feasibility(const ProblemInstance& instance, const Decision& decision) {
    return evaluate_decision(instance, decision).slacks;
}

bool all_satisfied(const ConstraintSlacks& s) {
    return s.bandwidth >= 0.0 && s.accuracy >= 0.0 && s.secrecy_min >= 0.0 &&
           s.box_bandwidth_ok && s.box_phase_ok && s.selection_nonempty;
}

double penalty(const ProblemInstance& instance, const ConstraintSlacks& s) {
    const PenaltyParams& p = instance.penalty_params;
    double total = 0.0;

    if (s.bandwidth < 0.0 || !s.box_bandwidth_ok) {
        const double magnitude = s.bandwidth < 0.0 ? -s.bandwidth : 0.0;
        total += p.base_bandwidth + p.scale_bandwidth * magnitude;
    }

    if (s.accuracy < 0.0) {
        double magnitude;
        if (std::isinf(s.accuracy)) {
            // empty participant set: charge the worst finite case, |A| = 1
            const int k = static_cast<int>(instance.devices());
            const double worst = convergence::bound_value(instance.conv, k, 1);
            magnitude = std::max(0.0, worst - instance.conv.epsilon);
        } else {
            magnitude = -s.accuracy;
        }
        magnitude /= std::max(instance.conv.epsilon, 1e-12);
        total += p.base_accuracy + p.scale_accuracy * magnitude;
    }

    if (s.secrecy_min < 0.0) {
        // deficit in bits/s/Hz so the term has a slope everywhere, not only
        // in the thin band where the clipped secrecy rate is still positive
        const double magnitude =
            -s.secrecy_shortfall_bps / std::max(instance.system_bandwidth_hz, 1.0);
        total += p.base_secrecy + p.scale_secrecy * magnitude;
    }

    return total;
}

double objective(const ProblemInstance& instance, const Decision& decision) {
    return evaluate_decision(instance, decision).report.round_latency_s;
}

}  // namespace risfl::problem
