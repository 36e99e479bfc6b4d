#pragma once

#include <vector>

#include "risfl/channel.hpp"
#include "risfl/convergence.hpp"
#include "risfl/phy.hpp"

namespace risfl::problem {

// Affine penalty per violated constraint: base + scale * magnitude, with
// magnitudes normalized to dimensionless units so one default fits all
// three constraints. Bases sit above the best achievable round latency of
// the shipped scenarios so a violation is never reward-preferable.
struct PenaltyParams {
    double base_bandwidth = 6.0;
    double base_accuracy = 6.0;
    double base_secrecy = 6.0;
    double scale_bandwidth = 4.0;
    double scale_accuracy = 4.0;
    double scale_secrecy = 4.0;
};

// Everything needed to evaluate one decision: pool, noise, bandwidth,
// channels, the accuracy-bound constants, the per-participant secrecy floor,
// and the penalty weights.
struct ProblemInstance {
    phy::DevicePool pool;
    phy::NoisePowers noise;
    double system_bandwidth_hz = 0.0;
    channel::ChannelRealization channels;
    convergence::ConvergenceParams conv;
    double secrecy_min_bps = 0.0;
    PenaltyParams penalty_params;

    std::size_t devices() const { return pool.devices(); }
};

struct Decision {
    phy::Selection selection;
    phy::BandwidthAlloc alloc;
    channel::RisConfig ris;
};

// Signed slacks; negative = violated. secrecy holds one slack per
// participant (device order), secrecy_min their minimum (+inf when no
// participants, the constraint being vacuous then). secrecy_shortfall_bps
// carries the unclipped worst rate deficit min_k (R_bs - R_eve - R_min):
// the secrecy rate itself clips at zero, which would flatten the penalty
// over most violating decisions, so the penalty magnitude uses this
// deficit instead (same sign at the feasibility boundary).
struct ConstraintSlacks {
    double bandwidth = 0.0;      // 1 - sum(b)
    double accuracy = 0.0;       // epsilon - bound(|A|); -inf for |A| = 0
    double secrecy_min = 0.0;
    double secrecy_shortfall_bps = 0.0;
    std::vector<double> secrecy;
    bool box_bandwidth_ok = true;  // b >= 0
    bool box_phase_ok = true;      // theta in [0, 2*pi]
    bool selection_nonempty = true;
};

struct Evaluation {
    phy::EvalReport report;
    ConstraintSlacks slacks;
};

ConstraintSlacks check_feasibility(const ProblemInstance& instance, const Decision& decision);

// Slacks plus the full rate/latency report in one pass (the environment's
// hot path).
Evaluation evaluate_decision(const ProblemInstance& instance, const Decision& decision);

bool all_satisfied(const ConstraintSlacks& slacks);

// 0 when every constraint holds, otherwise the sum of the active affine
// penalty terms. Always finite.
double penalty(const ProblemInstance& instance, const ConstraintSlacks& slacks);

// round latency of the decision (max total latency over participants)
double objective(const ProblemInstance& instance, const Decision& decision);

}  // namespace risfl::problem
