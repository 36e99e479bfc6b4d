#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "risfl/phy.hpp"
#include "risfl/rng.hpp"

namespace risfl::convergence {

// Constants of the federated-training bound: smoothness mu, gradient
// second-moment bound delta, initial and optimal loss, round budget, the
// accuracy threshold, and the local learning rate.
struct ConvergenceParams {
    double mu = 1.0;
    double delta = 0.1;
    double f0 = 1.0;
    double f_star = 0.0;
    int rounds = 100;
    double epsilon = 0.25;
    double alpha_fl = 1.0;

    void validate() const;
};

// Upper bound on the average squared global gradient norm after the round
// budget, as a function of how many devices participate:
//   2*mu*(f0 - f*)/(rounds+1) + 2*delta + 2*delta*(K - 2*|A|)/|A|^2 * |A|
double bound_value(const ConvergenceParams& p, int total_devices, int participants);
double bound_value(const ConvergenceParams& p, int total_devices, const phy::Selection& sel);

// Smallest participant count whose bound meets the accuracy threshold;
// nullopt when even full participation misses it.
std::optional<int> min_participants(const ConvergenceParams& p, int total_devices);

// An epsilon that makes `target` exactly the smallest feasible participant
// count (midpoint between the neighboring bound values). Requires delta > 0
// for targets above 1 since the bound is flat in |A| when delta = 0.
double epsilon_for_min_participants(const ConvergenceParams& p, int total_devices, int target);

// Synthetic federated task with every bound constant available in closed
// form: per-device quadratic losses 0.5*(w - w_k)^T diag(curvature) (w - w_k)
// sharing one diagonal curvature whose largest entry is exactly mu.
struct ToyFlTask {
    int dim = 0;
    std::vector<std::vector<double>> optima;  // per device, length dim
    std::vector<double> data_weights;         // per device
    std::vector<double> curvature;            // length dim, max entry = mu
    std::vector<double> w0;

    int devices() const { return static_cast<int>(optima.size()); }
    void validate() const;

    double mu() const;
    // max_k sup over the iterate box of the squared local gradient norm;
    // iterates stay inside the box spanned by w0 and the optima because
    // every aggregation step is a per-coordinate convex combination.
    double delta_bound() const;
    std::vector<double> global_optimum() const;  // weighted mean of optima
    double loss(const std::vector<double>& w) const;
    double f_star() const;
    std::vector<double> global_gradient(const std::vector<double>& w) const;
    std::vector<double> local_gradient(int device, const std::vector<double>& w) const;
};

ToyFlTask make_toy_task(int devices, int dim, Rng& rng, bool isotropic = false);

// Participant set per round. Either a fixed set or a fresh uniform draw of
// a given size each round.
struct SelectionSchedule {
    enum class Kind { fixed, random_subset };
    Kind kind = Kind::random_subset;
    std::vector<std::uint8_t> fixed_flags;
    int subset_size = 1;
    std::uint64_t seed = 0;

    static SelectionSchedule fixed(std::vector<std::uint8_t> flags);
    static SelectionSchedule random_subset(int size, std::uint64_t seed);
};

// Runs `rounds` synchronous rounds of broadcast / local gradient step /
// aggregate-selected, returning the squared global gradient norm at the
// initial point and after every round (rounds+1 values).
std::vector<double> run_toy_fl(const ToyFlTask& task, const ConvergenceParams& p,
                               const SelectionSchedule& schedule);

double mean(const std::vector<double>& v);

}  // namespace risfl::convergence
