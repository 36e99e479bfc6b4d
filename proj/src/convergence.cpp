#include "risfl/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace risfl::convergence {

void ConvergenceParams::validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("mu must be > 0");
    if (!(delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
    if (!(f0 >= f_star)) throw std::invalid_argument("f0 must be >= f_star");
    if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
    if (!(alpha_fl > 0.0 && alpha_fl <= 1.0 / mu)) {
        throw std::invalid_argument("alpha_fl must satisfy 0 < alpha <= 1/mu");
    }
}

double bound_value(const ConvergenceParams& p, int total_devices, int participants) {
    if (participants < 1) {
        throw std::domain_error("bound undefined for an empty participant set");
    }
    if (participants > total_devices) {
        throw std::domain_error("participants exceed device count");
    }
    const double a = static_cast<double>(participants);
    const double k = static_cast<double>(total_devices);
    const double optimality_gap = 2.0 * p.mu * (p.f0 - p.f_star) / (p.rounds + 1.0);
    const double noise_floor = 2.0 * p.delta;
    const double selection_term = 2.0 * p.delta * (k - 2.0 * a) / (a * a) * a;
    return optimality_gap + noise_floor + selection_term;
}

double bound_value(const ConvergenceParams& p, int total_devices, const phy::Selection& sel) {
    return bound_value(p, total_devices, static_cast<int>(sel.participant_count()));
}

std::optional<int> min_participants(const ConvergenceParams& p, int total_devices) {
    // bound simplifies to C0 + 2*delta*K/a - 2*delta, monotone decreasing in a
    for (int a = 1; a <= total_devices; ++a) {
        if (bound_value(p, total_devices, a) <= p.epsilon) return a;
    }
    return std::nullopt;
}

double epsilon_for_min_participants(const ConvergenceParams& p, int total_devices, int target) {
    if (target < 1 || target > total_devices) {
        throw std::invalid_argument("target participant count out of range");
    }
    const double at_target = bound_value(p, total_devices, target);
    if (target == 1) {
        const double step = total_devices > 1
                                ? at_target - bound_value(p, total_devices, 2)
                                : 1.0;
        return at_target + 0.5 * std::max(step, 1e-9);
    }
    const double at_fewer = bound_value(p, total_devices, target - 1);
    if (!(at_fewer > at_target)) {
        throw std::invalid_argument(
            "bound is flat in the participant count (delta = 0?); target unreachable");
    }
    return 0.5 * (at_target + at_fewer);
}

void ToyFlTask::validate() const {
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
    if (optima.size() < 1) throw std::invalid_argument("need at least one device");
    if (data_weights.size() != optima.size()) {
        throw std::invalid_argument("data_weights/optima size mismatch");
    }
    if (static_cast<int>(curvature.size()) != dim || static_cast<int>(w0.size()) != dim) {
        throw std::invalid_argument("curvature/w0 must have length dim");
    }
    for (const auto& o : optima) {
        if (static_cast<int>(o.size()) != dim) {
            throw std::invalid_argument("optimum length mismatch");
        }
    }
    for (double h : curvature) {
        if (!(h > 0.0)) throw std::invalid_argument("curvature entries must be positive");
    }
}

double ToyFlTask::mu() const { return *std::max_element(curvature.begin(), curvature.end()); }

double ToyFlTask::delta_bound() const {
    // Iterates never leave the per-coordinate box spanned by |w0| and the
    // optima, so sup ||grad F_k||^2 over that box is exact and a priori.
    std::vector<double> radius(dim, 0.0);
    for (int i = 0; i < dim; ++i) {
        radius[i] = std::abs(w0[i]);
        for (const auto& o : optima) radius[i] = std::max(radius[i], std::abs(o[i]));
    }
    double worst = 0.0;
    for (const auto& o : optima) {
        double s = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double reach = radius[i] + std::abs(o[i]);
            s += curvature[i] * curvature[i] * reach * reach;
        }
        worst = std::max(worst, s);
    }
    return worst;
}

std::vector<double> ToyFlTask::global_optimum() const {
    std::vector<double> m(dim, 0.0);
    double total = 0.0;
    for (double w : data_weights) total += w;
    for (std::size_t k = 0; k < optima.size(); ++k) {
        for (int i = 0; i < dim; ++i) m[i] += data_weights[k] * optima[k][i];
    }
    for (int i = 0; i < dim; ++i) m[i] /= total;
    return m;
}

double ToyFlTask::loss(const std::vector<double>& w) const {
    double total_weight = 0.0;
    for (double dw : data_weights) total_weight += dw;
    double acc = 0.0;
    for (std::size_t k = 0; k < optima.size(); ++k) {
        double lk = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double d = w[i] - optima[k][i];
            lk += 0.5 * curvature[i] * d * d;
        }
        acc += data_weights[k] * lk;
    }
    return acc / total_weight;
}

double ToyFlTask::f_star() const { return loss(global_optimum()); }

std::vector<double> ToyFlTask::global_gradient(const std::vector<double>& w) const {
    double total_weight = 0.0;
    for (double dw : data_weights) total_weight += dw;
    std::vector<double> g(dim, 0.0);
    for (std::size_t k = 0; k < optima.size(); ++k) {
        for (int i = 0; i < dim; ++i) {
            g[i] += data_weights[k] * curvature[i] * (w[i] - optima[k][i]);
        }
    }
    for (int i = 0; i < dim; ++i) g[i] /= total_weight;
    return g;
}

std::vector<double> ToyFlTask::local_gradient(int device, const std::vector<double>& w) const {
    std::vector<double> g(dim, 0.0);
    for (int i = 0; i < dim; ++i) {
        g[i] = curvature[i] * (w[i] - optima[device][i]);
    }
    return g;
}

ToyFlTask make_toy_task(int devices, int dim, Rng& rng, bool isotropic) {
    ToyFlTask task;
    task.dim = dim;
    task.data_weights.assign(devices, 1.0);
    task.optima.resize(devices);
    for (auto& o : task.optima) {
        o.resize(dim);
        for (double& x : o) x = rng.uniform(-1.0, 1.0);
    }
    task.w0.resize(dim);
    for (double& x : task.w0) x = rng.uniform(-1.0, 1.0);
    task.curvature.resize(dim);
    if (isotropic || dim == 1) {
        std::fill(task.curvature.begin(), task.curvature.end(), 1.0);
    } else {
        // log-spaced in [0.25, 1] with the top entry exactly 1.0
        const double lo = std::log(0.25);
        for (int i = 0; i < dim; ++i) {
            const double t = static_cast<double>(i) / (dim - 1);
            task.curvature[i] = std::exp(lo * (1.0 - t));
        }
        task.curvature[dim - 1] = 1.0;
    }
    task.validate();
    return task;
}

SelectionSchedule SelectionSchedule::fixed(std::vector<std::uint8_t> flags) {
    SelectionSchedule s;
    s.kind = Kind::fixed;
    s.fixed_flags = std::move(flags);
    return s;
}

SelectionSchedule SelectionSchedule::random_subset(int size, std::uint64_t seed) {
    SelectionSchedule s;
    s.kind = Kind::random_subset;
    s.subset_size = size;
    s.seed = seed;
    return s;
}

namespace {

std::vector<std::uint8_t> draw_subset(int devices, int size, Rng& rng) {
    std::vector<int> idx(devices);
    std::iota(idx.begin(), idx.end(), 0);
    // partial Fisher-Yates for the first `size` slots
    for (int i = 0; i < size; ++i) {
        const int j = i + static_cast<int>(rng.uniform_int(devices - i));
        std::swap(idx[i], idx[j]);
    }
    std::vector<std::uint8_t> flags(devices, 0);
    for (int i = 0; i < size; ++i) flags[idx[i]] = 1;
    return flags;
}

}  // namespace

std::vector<double> run_toy_fl(const ToyFlTask& task, const ConvergenceParams& p,
                               const SelectionSchedule& schedule) {
    task.validate();
    p.validate();
    const int k = task.devices();
    const int d = task.dim;

    Rng sched_rng(schedule.seed);
    std::vector<double> w = task.w0;
    std::vector<double> trace;
    trace.reserve(p.rounds + 1);

    auto record = [&](const std::vector<double>& wt) {
        const auto g = task.global_gradient(wt);
        double n = 0.0;
        for (double gi : g) n += gi * gi;
        trace.push_back(n);
    };

    record(w);
    std::vector<std::vector<double>> locals(k, std::vector<double>(d));
    for (int t = 0; t < p.rounds; ++t) {
        std::vector<std::uint8_t> flags = schedule.kind == SelectionSchedule::Kind::fixed
                                              ? schedule.fixed_flags
                                              : draw_subset(k, schedule.subset_size, sched_rng);
        // broadcast, local gradient step per device
        for (int dev = 0; dev < k; ++dev) {
            const auto g = task.local_gradient(dev, w);
            for (int i = 0; i < d; ++i) locals[dev][i] = w[i] - p.alpha_fl * g[i];
        }
        // aggregate the selected local models
        std::vector<double> next(d, 0.0);
        int selected = 0;
        for (int dev = 0; dev < k; ++dev) {
            if (!flags[dev]) continue;
            ++selected;
            for (int i = 0; i < d; ++i) next[i] += locals[dev][i];
        }
        if (selected == 0) throw std::domain_error("schedule produced an empty round");
        for (int i = 0; i < d; ++i) next[i] /= selected;
        w = std::move(next);
        record(w);
    }
    return trace;
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace risfl::convergence
