#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "swmhd/error.hpp"
#include "swmhd/scenario.hpp"
#include "swmhd/simulate.hpp"

// Richardson self-convergence under joint (h, tau) refinement. Level k uses
// h / 2^k with the same tau/h ratio. The compared quantity is the node
// position x at t_end on the nodes common to all levels (node j of level k
// is node 2j of level k + 1). With successive differences
// d_k = max |x_k - x_{k+1}|, the observed order is log2(d_k / d_{k+1}).

namespace swmhd {

struct ConvergenceLevel {
    double h = 0.0;
    double tau = 0.0;
    long steps = 0;
    std::vector<double> x;  ///< final positions on this level's nodes
};

struct ConvergenceTable {
    std::vector<ConvergenceLevel> levels;
    std::vector<double> differences;  ///< d_k, size levels - 1
    std::vector<double> orders;       ///< size levels - 2
    bool exact = false;               ///< all differences at round-off

    /// Order from the two finest differences.
    double finest_order() const { return orders.empty() ? std::nan("") : orders.back(); }
};

inline Scenario refined(const Scenario& base, int level)
{
    Scenario sc = base;
    const double h = base.mesh.h / std::ldexp(1.0, level);
    sc.mesh = Mesh::uniform(base.mesh.s_length, h, base.tau_ratio * h);
    sc.output.cadence.reset();
    return sc;
}

/// Orders from successive differences; 'exact' when every difference is
/// below round_off.
inline ConvergenceTable convergence_orders(std::vector<ConvergenceLevel> levels, double round_off)
{
    ConvergenceTable t;
    t.levels = std::move(levels);
    for (std::size_t k = 0; k + 1 < t.levels.size(); ++k) {
        const auto& a = t.levels[k].x;
        const auto& b = t.levels[k + 1].x;
        if (b.size() != 2 * a.size() - 1)
            throw ConfigError("convergence: level " + std::to_string(k + 1) + " does not refine level "
                              + std::to_string(k) + " by two");
        double d = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[j] - b[2 * j]));
        t.differences.push_back(d);
    }
    t.exact = std::all_of(t.differences.begin(), t.differences.end(),
                          [&](double d) { return d <= round_off; });
    if (!t.exact)
        for (std::size_t k = 0; k + 1 < t.differences.size(); ++k)
            t.orders.push_back(std::log2(t.differences[k] / t.differences[k + 1]));
    return t;
}

/// Runs the levels concurrently (one task per level) and tabulates orders.
/// Throws StepFailure if any level fails.
inline ConvergenceTable observed_order(const Scenario& base, int levels)
{
    if (levels < 3) throw ConfigError("convergence: at least three levels are required");
    if (base.t_end <= 0.0) throw ConfigError("convergence: t_end must be positive");
    std::vector<std::future<ConvergenceLevel>> tasks;
    for (int k = 0; k < levels; ++k) {
        tasks.push_back(std::async(std::launch::async, [&base, k] {
            const Scenario sc = refined(base, k);
            const long steps = sc.n_steps();
            if (std::abs(static_cast<double>(steps) * sc.mesh.tau - sc.t_end) > 1e-9 * sc.t_end)
                throw ConfigError("convergence: t_end is not a multiple of tau on level " + std::to_string(k));
            SimulateOptions opt;
            opt.keep_snapshots = false;
            opt.audit = false;
            opt.ledger = false;
            auto r = simulate(sc, opt);
            if (r.failure)
                throw StepFailure(r.failure->kind, r.failure->step, r.failure->node,
                                  "level " + std::to_string(k) + ": " + r.failure->message);
            return ConvergenceLevel{sc.mesh.h, sc.mesh.tau, steps, std::move(r.final_positions)};
        }));
    }
    std::vector<ConvergenceLevel> out;
    for (auto& f : tasks) out.push_back(f.get());
    double scale = 0.0;
    for (double v : out.back().x) scale = std::max(scale, std::abs(v));
    return convergence_orders(std::move(out), 1e-12 * std::max(1.0, scale));
}

} // namespace swmhd
