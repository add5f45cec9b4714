#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "swmhd/analysis.hpp"
#include "swmhd/conservation.hpp"
#include "swmhd/core.hpp"
#include "swmhd/mass_scheme.hpp"
#include "swmhd/scenario.hpp"
#include "swmhd/threelayer_scheme.hpp"

// In-memory run driver shared by the CLI, the convergence harness and the
// acceptance checks. No file I/O here.

namespace swmhd {

struct LawReport {
    LawId id;
    ScanResult scan;
    double threshold;
    bool passed() const { return scan.max_residual <= threshold; }
};

struct FailureRecord {
    StepFailure::Kind kind;
    long step;
    std::size_t node;
    std::string message;
};

struct RunResult {
    std::vector<LayerState> snapshots;
    EnergyLedger ledger;
    std::vector<LawReport> laws;
    LayerState final_layer;
    std::vector<double> final_positions;  ///< x of the newest layer (both schemes)
    long steps = 0;
    long newton_total = 0;
    int newton_max = 0;
    double worst_residual = 0.0;
    double wall_seconds = 0.0;
    double kappa = 1.0;
    std::optional<FailureRecord> failure;

    bool ok() const { return !failure; }
    bool audits_passed() const
    {
        for (const auto& l : laws)
            if (!l.passed()) return false;
        return true;
    }
};

struct SimulateOptions {
    bool keep_snapshots = true;
    bool audit = true;
    bool ledger = true;
    /// Laws to scan; nullopt means audited_laws(scenario).
    std::optional<std::vector<LawId>> laws;
    /// Pass threshold of the law audit as a multiple of the Newton tolerance.
    double law_threshold_factor = 100.0;
    /// Also scan computable laws that are not expected to hold.
    bool include_inapplicable = false;
};

/// Reconstructs a displayable layer from two consecutive position layers of
/// the three-layer scheme: rho = h / dx, P = rho, backward-difference u.
inline LayerState layer_from_positions(const std::vector<double>& x_prev, const std::vector<double>& x,
                                       long step, double t, const Problem& pb)
{
    const std::size_t n = x.size() - 1;
    LayerState s;
    s.step = step;
    s.t = t;
    s.x = x;
    s.u.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) s.u[i] = (x[i] - x_prev[i]) / pb.mesh.tau;
    s.rho.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.rho[i] = pb.mesh.h / (x[i + 1] - x[i]);
    s.p_root = s.rho;
    s.omega.assign(n, 0.0);
    s.theta.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.theta[i] = compute_Q(s.rho[i], s.rho[i], s.p_root[i], pb.phys.alpha_sq);
    return s;
}

/// h times the sum of the three-layer energy density on the pair (a, b).
inline double threelayer_energy(const std::vector<double>& a, const std::vector<double>& b, double t_a,
                                const Problem& pb)
{
    const auto T = threelayer_law_density(LawId::energy, a, b, t_a, pb);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < T.size(); ++i) sum += T[i];
    return pb.mesh.h * sum;
}

inline RunResult simulate(const Scenario& sc, const SimulateOptions& opt = {})
{
    const auto start = std::chrono::steady_clock::now();
    const Problem pb = sc.problem();
    pb.validate();
    RunResult res;
    const long n_steps = sc.n_steps();
    const long cadence = sc.cadence_steps();
    const bool threelayer = sc.scheme == SchemeKind::threelayer;
    auto keep = [&](long n) { return opt.keep_snapshots && (n % cadence == 0 || n == n_steps); };

    std::vector<LawId> law_ids = opt.laws ? *opt.laws : audited_laws(sc);
    std::optional<LawMonitor> monitor;
    if (opt.audit) monitor.emplace(sc.scheme, pb, law_ids, !opt.include_inapplicable);

    LayerState layer = initial_state(sc.mesh, sc.phys, sc.initial);
    res.kappa = sc.phys.kappa.value_or(default_kappa(layer, sc.mesh));
    if (keep(0)) res.snapshots.push_back(layer);

    auto record_failure = [&](const StepFailure& f) {
        res.failure = FailureRecord{f.kind(), f.step(), f.node(), f.what()};
    };
    auto absorb_stats = [&](const StepStats& st) {
        res.newton_total += st.iterations;
        res.newton_max = std::max(res.newton_max, st.iterations);
        res.worst_residual = std::max(res.worst_residual, st.residual);
    };

    if (!threelayer) {
        if (opt.ledger) res.ledger.record(layer, pb, sc.output.energy_sampling);
        MassStepper stepper(pb);
        for (long n = 1; n <= n_steps; ++n) {
            LayerState next;
            try {
                next = stepper.step(layer);
            } catch (const StepFailure& f) {
                record_failure(f);
                break;
            }
            absorb_stats(stepper.last_stats());
            if (monitor) monitor->feed(layer, next);
            layer = std::move(next);
            res.steps = n;
            if (opt.ledger) res.ledger.record(layer, pb, sc.output.energy_sampling);
            if (keep(n)) res.snapshots.push_back(layer);
        }
        res.final_positions = layer.x;
        res.final_layer = std::move(layer);
    } else if (n_steps == 0) {
        res.final_positions = layer.x;
        res.final_layer = std::move(layer);
    } else {
        ThreeLayerState tl;
        try {
            tl = bootstrap_second_layer(layer, sc.mesh, sc.phys, sc.topo, sc.boundary);
        } catch (const ConfigError& e) {
            res.failure = FailureRecord{StepFailure::Kind::invariant_violation, 1, 0, e.what()};
            res.final_positions = layer.x;
            res.final_layer = std::move(layer);
            res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            return res;
        }
        res.steps = 1;
        {
            auto s = layer_from_positions(tl.x_prev, tl.x_curr, tl.step, tl.t, pb);
            if (opt.ledger)
                res.ledger.record(tl.step, tl.t, threelayer_energy(tl.x_prev, tl.x_curr, 0.0, pb),
                                  total_momentum(s, sc.mesh), total_mass(s));
            if (keep(1)) res.snapshots.push_back(std::move(s));
        }
        ThreeLayerStepper stepper(pb);
        for (long n = 2; n <= n_steps; ++n) {
            ThreeLayerState next;
            try {
                next = stepper.step(tl);
            } catch (const StepFailure& f) {
                record_failure(f);
                break;
            }
            absorb_stats(stepper.last_stats());
            if (monitor) monitor->feed(tl.x_prev, tl.x_curr, next.x_curr, tl.t, next.step);
            tl = std::move(next);
            res.steps = n;
            if (opt.ledger || keep(n)) {
                auto s = layer_from_positions(tl.x_prev, tl.x_curr, tl.step, tl.t, pb);
                if (opt.ledger)
                    res.ledger.record(tl.step, tl.t, threelayer_energy(tl.x_prev, tl.x_curr, tl.t - sc.mesh.tau, pb),
                                      total_momentum(s, sc.mesh), total_mass(s));
                if (keep(n)) res.snapshots.push_back(std::move(s));
            }
        }
        res.final_positions = tl.x_curr;
        res.final_layer = layer_from_positions(tl.x_prev, tl.x_curr, tl.step, tl.t, pb);
    }

    if (monitor)
        for (std::size_t k = 0; k < law_ids.size(); ++k)
            res.laws.push_back({law_ids[k], monitor->results()[k], opt.law_threshold_factor * sc.newton.tol});
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

} // namespace swmhd
