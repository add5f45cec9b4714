#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "swmhd/core.hpp"
#include "swmhd/error.hpp"
#include "swmhd/mass_scheme.hpp"
#include "swmhd/topography.hpp"
#include "swmhd/tridiagonal.hpp"

// Three-layer scheme for the node positions x(t, s):
//
//   (x^ - 2x + xv)/tau^2 - alpha^2 x_ss + (1/(x^_s xv_s))_s - B = 0
//
// x^ is the new layer, xv the old one. Cell i spans nodes i and i+1.

namespace swmhd {

/// Bottom source at one node and its derivative in the new position.
inline BottomSource threelayer_bottom(const Problem& pb, double x_new, double x_curr, double x_prev)
{
    BottomSource b;
    if (pb.topo.kind() == TopoKind::flat) return b;
    if (pb.topo.approx == BottomApprox::multiplier_variant) {
        b.value = b_check_multiplier(pb.topo, x_curr, pb.mesh.tau);
        return b;
    }
    // (b(x^) - b(xv)) / (x^ - xv): keeps the energy law for any bottom.
    b.value = bottom_secant(pb.topo, x_prev, x_new, pb.secant_eps());
    b.d_x = bottom_secant_dy(pb.topo, x_prev, x_new, pb.secant_eps());
    return b;
}

namespace detail {

inline void check_triple(const std::vector<double>& x_new, const std::vector<double>& x_curr,
                         const std::vector<double>& x_prev)
{
    if (x_new.size() != x_curr.size() || x_curr.size() != x_prev.size() || x_curr.size() < 2)
        throw ConfigError("three-layer scheme: layer lengths differ");
}

inline std::vector<double> flux_g(const std::vector<double>& x_new, const std::vector<double>& x_prev,
                                  double h)
{
    std::vector<double> g(x_new.size() - 1);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double a = (x_new[i + 1] - x_new[i]) / h;
        const double b = (x_prev[i + 1] - x_prev[i]) / h;
        if (!(a > 0.0) || !(b > 0.0))
            throw DegenerateStateError("three-layer scheme: cell inversion at cell " + std::to_string(i));
        g[i] = 1.0 / (a * b);
    }
    return g;
}

} // namespace detail

/// Node residuals of the scheme. End nodes carry the boundary equation:
/// (x^ - 2x + xv)/tau^2 for fixed velocity, minus B when bottom driven.
inline std::vector<double> threelayer_residual(const std::vector<double>& x_new,
                                               const std::vector<double>& x_curr,
                                               const std::vector<double>& x_prev, const Problem& pb)
{
    detail::check_triple(x_new, x_curr, x_prev);
    const std::size_t n = x_curr.size() - 1;
    const double h = pb.mesh.h;
    const double tau2 = pb.mesh.tau * pb.mesh.tau;
    const auto g = detail::flux_g(x_new, x_prev, h);

    std::vector<double> r(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        double v = (x_new[i] - 2.0 * x_curr[i] + x_prev[i]) / tau2;
        const bool boundary = (i == 0 || i == n);
        if (!boundary) {
            v -= pb.phys.alpha_sq * (x_curr[i + 1] - 2.0 * x_curr[i] + x_curr[i - 1]) / (h * h);
            v += (g[i] - g[i - 1]) / h;
        }
        if (!boundary || pb.boundary == BoundaryMode::bottom_driven)
            v -= threelayer_bottom(pb, x_new[i], x_curr[i], x_prev[i]).value;
        r[i] = v;
    }
    return r;
}

/// Newton matrix d(residual)/d(x^) in sweep form, with F = -residual.
inline TridiagonalSystem threelayer_jacobian(const std::vector<double>& x_new,
                                             const std::vector<double>& x_curr,
                                             const std::vector<double>& x_prev,
                                             const std::vector<double>& residual, const Problem& pb)
{
    const std::size_t n = x_curr.size() - 1;
    const double h = pb.mesh.h;
    const double inv_tau2 = 1.0 / (pb.mesh.tau * pb.mesh.tau);
    const auto g = detail::flux_g(x_new, x_prev, h);
    std::vector<double> k(n);
    for (std::size_t i = 0; i < n; ++i) k[i] = g[i] / ((x_new[i + 1] - x_new[i]) * h);

    TridiagonalSystem s(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        s.F[i] = -residual[i];
        s.C[i] = inv_tau2;
        const bool boundary = (i == 0 || i == n);
        if (!boundary || pb.boundary == BoundaryMode::bottom_driven)
            s.C[i] -= threelayer_bottom(pb, x_new[i], x_curr[i], x_prev[i]).d_x;
        if (boundary) continue;
        s.A[i] = k[i - 1];
        s.D[i] = k[i];
        s.C[i] += k[i] + k[i - 1];
    }
    return s;
}

class ThreeLayerStepper {
public:
    explicit ThreeLayerStepper(Problem pb) : pb_(std::move(pb)) { pb_.validate(); }

    const Problem& problem() const noexcept { return pb_; }
    const StepStats& last_stats() const noexcept { return stats_; }

    /// Solves for the next layer; returns the shifted window (x_curr, x^).
    ThreeLayerState step(const ThreeLayerState& state)
    {
        const long target = state.step + 1;
        const auto& xc = state.x_curr;
        const auto& xp = state.x_prev;
        detail::check_triple(xc, xc, xp);
        std::vector<double> x(xc.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = 2.0 * xc[i] - xp[i];
        if (check_positions(x)) x = xc;

        stats_ = {};
        bool converged = false;
        try {
            for (int it = 1; it <= pb_.newton.max_iters; ++it) {
                const auto r = threelayer_residual(x, xc, xp, pb_);
                const auto dx = thomas_solve(threelayer_jacobian(x, xc, xp, r, pb_));
                double lambda = 1.0;
                std::vector<double> trial(x.size());
                for (int halvings = 0;; ++halvings) {
                    for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + lambda * dx[i];
                    const auto bad = check_positions(trial);
                    if (!bad) break;
                    if (halvings == max_halvings)
                        throw StepFailure(StepFailure::Kind::invariant_violation, target, bad->index,
                                          "cell inversion persists after damping");
                    lambda *= 0.5;
                }
                x.swap(trial);
                stats_.iterations = it;
                stats_.last_increment = 0.0;
                for (double d : dx) stats_.last_increment = std::max(stats_.last_increment, std::abs(lambda * d));
                if (!std::isfinite(stats_.last_increment)) break;
                if (stats_.last_increment <= pb_.newton.tol && lambda == 1.0) {
                    converged = true;
                    break;
                }
            }
        } catch (const DegenerateStateError& e) {
            throw StepFailure(StepFailure::Kind::degenerate, target, 0, e.what());
        } catch (const SingularSystemError& e) {
            throw StepFailure(StepFailure::Kind::degenerate, target, e.row(), e.what());
        }
        if (!converged)
            throw StepFailure(StepFailure::Kind::non_convergence, target, 0,
                              "Newton did not converge in " + std::to_string(pb_.newton.max_iters)
                                  + " iterations");
        const auto r = threelayer_residual(x, xc, xp, pb_);
        stats_.residual = 0.0;
        for (double v : r) stats_.residual = std::max(stats_.residual, std::abs(v));

        ThreeLayerState next;
        next.step = target;
        next.t = static_cast<double>(target) * pb_.mesh.tau;
        next.x_prev = xc;
        next.x_curr = std::move(x);
        return next;
    }

    static constexpr int max_halvings = 20;

private:
    Problem pb_;
    StepStats stats_;
};

inline ThreeLayerState threelayer_step(const ThreeLayerState& state, const Problem& pb)
{
    ThreeLayerStepper s(pb);
    return s.step(state);
}

} // namespace swmhd
