#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "swmhd/core.hpp"
#include "swmhd/error.hpp"
#include "swmhd/pointwise.hpp"
#include "swmhd/topography.hpp"
#include "swmhd/tridiagonal.hpp"

// Two-layer scheme in mass-Lagrangian coordinates. Unknowns of the new
// layer: x, u on nodes; rho, P, omega, theta on cells. Residuals
//
//   f1 = rho - rho' + tau/(2h) rho' rho (du + du')      (cells)
//   f2 = u - u' + tau/h (theta_i - theta_{i-1}) - tau B (interior nodes)
//   f3 = x - x' - tau u'                                (nodes)
//   f4 = P - rho' P' / (2P' - rho')                     (cells)
//   f5 = omega - Omega(rho, u_s)                        (cells)
//   f6 = theta - Q(rho, rho', P) + omega                (cells)
//
// where primes denote the old layer and du = u_{i+1} - u_i.

namespace swmhd {

template <class T>
struct MassIterate {
    std::vector<T> x, u, rho, p_root, omega, theta;
};

template <class T>
struct MassResiduals {
    std::vector<T> f1, f2, f3, f4, f5, f6;
};

inline MassIterate<double> to_iterate(const LayerState& s)
{
    return {s.x, s.u, s.rho, s.p_root, s.omega, s.theta};
}

/// Compression flags u_{i+1} < u_i per cell.
template <class T>
std::vector<char> compression_switches(const std::vector<T>& u)
{
    std::vector<char> c(u.size() - 1);
    for (std::size_t i = 0; i + 1 < u.size(); ++i) c[i] = value_of(u[i + 1]) < value_of(u[i]);
    return c;
}

/// Bottom source at node i of the new layer and its derivatives with
/// respect to the new u and x.
struct BottomSource {
    double value = 0.0;
    double d_u = 0.0;
    double d_x = 0.0;
};

template <class T>
T mass_bottom_source(const Problem& pb, const T& x_new, double x_old, const T& u_new)
{
    if (pb.topo.kind() == TopoKind::flat) return T(0.0);
    if (pb.topo.approx == BottomApprox::multiplier_variant)
        return b_check_multiplier(pb.topo, x_new, pb.mesh.tau);
    return b_check_energy(pb.topo, x_new, T(x_old), u_new, pb.mesh.tau, pb.secant_eps());
}

inline BottomSource mass_bottom_jacobian(const Problem& pb, double x_new, double x_old, double u_new)
{
    BottomSource b;
    if (pb.topo.kind() == TopoKind::flat) return b;
    const double tau = pb.mesh.tau;
    if (pb.topo.approx == BottomApprox::multiplier_variant) {
        b.value = b_check_multiplier(pb.topo, x_new, tau);
        b.d_x = parabolic_multiplier_factor(pb.topo, tau);
        return b;
    }
    const double y = x_new + tau * u_new;
    b.value = bottom_secant(pb.topo, x_old, y, pb.secant_eps());
    b.d_x = bottom_secant_dy(pb.topo, x_old, y, pb.secant_eps());
    b.d_u = tau * b.d_x;
    return b;
}

/// The six residual families at an iterate. The compression switch is
/// passed in so that it can be frozen during a Newton solve.
template <class T>
MassResiduals<T> mass_residuals(const LayerState& prev, const MassIterate<T>& it, const Problem& pb,
                                const std::vector<char>& compressed)
{
    const std::size_t n = prev.n_cells();
    const double h = pb.mesh.h;
    const double tau = pb.mesh.tau;
    const double nu = pb.visc.nu(h);
    const double mu = pb.visc.mu(h);

    MassResiduals<T> r;
    r.f1.resize(n);
    r.f4.resize(n);
    r.f5.resize(n);
    r.f6.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const T du = it.u[i + 1] - it.u[i];
        const double du_old = prev.u[i + 1] - prev.u[i];
        r.f1[i] = it.rho[i] - prev.rho[i] + tau / (2.0 * h) * prev.rho[i] * it.rho[i] * (du + du_old);
        r.f4[i] = it.p_root[i] - state_equation_update(prev.rho[i], prev.p_root[i]);
        r.f5[i] = it.omega[i] - compute_Omega_switched(it.rho[i], du / h, nu, mu, compressed[i] != 0);
        r.f6[i] = it.theta[i] - compute_Q(it.rho[i], T(prev.rho[i]), it.p_root[i], pb.phys.alpha_sq)
            + it.omega[i];
    }

    r.f2.resize(n + 1);
    r.f3.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        r.f3[i] = it.x[i] - prev.x[i] - tau * prev.u[i];
        T f = it.u[i] - prev.u[i];
        const bool boundary = (i == 0 || i == n);
        if (!boundary) f += tau / h * (it.theta[i] - it.theta[i - 1]);
        if (!boundary || pb.boundary == BoundaryMode::bottom_driven)
            f -= tau * mass_bottom_source(pb, it.x[i], prev.x[i], it.u[i]);
        r.f2[i] = f;
    }
    return r;
}

template <class T>
double max_abs(const MassResiduals<T>& r)
{
    double m = 0.0;
    for (const auto* v : {&r.f1, &r.f2, &r.f3, &r.f4, &r.f5, &r.f6})
        for (const auto& e : *v) m = std::max(m, std::abs(value_of(e)));
    return m;
}

/// Result of eliminating every increment except the node velocities.
/// Cell increments are affine in du_i = du[i+1] - du[i]:
///   drho = a + c du_i, domega = omega0 + omega1 du_i, dtheta = g + e du_i.
struct NewtonWorkspace {
    MassResiduals<double> res;
    std::vector<char> compressed;
    std::vector<double> dx, dp_root;                 // fixed by f3, f4
    std::vector<double> a, c, omega0, omega1, g, e;  // cells
    TridiagonalSystem system;                        // for du, nodes
};

struct MassIncrements {
    std::vector<double> du, drho, dx, dp_root, domega, dtheta;

    double max_abs() const
    {
        double m = 0.0;
        for (const auto* v : {&du, &drho, &dx, &dp_root, &domega, &dtheta})
            for (double e : *v) m = std::max(m, std::abs(e));
        return m;
    }
};

/// Builds the three-point system A du_{i-1} - C du_i + D du_{i+1} = -F from
/// the analytic Jacobian at the iterate. Residuals and switches must already
/// be in ws.
inline void eliminate_to_three_point(NewtonWorkspace& ws, const LayerState& prev,
                                     const MassIterate<double>& it, const Problem& pb)
{
    const std::size_t n = prev.n_cells();
    const double h = pb.mesh.h;
    const double tau = pb.mesh.tau;
    const double nu = pb.visc.nu(h);
    const double mu = pb.visc.mu(h);
    const auto& r = ws.res;

    ws.dx.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) ws.dx[i] = -r.f3[i];
    ws.dp_root.resize(n);
    for (auto* v : {&ws.a, &ws.c, &ws.omega0, &ws.omega1, &ws.g, &ws.e}) v->resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        ws.dp_root[i] = -r.f4[i];
        const double rho_old = prev.rho[i];
        const double rho = it.rho[i];
        const double du = it.u[i + 1] - it.u[i];
        const double du_old = prev.u[i + 1] - prev.u[i];

        const double j11 = 1.0 + tau / (2.0 * h) * rho_old * (du + du_old);
        if (j11 == 0.0 || !std::isfinite(j11))
            throw DegenerateStateError("continuity pivot vanishes at cell " + std::to_string(i));
        ws.a[i] = -r.f1[i] / j11;
        ws.c[i] = -tau / (2.0 * h) * rho_old * rho / j11;

        double omega_rho = 0.0, w = 0.0;
        if (ws.compressed[i]) {
            const double us = du / h;
            omega_rho = nu * us - mu * us * us;
            w = rho * (nu - 2.0 * mu * us) / h;
        }
        ws.omega0[i] = -r.f5[i] + omega_rho * ws.a[i];
        ws.omega1[i] = omega_rho * ws.c[i] + w;

        const auto dq = compute_Q_derivatives(rho, rho_old, it.p_root[i], pb.phys.alpha_sq);
        ws.g[i] = -r.f6[i] - ws.omega0[i] + dq.d_rho * ws.a[i] + dq.d_p_root * ws.dp_root[i];
        ws.e[i] = -ws.omega1[i] + dq.d_rho * ws.c[i];
    }

    auto& s = ws.system;
    s = TridiagonalSystem(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const bool boundary = (i == 0 || i == n);
        if (boundary && pb.boundary == BoundaryMode::fixed_velocity) {
            s.C[i] = 1.0;
            s.F[i] = -r.f2[i];
            continue;
        }
        const auto b = mass_bottom_jacobian(pb, it.x[i], prev.x[i], it.u[i]);
        s.C[i] = 1.0 - tau * b.d_u;
        s.F[i] = -(r.f2[i] - tau * b.d_x * ws.dx[i]);
        if (boundary) continue;
        s.A[i] = -tau / h * ws.e[i - 1];
        s.D[i] = -tau / h * ws.e[i];
        s.C[i] -= tau / h * (ws.e[i] + ws.e[i - 1]);
        s.F[i] -= tau / h * (ws.g[i] - ws.g[i - 1]);
    }
}

/// Recovers the cell increments from the node velocity increments.
inline MassIncrements back_substitute(const NewtonWorkspace& ws, std::vector<double> du)
{
    const std::size_t n = ws.a.size();
    MassIncrements d;
    d.dx = ws.dx;
    d.dp_root = ws.dp_root;
    d.drho.resize(n);
    d.domega.resize(n);
    d.dtheta.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ddu = du[i + 1] - du[i];
        d.drho[i] = ws.a[i] + ws.c[i] * ddu;
        d.domega[i] = ws.omega0[i] + ws.omega1[i] * ddu;
        d.dtheta[i] = ws.g[i] + ws.e[i] * ddu;
    }
    d.du = std::move(du);
    return d;
}

/// One full Newton increment at the iterate (residuals, elimination, sweep,
/// back substitution) with the compression switch taken from the iterate.
inline MassIncrements newton_increment(NewtonWorkspace& ws, const LayerState& prev,
                                       const MassIterate<double>& it, const Problem& pb)
{
    ws.compressed = compression_switches(it.u);
    ws.res = mass_residuals(prev, it, pb, ws.compressed);
    eliminate_to_three_point(ws, prev, it, pb);
    return back_substitute(ws, thomas_solve(ws.system));
}

struct StepStats {
    int iterations = 0;
    double last_increment = 0.0;
    double residual = 0.0;  ///< max |f| re-evaluated at the accepted layer
};

class MassStepper {
public:
    explicit MassStepper(Problem pb) : pb_(std::move(pb)) { pb_.validate(); }

    const Problem& problem() const noexcept { return pb_; }
    const StepStats& last_stats() const noexcept { return stats_; }

    /// Advances one layer. Throws StepFailure.
    LayerState step(const LayerState& prev)
    {
        const long target = prev.step + 1;
        MassIterate<double> it = to_iterate(prev);
        stats_ = {};
        bool converged = false;
        try {
            for (int k = 1; k <= pb_.newton.max_iters; ++k) {
                const auto d = newton_increment(ws_, prev, it, pb_);
                apply(it, d);
                stats_.iterations = k;
                stats_.last_increment = d.max_abs();
                if (!std::isfinite(stats_.last_increment)) break;
                if (stats_.last_increment <= pb_.newton.tol) {
                    converged = true;
                    break;
                }
            }
        } catch (const DegenerateStateError& e) {
            throw StepFailure(StepFailure::Kind::degenerate, target, worst_cell(it), e.what());
        } catch (const SingularSystemError& e) {
            throw StepFailure(StepFailure::Kind::degenerate, target, e.row(), e.what());
        }
        if (!converged)
            throw StepFailure(StepFailure::Kind::non_convergence, target, worst_node(),
                              "Newton did not converge in " + std::to_string(pb_.newton.max_iters)
                                  + " iterations (last increment "
                                  + std::to_string(stats_.last_increment) + ")");

        LayerState next{target, prev.t + pb_.mesh.tau, std::move(it.x), std::move(it.u),
                        std::move(it.rho), std::move(it.p_root), std::move(it.omega),
                        std::move(it.theta)};
        // Exact step time, not an accumulated sum.
        next.t = static_cast<double>(target) * pb_.mesh.tau;
        if (auto v = check_layer(next))
            throw StepFailure(StepFailure::Kind::invariant_violation, target, v->index, v->what);
        stats_.residual = max_abs(mass_residuals(prev, to_iterate(next), pb_,
                                                 compression_switches(next.u)));
        return next;
    }

private:
    static void apply(MassIterate<double>& it, const MassIncrements& d)
    {
        for (std::size_t i = 0; i < it.x.size(); ++i) {
            it.x[i] += d.dx[i];
            it.u[i] += d.du[i];
        }
        for (std::size_t i = 0; i < it.rho.size(); ++i) {
            it.rho[i] += d.drho[i];
            it.p_root[i] += d.dp_root[i];
            it.omega[i] += d.domega[i];
            it.theta[i] += d.dtheta[i];
        }
    }

    // Node with the largest velocity residual in the last iteration.
    std::size_t worst_node() const
    {
        const auto& f = ws_.res.f2;
        if (f.empty()) return 0;
        auto it = std::max_element(f.begin(), f.end(),
                                   [](double a, double b) { return std::abs(a) < std::abs(b); });
        return static_cast<std::size_t>(it - f.begin());
    }

    static std::size_t worst_cell(const MassIterate<double>& it)
    {
        std::size_t worst = 0;
        double lo = INFINITY;
        for (std::size_t i = 0; i < it.rho.size(); ++i) {
            const double m = std::min(it.rho[i], 2.0 * it.p_root[i] - it.rho[i]);
            if (!(m >= lo)) {
                lo = m;
                worst = i;
            }
        }
        return worst;
    }

    Problem pb_;
    NewtonWorkspace ws_;
    StepStats stats_;
};

/// Convenience wrapper around a one-off MassStepper.
inline LayerState mass_step(const LayerState& prev, const Problem& pb)
{
    MassStepper s(pb);
    return s.step(prev);
}

} // namespace swmhd
