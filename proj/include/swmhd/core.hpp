#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "swmhd/error.hpp"
#include "swmhd/pointwise.hpp"
#include "swmhd/spline.hpp"
#include "swmhd/topography.hpp"

namespace swmhd {

/// Uniform orthogonal mesh in the mass coordinate s and time t.
struct Mesh {
    double h = 0.1;        ///< step in s
    double tau = 0.005;    ///< step in t
    std::size_t n_cells = 40;
    double s_length = 4.0;

    static Mesh uniform(double s_length, double h, double tau)
    {
        if (!(h > 0.0)) throw ConfigError("mesh.h: must be positive");
        const double cells = std::round(s_length / h);
        if (!(cells >= 2.0)) throw ConfigError("mesh: at least two cells are required");
        Mesh m{h, tau, static_cast<std::size_t>(cells), s_length};
        m.validate();
        return m;
    }

    void validate() const
    {
        if (!(h > 0.0)) throw ConfigError("mesh.h: must be positive");
        if (!(tau > 0.0)) throw ConfigError("mesh.tau: must be positive");
        if (n_cells < 2) throw ConfigError("mesh.n_cells: at least two cells are required");
        if (std::abs(static_cast<double>(n_cells) * h - s_length) > 0.5 * h)
            throw ConfigError("mesh: n_cells * h does not match s_length");
    }

    std::size_t n_nodes() const noexcept { return n_cells + 1; }
    double node_s(std::size_t i) const noexcept { return static_cast<double>(i) * h; }
    double cell_s(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * h; }

    friend bool operator==(const Mesh&, const Mesh&) = default;
};

/// Dimensionless physical constants. g1 is normalized to 2.
struct PhysParams {
    double alpha_sq = 0.0;
    double g1 = 2.0;
    /// Display scale of the magnetic-gradient field; nullopt picks it from
    /// the initial state.
    std::optional<double> kappa;

    void validate() const
    {
        if (!(alpha_sq >= 0.0)) throw ConfigError("alpha_sq: must be non-negative");
        if (g1 != 2.0) throw ConfigError("g1: the equations are normalized to g1 = 2");
    }

    friend bool operator==(const PhysParams&, const PhysParams&) = default;
};

/// Linear and quadratic pseudo-viscosity, nu = nu0 h and
/// mu = 3/(2 pi^2) mu0^2 h^2.
struct ViscosityParams {
    double nu0 = 0.0;
    double mu0 = 0.0;

    double nu(double h) const noexcept { return nu0 * h; }
    double mu(double h) const noexcept
    {
        return 3.0 / (2.0 * std::numbers::pi * std::numbers::pi) * mu0 * mu0 * h * h;
    }
    bool inviscid() const noexcept { return nu0 == 0.0 && mu0 == 0.0; }

    void validate() const
    {
        if (!(nu0 >= 0.0)) throw ConfigError("nu0: must be non-negative");
        if (!(mu0 >= 0.0)) throw ConfigError("mu0: must be non-negative");
    }

    friend bool operator==(const ViscosityParams&, const ViscosityParams&) = default;
};

struct NewtonSettings {
    double tol = 1e-12;     ///< max-norm threshold on iteration increments
    int max_iters = 50;

    void validate() const
    {
        if (!(tol > 0.0)) throw ConfigError("newton.tol: must be positive");
        if (max_iters < 1) throw ConfigError("newton.max_iters: must be at least 1");
    }

    friend bool operator==(const NewtonSettings&, const NewtonSettings&) = default;
};

/// How the end nodes move.
///  - fixed_velocity: the boundary velocity keeps its initial value.
///  - bottom_driven: boundary nodes are accelerated by the bottom source
///    only (no pressure flux); for an inclined bottom this is the frame in
///    which the inclined problem maps onto the horizontal one.
enum class BoundaryMode { fixed_velocity, bottom_driven };

inline const char* to_string(BoundaryMode m)
{
    return m == BoundaryMode::fixed_velocity ? "fixed_velocity" : "bottom_driven";
}

/// One time layer of the two-layer scheme. Nodes carry x and u
/// (n_cells + 1 values); cells carry rho, P = sqrt(p), omega and
/// theta = Q - omega (n_cells values). Cell i lies between nodes i and i+1.
struct LayerState {
    long step = 0;
    double t = 0.0;
    std::vector<double> x, u;
    std::vector<double> rho, p_root, omega, theta;

    std::size_t n_cells() const noexcept { return rho.size(); }

    friend bool operator==(const LayerState&, const LayerState&) = default;
};

/// Everything a stepper needs besides the state.
struct Problem {
    Mesh mesh;
    PhysParams phys;
    Topography topo;
    ViscosityParams visc;
    NewtonSettings newton;
    BoundaryMode boundary = BoundaryMode::fixed_velocity;

    void validate() const
    {
        mesh.validate();
        phys.validate();
        topo.validate();
        visc.validate();
        newton.validate();
    }

    /// Threshold below which secant quotients switch to their limit.
    double secant_eps() const noexcept { return 1e-10 * mesh.h; }
};

/// Two consecutive position layers of the three-layer scheme.
struct ThreeLayerState {
    long step = 1;    ///< layer index of x_curr
    double t = 0.0;   ///< time of x_curr
    std::vector<double> x_prev, x_curr;

    friend bool operator==(const ThreeLayerState&, const ThreeLayerState&) = default;
};

struct InvariantViolation {
    std::size_t index;
    std::string what;
};

/// First violated layer invariant, if any.
inline std::optional<InvariantViolation> check_layer(const LayerState& s)
{
    const std::size_t n = s.n_cells();
    if (s.x.size() != n + 1 || s.u.size() != n + 1 || s.p_root.size() != n || s.omega.size() != n
        || s.theta.size() != n)
        return InvariantViolation{0, "array lengths do not match the mesh"};
    for (std::size_t i = 0; i < n; ++i) {
        if (!(s.rho[i] > 0.0) || !std::isfinite(s.rho[i]))
            return InvariantViolation{i, "non-positive density " + std::to_string(s.rho[i])};
        if (!(s.p_root[i] > 0.0) || !std::isfinite(s.p_root[i]))
            return InvariantViolation{i, "non-positive pressure root " + std::to_string(s.p_root[i])};
        if (!(2.0 * s.p_root[i] - s.rho[i] > 0.0))
            return InvariantViolation{i, "2P - rho <= 0"};
        if (!(s.x[i + 1] > s.x[i]))
            return InvariantViolation{i, "cell inversion (x not strictly increasing)"};
    }
    return std::nullopt;
}

inline std::optional<InvariantViolation> check_positions(const std::vector<double>& x)
{
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i + 1] > x[i]) || !std::isfinite(x[i + 1]))
            return InvariantViolation{i, "cell inversion (x not strictly increasing)"};
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Initial conditions

namespace initial {

/// Two states split at s = S/2, smoothed by a tanh ramp of length scale
/// smoothing_width (default 5h, 0 for a sharp step).
struct DamBreak {
    double rho_left = 1.0;
    double rho_right = 0.5;
    std::optional<double> smoothing_width;
    friend bool operator==(const DamBreak&, const DamBreak&) = default;
};

/// Column of height peak on [span_lo, span_hi] over a layer of height base.
struct Column {
    double base = 0.5;
    double peak = 1.0;
    double span_lo = 1.5;
    double span_hi = 2.5;
    std::optional<double> smoothing_width;
    friend bool operator==(const Column&, const Column&) = default;
};

/// Tabulated rho(s) and u(s), interpolated by natural cubic splines.
struct SmoothCustom {
    std::vector<double> s, rho, u;
    friend bool operator==(const SmoothCustom&, const SmoothCustom&) = default;
};

/// rho = base + amplitude cos(2 pi modes s / S), u = 0. Standing wave
/// compatible with walls at both ends.
struct Wave {
    double base = 1.0;
    double amplitude = 0.05;
    int modes = 1;
    friend bool operator==(const Wave&, const Wave&) = default;
};

} // namespace initial

using InitialCondition =
    std::variant<initial::DamBreak, initial::Column, initial::SmoothCustom, initial::Wave>;

/// Builds a layer from rho at cell centers and u at nodes: P = rho (so
/// p = rho^2 exactly), x[0] = 0 and x[i+1] = x[i] + h / rho[i], omega = 0
/// and theta = Q(rho, rho, P).
inline LayerState layer_from_profile(const Mesh& mesh, const PhysParams& phys,
                                     const std::function<double(double)>& rho_of_s,
                                     const std::function<double(double)>& u_of_s)
{
    mesh.validate();
    const std::size_t n = mesh.n_cells;
    LayerState s;
    s.rho.resize(n);
    s.u.resize(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        s.rho[i] = rho_of_s(mesh.cell_s(i));
        if (!(s.rho[i] > 0.0))
            throw ConfigError("initial: non-positive height " + std::to_string(s.rho[i]) + " at s = "
                              + std::to_string(mesh.cell_s(i)));
    }
    for (std::size_t i = 0; i <= n; ++i) s.u[i] = u_of_s(mesh.node_s(i));
    s.p_root = s.rho;
    s.x.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) s.x[i + 1] = s.x[i] + mesh.h / s.rho[i];
    s.omega.assign(n, 0.0);
    s.theta.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        s.theta[i] = compute_Q(s.rho[i], s.rho[i], s.p_root[i], phys.alpha_sq);
    return s;
}

namespace detail {

inline double smoothing_or_default(const std::optional<double>& w, const Mesh& mesh)
{
    const double width = w.value_or(5.0 * mesh.h);
    if (!(width >= 0.0)) throw ConfigError("initial.smoothing_width: must be non-negative");
    if (width > 0.5 * mesh.s_length)
        throw ConfigError("initial.smoothing_width: exceeds half the domain");
    return width;
}

/// 1 for s << s0, 0 for s >> s0.
inline double step_down(double s, double s0, double width)
{
    if (width == 0.0) return s < s0 ? 1.0 : 0.0;
    return 0.5 * (1.0 - std::tanh((s - s0) / width));
}

} // namespace detail

inline LayerState init_dam_break(const Mesh& mesh, const PhysParams& phys, double rho_left,
                                 double rho_right, std::optional<double> width = std::nullopt)
{
    if (!(rho_left > 0.0) || !(rho_right > 0.0))
        throw ConfigError("initial: dam-break heights must be positive");
    const double w = detail::smoothing_or_default(width, mesh);
    const double s0 = 0.5 * mesh.s_length;
    return layer_from_profile(
        mesh, phys,
        [=](double s) { return rho_right + (rho_left - rho_right) * detail::step_down(s, s0, w); },
        [](double) { return 0.0; });
}

inline LayerState init_column(const Mesh& mesh, const PhysParams& phys, double base, double peak,
                              double span_lo, double span_hi,
                              std::optional<double> width = std::nullopt)
{
    if (!(base > 0.0) || !(peak >= base))
        throw ConfigError("initial: column requires peak >= base > 0");
    if (!(span_lo >= 0.0) || !(span_hi <= mesh.s_length) || !(span_lo < span_hi))
        throw ConfigError("initial.span: must be an interval inside [0, S]");
    const double w = detail::smoothing_or_default(width, mesh);
    const double S = mesh.s_length;
    return layer_from_profile(
        mesh, phys,
        [=](double s) {
            const double left = span_lo <= 0.0 ? 1.0 : 1.0 - detail::step_down(s, span_lo, w);
            const double right = span_hi >= S ? 1.0 : detail::step_down(s, span_hi, w);
            return base + (peak - base) * left * right;
        },
        [](double) { return 0.0; });
}

inline LayerState init_smooth_custom(const Mesh& mesh, const PhysParams& phys,
                                     const initial::SmoothCustom& table)
{
    const CubicSpline rho(table.s, table.rho);
    const CubicSpline u(table.s, table.u);
    return layer_from_profile(mesh, phys, rho, u);
}

inline LayerState init_wave(const Mesh& mesh, const PhysParams& phys, const initial::Wave& w)
{
    if (!(w.base > std::abs(w.amplitude)))
        throw ConfigError("initial: wave amplitude must be smaller than the base height");
    const double k = 2.0 * std::numbers::pi * w.modes / mesh.s_length;
    return layer_from_profile(
        mesh, phys, [=](double s) { return w.base + w.amplitude * std::cos(k * s); },
        [](double) { return 0.0; });
}

inline LayerState initial_state(const Mesh& mesh, const PhysParams& phys, const InitialCondition& ic)
{
    return std::visit(
        [&](const auto& v) -> LayerState {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, initial::DamBreak>)
                return init_dam_break(mesh, phys, v.rho_left, v.rho_right, v.smoothing_width);
            else if constexpr (std::is_same_v<V, initial::Column>)
                return init_column(mesh, phys, v.base, v.peak, v.span_lo, v.span_hi, v.smoothing_width);
            else if constexpr (std::is_same_v<V, initial::SmoothCustom>)
                return init_smooth_custom(mesh, phys, v);
            else return init_wave(mesh, phys, v);
        },
        ic);
}

/// Discrete acceleration alpha^2 x_ss - (x_s^-2)_s + b'(x) at the interior
/// nodes of a position layer. End nodes get b'(x) for bottom-driven
/// boundaries and 0 otherwise.
inline std::vector<double> layer_acceleration(const std::vector<double>& x, const Mesh& mesh,
                                              const PhysParams& phys, const Topography& topo,
                                              BoundaryMode boundary)
{
    const std::size_t n = x.size() - 1;
    const double h = mesh.h;
    std::vector<double> a(n + 1, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double sl = (x[i] - x[i - 1]) / h;
        const double sr = (x[i + 1] - x[i]) / h;
        a[i] = phys.alpha_sq * (sr - sl) / h - (1.0 / (sr * sr) - 1.0 / (sl * sl)) / h
            + bottom_slope(topo, x[i]);
    }
    if (boundary == BoundaryMode::bottom_driven) {
        a[0] = bottom_slope(topo, x[0]);
        a[n] = bottom_slope(topo, x[n]);
    }
    return a;
}

/// Second position layer for the three-layer scheme by a Taylor step,
/// x1 = x0 + tau u + tau^2/2 a. Local error O(tau^3).
inline ThreeLayerState bootstrap_second_layer(const LayerState& state, const Mesh& mesh,
                                              const PhysParams& phys, const Topography& topo,
                                              BoundaryMode boundary = BoundaryMode::fixed_velocity)
{
    if (auto v = check_layer(state))
        throw ConfigError("bootstrap_second_layer: invalid state at index " + std::to_string(v->index)
                          + ": " + v->what);
    const auto a = layer_acceleration(state.x, mesh, phys, topo, boundary);
    ThreeLayerState out;
    out.step = state.step + 1;
    out.t = state.t + mesh.tau;
    out.x_prev = state.x;
    out.x_curr.resize(state.x.size());
    const double tau = mesh.tau;
    for (std::size_t i = 0; i < state.x.size(); ++i)
        out.x_curr[i] = state.x[i] + tau * state.u[i] + 0.5 * tau * tau * a[i];
    if (auto v = check_positions(out.x_curr))
        throw ConfigError("bootstrap_second_layer: cell inversion at cell " + std::to_string(v->index));
    return out;
}

} // namespace swmhd
