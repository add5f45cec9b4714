#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swmhd/core.hpp"
#include "swmhd/error.hpp"
#include "swmhd/pointwise.hpp"
#include "swmhd/threelayer_scheme.hpp"
#include "swmhd/topography.hpp"

// Discrete conservation laws in divergence form T_t + S_s = 0.
//
// Cell laws put T on cells and S on nodes, residual (T - Tv)/tau +
// (S_{i+1} - S_i)/h over all cells. Node laws put T on nodes and S on
// cells, residual (T - Tv)/tau + (S_i - S_{i-1})/h over interior nodes.
//
// Mass-scheme laws are evaluated on consecutive layer pairs. Three-layer
// laws are evaluated on triples (xv, x, x^); their T depends on a pair of
// consecutive layers and S on the whole triple.

namespace swmhd {

enum class SchemeKind { mass, threelayer };

inline const char* to_string(SchemeKind s) { return s == SchemeKind::mass ? "mass" : "threelayer"; }

enum class LawId { mass, momentum, center_of_mass, energy, exp_plus, exp_minus, sin, cos };

enum class LawLocation { cell, node };

struct ConservationLaw {
    LawId id;
    std::string_view name;
    std::string_view multiplier;
    LawLocation location;
};

inline std::span<const ConservationLaw> law_registry()
{
    static constexpr std::array<ConservationLaw, 8> laws{{
        {LawId::mass, "mass", "1 (identity)", LawLocation::cell},
        {LawId::momentum, "momentum", "1", LawLocation::node},
        {LawId::center_of_mass, "center_of_mass", "t", LawLocation::node},
        {LawId::energy, "energy", "(x_t + xv_t)/2", LawLocation::node},
        {LawId::exp_plus, "exp_plus", "exp(+sqrt(k) t)", LawLocation::node},
        {LawId::exp_minus, "exp_minus", "exp(-sqrt(k) t)", LawLocation::node},
        {LawId::sin, "sin", "sin(sqrt(k) t)", LawLocation::node},
        {LawId::cos, "cos", "cos(sqrt(k) t)", LawLocation::node},
    }};
    return laws;
}

inline const ConservationLaw& law(LawId id)
{
    return law_registry()[static_cast<std::size_t>(id)];
}

inline const ConservationLaw& find_law(std::string_view name)
{
    for (const auto& l : law_registry())
        if (l.name == name) return l;
    throw ConfigError("laws: unknown conservation law '" + std::string(name) + "'");
}

/// Why a law is not expected to hold for a configuration; nullopt if it is.
inline std::optional<std::string> inapplicable_reason(LawId id, SchemeKind scheme, const Problem& pb)
{
    const auto kind = pb.topo.kind();
    const bool viscous = scheme == SchemeKind::mass && !pb.visc.inviscid();
    const bool multiplier = pb.topo.approx == BottomApprox::multiplier_variant;
    switch (id) {
    case LawId::mass: return std::nullopt;
    case LawId::momentum:
    case LawId::center_of_mass:
        if (kind != TopoKind::flat) return std::string("requires a flat bottom");
        if (viscous) return std::string("pseudo-viscosity breaks it");
        return std::nullopt;
    case LawId::energy:
        if (multiplier) return std::string("requires the energy_variant bottom approximation");
        if (viscous) return std::string("pseudo-viscosity dissipates energy");
        return std::nullopt;
    case LawId::exp_plus:
    case LawId::exp_minus:
        if (kind != TopoKind::parabolic_up || !multiplier)
            return std::string("requires parabolic_up with multiplier_variant");
        if (viscous) return std::string("pseudo-viscosity breaks it");
        return std::nullopt;
    case LawId::sin:
    case LawId::cos:
        if (kind != TopoKind::parabolic_down || !multiplier)
            return std::string("requires parabolic_down with multiplier_variant");
        if (viscous) return std::string("pseudo-viscosity breaks it");
        return std::nullopt;
    }
    return std::string("unknown law");
}

inline std::vector<LawId> applicable_laws(SchemeKind scheme, const Problem& pb)
{
    std::vector<LawId> out;
    for (const auto& l : law_registry())
        if (!inapplicable_reason(l.id, scheme, pb)) out.push_back(l.id);
    return out;
}

/// Whether the law's density can be evaluated at all (the parabolic laws
/// need a parabolic bottom for their rate and center).
inline bool law_computable(LawId id, const Problem& pb)
{
    switch (id) {
    case LawId::exp_plus:
    case LawId::exp_minus: return pb.topo.kind() == TopoKind::parabolic_up;
    case LawId::sin:
    case LawId::cos: return pb.topo.kind() == TopoKind::parabolic_down;
    default: return true;
    }
}

inline void require_applicable(LawId id, SchemeKind scheme, const Problem& pb)
{
    if (auto why = inapplicable_reason(id, scheme, pb))
        throw ConfigError("laws." + std::string(law(id).name) + ": not applicable to the "
                          + to_string(scheme) + " scheme with a " + to_string(pb.topo.kind())
                          + " bottom (" + *why + ")");
}

/// Time multiplier Lambda(t) of the parabolic-bottom laws.
inline double parabolic_lambda(LawId id, const Problem& pb, double t)
{
    const double r = parabolic_rate(pb.topo);
    switch (id) {
    case LawId::exp_plus: return std::exp(r * t);
    case LawId::exp_minus: return std::exp(-r * t);
    case LawId::sin: return std::sin(r * t);
    case LawId::cos: return std::cos(r * t);
    default: throw ConfigError("parabolic_lambda: not a parabolic-bottom law");
    }
}

/// (Lambda(t + tau) - Lambda(t)) / tau without the cancellation of the
/// plain difference.
inline double parabolic_lambda_step(LawId id, const Problem& pb, double t)
{
    const double r = parabolic_rate(pb.topo);
    const double tau = pb.mesh.tau;
    switch (id) {
    case LawId::exp_plus: return std::exp(r * t) * std::expm1(r * tau) / tau;
    case LawId::exp_minus: return std::exp(-r * t) * std::expm1(-r * tau) / tau;
    case LawId::sin: return 2.0 * std::cos(r * (t + 0.5 * tau)) * std::sin(0.5 * r * tau) / tau;
    case LawId::cos: return -2.0 * std::sin(r * (t + 0.5 * tau)) * std::sin(0.5 * r * tau) / tau;
    default: throw ConfigError("parabolic_lambda_step: not a parabolic-bottom law");
    }
}

// ---------------------------------------------------------------------------
// Mass scheme

/// Density T of a mass-scheme law on one layer.
inline std::vector<double> mass_law_density(LawId id, const LayerState& s, const Problem& pb)
{
    const std::size_t n = s.n_cells();
    const double tau = pb.mesh.tau;
    std::vector<double> T;
    switch (id) {
    case LawId::mass:
        T.resize(n);
        for (std::size_t i = 0; i < n; ++i) T[i] = 1.0 / s.rho[i];
        return T;
    case LawId::momentum: return s.u;
    case LawId::center_of_mass:
        T.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) T[i] = s.t * s.u[i] - s.x[i];
        return T;
    case LawId::energy:
        // Node i pairs with the cell on its right; the last node has none.
        T.assign(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double b = bottom_value(pb.topo, s.x[i] + tau * s.u[i]) + bottom_value(pb.topo, s.x[i]);
            T[i] = 0.5 * s.u[i] * s.u[i] + internal_energy(s.rho[i], s.p_root[i], pb.phys.alpha_sq) - 0.5 * b;
        }
        return T;
    default: {
        const double l0 = parabolic_lambda(id, pb, s.t);
        const double dl = parabolic_lambda_step(id, pb, s.t);
        const double c = parabolic_center(pb.topo);
        T.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) T[i] = (s.x[i] - c) * dl - l0 * s.u[i];
        return T;
    }
    }
}

/// Flux S of a mass-scheme law between layers prev and cur.
inline std::vector<double> mass_law_flux(LawId id, const LayerState& prev, const LayerState& cur,
                                         const Problem& pb)
{
    const std::size_t n = cur.n_cells();
    const double a2 = pb.phys.alpha_sq;
    auto q = [&](std::size_t i) { return compute_Q(cur.rho[i], prev.rho[i], cur.p_root[i], a2); };
    std::vector<double> S;
    if (id == LawId::mass) {
        S.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) S[i] = -0.5 * (cur.u[i] + prev.u[i]);
        return S;
    }
    S.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        switch (id) {
        case LawId::momentum: S[i] = q(i); break;
        case LawId::center_of_mass: S[i] = cur.t * q(i); break;
        case LawId::energy: S[i] = q(i) * 0.5 * (cur.u[i + 1] + prev.u[i + 1]); break;
        default: S[i] = -parabolic_lambda(id, pb, cur.t) * q(i); break;
        }
    }
    return S;
}

namespace detail {

inline std::vector<double> divergence_residual(LawLocation where, const std::vector<double>& T_old,
                                               const std::vector<double>& T_new,
                                               const std::vector<double>& S, double tau, double h)
{
    std::vector<double> r;
    if (where == LawLocation::cell) {
        r.resize(T_new.size());
        for (std::size_t i = 0; i < r.size(); ++i)
            r[i] = (T_new[i] - T_old[i]) / tau + (S[i + 1] - S[i]) / h;
        return r;
    }
    // Interior nodes only; entry k is node k + 1.
    const std::size_t n = S.size();
    r.resize(n - 1);
    for (std::size_t i = 1; i < n; ++i)
        r[i - 1] = (T_new[i] - T_old[i]) / tau + (S[i] - S[i - 1]) / h;
    return r;
}

} // namespace detail

/// T_t + S_s of a mass-scheme law on the pair (prev, cur).
inline std::vector<double> mass_law_residual(LawId id, const LayerState& prev, const LayerState& cur,
                                             const Problem& pb)
{
    return detail::divergence_residual(law(id).location, mass_law_density(id, prev, pb),
                                       mass_law_density(id, cur, pb), mass_law_flux(id, prev, cur, pb),
                                       pb.mesh.tau, pb.mesh.h);
}

// ---------------------------------------------------------------------------
// Three-layer scheme

/// Density T on the consecutive layers (a, b) taken at times t_a, t_a + tau.
inline std::vector<double> threelayer_law_density(LawId id, const std::vector<double>& a,
                                                  const std::vector<double>& b, double t_a,
                                                  const Problem& pb)
{
    const std::size_t n = a.size() - 1;
    const double h = pb.mesh.h;
    const double tau = pb.mesh.tau;
    std::vector<double> T;
    switch (id) {
    case LawId::mass:
        T.resize(n);
        for (std::size_t i = 0; i < n; ++i) T[i] = (b[i + 1] - b[i]) / h;
        return T;
    case LawId::momentum:
        T.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) T[i] = (b[i] - a[i]) / tau;
        return T;
    case LawId::center_of_mass:
        T.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) T[i] = t_a * (b[i] - a[i]) / tau - a[i];
        return T;
    case LawId::energy: {
        T.assign(n + 1, 0.0);
        const bool topo = pb.topo.kind() != TopoKind::flat;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = (b[i] - a[i]) / tau;
            const double sa = (a[i + 1] - a[i]) / h;
            const double sb = (b[i + 1] - b[i]) / h;
            T[i] = 0.5 * (v * v + 1.0 / sa + 1.0 / sb + pb.phys.alpha_sq * sa * sb);
            if (topo) T[i] -= 0.5 * (bottom_value(pb.topo, b[i]) + bottom_value(pb.topo, a[i]));
        }
        return T;
    }
    default: {
        // (la (b - c) - lb (a - c)) / tau, rearranged to difference b - a.
        const double la = parabolic_lambda(id, pb, t_a);
        const double dl = parabolic_lambda_step(id, pb, t_a);
        const double c = parabolic_center(pb.topo);
        T.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) T[i] = la * (b[i] - a[i]) / tau - dl * (a[i] - c);
        return T;
    }
    }
}

/// Flux S on the triple (xv, x, x^) with t the time of x.
inline std::vector<double> threelayer_law_flux(LawId id, const std::vector<double>& x_prev,
                                               const std::vector<double>& x_curr,
                                               const std::vector<double>& x_next, double t,
                                               const Problem& pb)
{
    const std::size_t n = x_curr.size() - 1;
    const double h = pb.mesh.h;
    const double tau = pb.mesh.tau;
    std::vector<double> S;
    if (id == LawId::mass) {
        S.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) S[i] = -(x_next[i] - x_curr[i]) / tau;
        return S;
    }
    const auto g = detail::flux_g(x_next, x_prev, h);
    S.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double stress = g[i] - pb.phys.alpha_sq * (x_curr[i + 1] - x_curr[i]) / h;
        switch (id) {
        case LawId::momentum: S[i] = stress; break;
        case LawId::center_of_mass: S[i] = t * stress; break;
        case LawId::energy: S[i] = (x_next[i + 1] - x_prev[i + 1]) / (2.0 * tau) * stress; break;
        default: S[i] = parabolic_lambda(id, pb, t) * stress; break;
        }
    }
    return S;
}

/// T_t + S_s of a three-layer law on the triple, with t the time of x_curr.
inline std::vector<double> threelayer_law_residual(LawId id, const std::vector<double>& x_prev,
                                                   const std::vector<double>& x_curr,
                                                   const std::vector<double>& x_next, double t,
                                                   const Problem& pb)
{
    const double tau = pb.mesh.tau;
    return detail::divergence_residual(
        law(id).location, threelayer_law_density(id, x_prev, x_curr, t - tau, pb),
        threelayer_law_density(id, x_curr, x_next, t, pb),
        threelayer_law_flux(id, x_prev, x_curr, x_next, t, pb), tau, pb.mesh.h);
}

/// Multiplier Lambda at the interior nodes such that Lambda times the
/// scheme residual equals the node-law residual.
inline std::vector<double> threelayer_multiplier(LawId id, const std::vector<double>& x_prev,
                                                 const std::vector<double>& x_next, double t,
                                                 const Problem& pb)
{
    const std::size_t n = x_prev.size() - 1;
    std::vector<double> m(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
        switch (id) {
        case LawId::momentum: m[i - 1] = 1.0; break;
        case LawId::center_of_mass: m[i - 1] = t; break;
        case LawId::energy: m[i - 1] = (x_next[i] - x_prev[i]) / (2.0 * pb.mesh.tau); break;
        case LawId::mass: throw ConfigError("threelayer_multiplier: the mass law is an identity");
        default: m[i - 1] = parabolic_lambda(id, pb, t); break;
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Scans

struct ScanResult {
    double max_residual = 0.0;
    long step = -1;          ///< layer index of the newest layer involved
    std::size_t index = 0;   ///< cell, or node for node laws
    std::size_t evaluated = 0;

    void absorb(const std::vector<double>& r, long at_step, LawLocation where)
    {
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double v = std::abs(r[i]);
            // NaN compares false and is recorded as an infinite residual.
            if (step < 0 || !(v <= max_residual)) {
                max_residual = std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
                step = at_step;
                index = where == LawLocation::node ? i + 1 : i;
            }
        }
        ++evaluated;
    }
};

/// Streaming monitor: feed consecutive layers as the run advances.
class LawMonitor {
public:
    /// With strict = false, laws that are computable but not expected to
    /// hold are scanned as well (for reporting).
    LawMonitor(SchemeKind scheme, Problem pb, std::vector<LawId> laws, bool strict = true)
        : scheme_(scheme), pb_(std::move(pb)), laws_(std::move(laws)), results_(laws_.size())
    {
        for (auto id : laws_) {
            if (strict) require_applicable(id, scheme_, pb_);
            else if (!law_computable(id, pb_))
                throw ConfigError("laws." + std::string(law(id).name) + ": needs a parabolic bottom");
        }
    }

    const std::vector<LawId>& laws() const noexcept { return laws_; }
    const std::vector<ScanResult>& results() const noexcept { return results_; }

    void feed(const LayerState& prev, const LayerState& cur)
    {
        if (scheme_ != SchemeKind::mass) throw ConfigError("LawMonitor: layer pairs need the mass scheme");
        for (std::size_t k = 0; k < laws_.size(); ++k)
            results_[k].absorb(mass_law_residual(laws_[k], prev, cur, pb_), cur.step,
                               law(laws_[k]).location);
    }

    /// t is the time of x_curr, step the layer index of x_next.
    void feed(const std::vector<double>& x_prev, const std::vector<double>& x_curr,
              const std::vector<double>& x_next, double t, long step)
    {
        if (scheme_ != SchemeKind::threelayer)
            throw ConfigError("LawMonitor: layer triples need the three-layer scheme");
        for (std::size_t k = 0; k < laws_.size(); ++k)
            results_[k].absorb(threelayer_law_residual(laws_[k], x_prev, x_curr, x_next, t, pb_),
                               step, law(laws_[k]).location);
    }

private:
    SchemeKind scheme_;
    Problem pb_;
    std::vector<LawId> laws_;
    std::vector<ScanResult> results_;
};

inline ScanResult residual_scan(LawId id, std::span<const LayerState> trajectory, const Problem& pb)
{
    require_applicable(id, SchemeKind::mass, pb);
    if (trajectory.size() < 2) throw ConfigError("residual_scan: at least two layers are required");
    ScanResult r;
    for (std::size_t n = 1; n < trajectory.size(); ++n)
        r.absorb(mass_law_residual(id, trajectory[n - 1], trajectory[n], pb), trajectory[n].step,
                 law(id).location);
    return r;
}

/// Three-layer scan; layer k of positions sits at time t0 + k tau.
inline ScanResult residual_scan(LawId id, std::span<const std::vector<double>> positions, double t0,
                                const Problem& pb)
{
    require_applicable(id, SchemeKind::threelayer, pb);
    if (positions.size() < 3) throw ConfigError("residual_scan: at least three layers are required");
    ScanResult r;
    for (std::size_t n = 1; n + 1 < positions.size(); ++n)
        r.absorb(threelayer_law_residual(id, positions[n - 1], positions[n], positions[n + 1],
                                         t0 + static_cast<double>(n) * pb.mesh.tau, pb),
                 static_cast<long>(n + 1), law(id).location);
    return r;
}

// ---------------------------------------------------------------------------
// Energy ledger

/// How node velocities are paired with cells in the total-energy sum.
enum class EnergySampling { left_node, node_average };

/// H = h sum_k [u_k^2/2 + e(rho_k, P_k) - b(x_k)] over the cells.
inline double total_energy(const LayerState& s, const Mesh& mesh, const PhysParams& phys,
                           const Topography& topo, EnergySampling sampling = EnergySampling::left_node)
{
    double sum = 0.0;
    for (std::size_t k = 0; k < s.n_cells(); ++k) {
        const double kin = sampling == EnergySampling::left_node
            ? 0.5 * s.u[k] * s.u[k]
            : 0.25 * (s.u[k] * s.u[k] + s.u[k + 1] * s.u[k + 1]);
        sum += kin + internal_energy(s.rho[k], s.p_root[k], phys.alpha_sq) - bottom_value(topo, s.x[k]);
    }
    return mesh.h * sum;
}

/// Trapezoidal h sum of u over the nodes.
inline double total_momentum(const LayerState& s, const Mesh& mesh)
{
    const std::size_t n = s.n_cells();
    double sum = 0.5 * (s.u[0] + s.u[n]);
    for (std::size_t i = 1; i < n; ++i) sum += s.u[i];
    return mesh.h * sum;
}

/// Integral of the depth over x.
inline double total_mass(const LayerState& s)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < s.n_cells(); ++i) sum += s.rho[i] * (s.x[i + 1] - s.x[i]);
    return sum;
}

struct LedgerRecord {
    long n = 0;
    double t = 0.0;
    double H = 0.0;
    double err_A = 0.0;
    double err_R = 0.0;
    double momentum = 0.0;
    double mass = 0.0;
};

class EnergyLedger {
public:
    void record(long n, double t, double H, double momentum, double mass)
    {
        if (records_.empty()) H0_ = H;
        const double err_a = std::abs(H - H0_);
        const double err_r = H0_ != 0.0 ? err_a / std::abs(H0_) : err_a;
        records_.push_back({n, t, H, err_a, err_r, momentum, mass});
    }

    void record(const LayerState& s, const Problem& pb,
                EnergySampling sampling = EnergySampling::left_node)
    {
        record(s.step, s.t, total_energy(s, pb.mesh, pb.phys, pb.topo, sampling),
               total_momentum(s, pb.mesh), total_mass(s));
    }

    const std::vector<LedgerRecord>& records() const noexcept { return records_; }
    bool empty() const noexcept { return records_.empty(); }

private:
    double H0_ = 0.0;
    std::vector<LedgerRecord> records_;
};

struct DriftReport {
    double max_err_A = 0.0;
    double max_err_R = 0.0;
    long worst_n = 0;
    bool non_increasing = true;  ///< H never grew (beyond round-off)
    bool exceeded = false;       ///< max_err_R above the threshold
};

inline DriftReport drift_report(std::span<const LedgerRecord> ledger, double threshold = 1e-8)
{
    DriftReport r;
    for (std::size_t k = 0; k < ledger.size(); ++k) {
        const auto& e = ledger[k];
        if (e.err_A > r.max_err_A) r.max_err_A = e.err_A;
        if (e.err_R > r.max_err_R) {
            r.max_err_R = e.err_R;
            r.worst_n = e.n;
        }
        if (k > 0) {
            const double prev = ledger[k - 1].H;
            if (e.H > prev + 1e-14 * std::max(1.0, std::abs(prev))) r.non_increasing = false;
        }
    }
    r.exceeded = r.max_err_R > threshold;
    return r;
}

inline DriftReport drift_report(const EnergyLedger& ledger, double threshold = 1e-8)
{
    return drift_report(std::span<const LedgerRecord>(ledger.records()), threshold);
}

} // namespace swmhd
