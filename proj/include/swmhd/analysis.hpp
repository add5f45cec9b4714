#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swmhd/core.hpp"
#include "swmhd/error.hpp"

namespace swmhd {

/// Front speed from the jump conditions, D = sqrt((alpha/h0)^2 + g1 h0),
/// with h0 the depth ahead of the front.
inline double rankine_hugoniot_speed(double alpha_sq, double g1, double h0)
{
    if (!(h0 > 0.0)) throw ConfigError("rankine_hugoniot_speed: depth must be positive");
    return std::sqrt(alpha_sq / (h0 * h0) + g1 * h0);
}

/// Magnetic-gradient display field kappa (1/rho)_s on the N-1 interior
/// cell interfaces; entry i sits at node i + 1.
inline std::vector<double> magnetic_gradient(const LayerState& s, const Mesh& mesh, double kappa)
{
    const std::size_t n = s.n_cells();
    std::vector<double> B(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i + 1 < n; ++i) B[i] = kappa * (1.0 / s.rho[i + 1] - 1.0 / s.rho[i]) / mesh.h;
    return B;
}

/// Scale that makes max |B| equal to the largest depth of the layer.
inline double default_kappa(const LayerState& s, const Mesh& mesh)
{
    const auto B = magnetic_gradient(s, mesh, 1.0);
    double g = 0.0;
    for (double b : B) g = std::max(g, std::abs(b));
    const double peak = *std::max_element(s.rho.begin(), s.rho.end());
    return g > 0.0 ? peak / g : 1.0;
}

struct TransverseFields {
    double v;
    double Hy;
};

/// d'Alembert solution of the transverse subsystem v_t = alpha^2 Hy_s,
/// Hy_t = v_s.
inline TransverseFields transverse_fields(const std::function<double(double)>& f1,
                                          const std::function<double(double)>& f2, double alpha,
                                          double t, double s)
{
    const double a = f1(s + alpha * t);
    const double b = f2(s - alpha * t);
    return {alpha * a + alpha * b, a - b};
}

/// Leading edge of a disturbance running into still water on the right.
/// Scanning in from the right end, the front is where rho first departs
/// from the ambient value rho.back() by threshold; x is interpolated
/// linearly between cell centres. Works for sharp and smeared fronts.
struct FrontLocation {
    std::size_t node;  ///< node between the straddling cells
    double x;
    double jump;       ///< |rho| difference across that node
};

inline std::optional<FrontLocation> front_position(const LayerState& s, double threshold)
{
    const std::size_t n = s.n_cells();
    if (n < 2 || !(threshold > 0.0)) return std::nullopt;
    const double ambient = s.rho.back();
    auto centre = [&](std::size_t i) { return 0.5 * (s.x[i] + s.x[i + 1]); };
    for (std::size_t i = n - 1; i-- > 0;) {
        const double dev = std::abs(s.rho[i] - ambient);
        if (dev < threshold) continue;
        const double dev_r = std::abs(s.rho[i + 1] - ambient);
        const double w = (dev - threshold) / (dev - dev_r);
        return FrontLocation{i + 1, centre(i) + w * (centre(i + 1) - centre(i)),
                             std::abs(s.rho[i + 1] - s.rho[i])};
    }
    return std::nullopt;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
    std::size_t points = 0;
};

inline LineFit least_squares_line(std::span<const double> t, std::span<const double> y)
{
    if (t.size() != y.size() || t.size() < 2)
        throw ConfigError("least_squares_line: need at least two points");
    const double n = static_cast<double>(t.size());
    double mt = 0.0, my = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        mt += t[k];
        my += y[k];
    }
    mt /= n;
    my /= n;
    double stt = 0.0, sty = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        stt += (t[k] - mt) * (t[k] - mt);
        sty += (t[k] - mt) * (y[k] - my);
    }
    if (stt == 0.0) throw ConfigError("least_squares_line: all samples at the same time");
    LineFit f;
    f.slope = sty / stt;
    f.intercept = my - f.slope * mt;
    double ss = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double r = y[k] - (f.intercept + f.slope * t[k]);
        ss += r * r;
    }
    f.rms = std::sqrt(ss / n);
    f.points = t.size();
    return f;
}

struct ShockSpeed {
    double speed;
    double rms;
    std::size_t samples;
};

/// Least-squares slope of the front position x(t) over snapshots with t in
/// [t_lo, t_hi]. The detector threshold is 0.1 (rho_left - rho_right).
inline ShockSpeed shock_speed_estimate(std::span<const LayerState> trajectory, double t_lo, double t_hi,
                                       double rho_left, double rho_right)
{
    if (!(t_hi > t_lo)) throw ConfigError("shock_speed_estimate: empty time window");
    const double threshold = 0.1 * std::abs(rho_left - rho_right);
    std::vector<double> ts, xs;
    for (const auto& s : trajectory) {
        if (s.t < t_lo - 1e-12 || s.t > t_hi + 1e-12) continue;
        const auto f = front_position(s, threshold);
        if (!f)
            throw ConfigError("shock_speed_estimate: no detectable front at t = " + std::to_string(s.t));
        ts.push_back(s.t);
        xs.push_back(f->x);
    }
    if (ts.size() < 2)
        throw ConfigError("shock_speed_estimate: fewer than two snapshots inside the window");
    const auto fit = least_squares_line(ts, xs);
    return {fit.slope, fit.rms, fit.points};
}

/// Snapshot closest to t.
inline const LayerState& nearest_snapshot(std::span<const LayerState> trajectory, double t)
{
    if (trajectory.empty()) throw ConfigError("nearest_snapshot: empty trajectory");
    const LayerState* best = &trajectory.front();
    for (const auto& s : trajectory)
        if (std::abs(s.t - t) < std::abs(best->t - t)) best = &s;
    return *best;
}

struct RunComparison {
    double t_a = 0.0, t_b = 0.0;
    std::optional<double> front_a, front_b;
    double front_delta = std::numeric_limits<double>::quiet_NaN();  ///< front_a - front_b
    double max_rho_delta = 0.0;                                     ///< max |rho_a - rho_b|
    double peak_a = 0.0, peak_b = 0.0;                              ///< max rho
    double peak_delta = 0.0;                                        ///< peak_a - peak_b
};

/// Compares two runs on the same mesh at the snapshots nearest t_probe.
inline RunComparison compare_runs(std::span<const LayerState> run_a, std::span<const LayerState> run_b,
                                  double t_probe, double front_threshold)
{
    const auto& a = nearest_snapshot(run_a, t_probe);
    const auto& b = nearest_snapshot(run_b, t_probe);
    if (a.n_cells() != b.n_cells())
        throw ConfigError("compare_runs: runs use different meshes (" + std::to_string(a.n_cells())
                          + " vs " + std::to_string(b.n_cells()) + " cells)");
    RunComparison c;
    c.t_a = a.t;
    c.t_b = b.t;
    if (auto f = front_position(a, front_threshold)) c.front_a = f->x;
    if (auto f = front_position(b, front_threshold)) c.front_b = f->x;
    if (c.front_a && c.front_b) c.front_delta = *c.front_a - *c.front_b;
    for (std::size_t i = 0; i < a.n_cells(); ++i)
        c.max_rho_delta = std::max(c.max_rho_delta, std::abs(a.rho[i] - b.rho[i]));
    c.peak_a = *std::max_element(a.rho.begin(), a.rho.end());
    c.peak_b = *std::max_element(b.rho.begin(), b.rho.end());
    c.peak_delta = c.peak_a - c.peak_b;
    return c;
}

} // namespace swmhd
