#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <variant>

#include "swmhd/error.hpp"
#include "swmhd/scalar.hpp"
#include "swmhd/spline.hpp"

namespace swmhd {

/// Bottom profiles b(x). The momentum equation carries +b'(x) as a source.
namespace bottom {

/// b = level (horizontal bottom).
struct Flat {
    double level = 0.0;
    friend bool operator==(const Flat&, const Flat&) = default;
};

/// b = slope * x.
struct Inclined {
    double slope = 0.0;
    friend bool operator==(const Inclined&, const Inclined&) = default;
};

/// b = +k/2 (x - center)^2. k = 1, center = 0 is the normalized case.
struct ParabolicUp {
    double k = 1.0;
    double center = 0.0;
    friend bool operator==(const ParabolicUp&, const ParabolicUp&) = default;
};

/// b = -k/2 (x - center)^2.
struct ParabolicDown {
    double k = 1.0;
    double center = 0.0;
    friend bool operator==(const ParabolicDown&, const ParabolicDown&) = default;
};

/// b = k1 ln(x + k2); requires x + k2 > 0.
struct Logarithmic {
    double k1 = 1.0;
    double k2 = 0.0;
    friend bool operator==(const Logarithmic&, const Logarithmic&) = default;
};

/// Arbitrary profile, either tabulated (natural cubic spline) or given
/// by a callable. Only the tabulated form can be serialized.
struct Arbitrary {
    CubicSpline table;
    std::function<double(double)> b;
    std::function<double(double)> db;

    static Arbitrary tabulated(std::vector<double> xs, std::vector<double> bs)
    {
        return Arbitrary{CubicSpline(std::move(xs), std::move(bs)), {}, {}};
    }

    double value(double x) const { return table.empty() ? b(x) : table(x); }

    double slope(double x) const
    {
        if (!table.empty()) return table.derivative(x);
        if (db) return db(x);
        const double d = 1e-6 * (1.0 + std::abs(x));
        return (b(x + d) - b(x - d)) / (2.0 * d);
    }

    friend bool operator==(const Arbitrary& a, const Arbitrary& b)
    {
        return a.table == b.table && !a.b && !b.b;
    }
};

} // namespace bottom

enum class TopoKind { flat, inclined, parabolic_up, parabolic_down, logarithmic, arbitrary };

/// Which discrete approximation of b' enters the schemes.
///  - energy_variant: secant quotient (b(y) - b(a)) / (y - a) between the
///    bracketing layers; keeps the discrete energy law.
///  - multiplier_variant: 2 (cosh - 1)/tau^2 (x - c) style forms for the
///    parabolic bottoms; keeps the two extra exponential/trigonometric laws.
enum class BottomApprox { energy_variant, multiplier_variant };

inline const char* to_string(TopoKind k)
{
    switch (k) {
    case TopoKind::flat: return "flat";
    case TopoKind::inclined: return "inclined";
    case TopoKind::parabolic_up: return "parabolic_up";
    case TopoKind::parabolic_down: return "parabolic_down";
    case TopoKind::logarithmic: return "logarithmic";
    case TopoKind::arbitrary: return "arbitrary";
    }
    return "unknown";
}

inline const char* to_string(BottomApprox a)
{
    return a == BottomApprox::energy_variant ? "energy_variant" : "multiplier_variant";
}

struct Topography {
    using Profile = std::variant<bottom::Flat, bottom::Inclined, bottom::ParabolicUp,
                                 bottom::ParabolicDown, bottom::Logarithmic, bottom::Arbitrary>;

    Profile profile = bottom::Flat{};
    BottomApprox approx = BottomApprox::energy_variant;

    TopoKind kind() const noexcept { return static_cast<TopoKind>(profile.index()); }
    bool is_parabolic() const noexcept
    {
        return kind() == TopoKind::parabolic_up || kind() == TopoKind::parabolic_down;
    }

    /// Throws ConfigError for combinations the schemes do not support.
    void validate() const
    {
        if (approx == BottomApprox::multiplier_variant && !is_parabolic())
            throw ConfigError(std::string("topography.approx_mode: multiplier_variant requires a "
                                          "parabolic bottom, got ")
                              + to_string(kind()));
        if (auto* p = std::get_if<bottom::ParabolicUp>(&profile); p && !(p->k > 0.0))
            throw ConfigError("topography.k: parabolic scale must be positive");
        if (auto* p = std::get_if<bottom::ParabolicDown>(&profile); p && !(p->k > 0.0))
            throw ConfigError("topography.k: parabolic scale must be positive");
        if (auto* a = std::get_if<bottom::Arbitrary>(&profile); a && a->table.empty() && !a->b)
            throw ConfigError("topography: arbitrary profile needs a table or a callable");
    }

    friend bool operator==(const Topography&, const Topography&) = default;
};

namespace detail {

inline void check_log_domain(const bottom::Logarithmic& p, double x)
{
    if (!(x + p.k2 > 0.0))
        throw DegenerateStateError("logarithmic bottom evaluated at x + k2 = "
                                   + std::to_string(x + p.k2) + " <= 0");
}

} // namespace detail

/// b(x).
inline double bottom_value(const Topography& topo, double x)
{
    return std::visit(
        [x](const auto& p) -> double {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, bottom::Flat>) return p.level;
            else if constexpr (std::is_same_v<P, bottom::Inclined>) return p.slope * x;
            else if constexpr (std::is_same_v<P, bottom::ParabolicUp>)
                return 0.5 * p.k * (x - p.center) * (x - p.center);
            else if constexpr (std::is_same_v<P, bottom::ParabolicDown>)
                return -0.5 * p.k * (x - p.center) * (x - p.center);
            else if constexpr (std::is_same_v<P, bottom::Logarithmic>) {
                detail::check_log_domain(p, x);
                return p.k1 * std::log(x + p.k2);
            } else return p.value(x);
        },
        topo.profile);
}

/// b'(x).
inline double bottom_slope(const Topography& topo, double x)
{
    return std::visit(
        [x](const auto& p) -> double {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, bottom::Flat>) return 0.0;
            else if constexpr (std::is_same_v<P, bottom::Inclined>) return p.slope;
            else if constexpr (std::is_same_v<P, bottom::ParabolicUp>) return p.k * (x - p.center);
            else if constexpr (std::is_same_v<P, bottom::ParabolicDown>) return -p.k * (x - p.center);
            else if constexpr (std::is_same_v<P, bottom::Logarithmic>) {
                detail::check_log_domain(p, x);
                return p.k1 / (x + p.k2);
            } else return p.slope(x);
        },
        topo.profile);
}

/// Secant (b(y) - b(a)) / (y - a). Within |y - a| < eps the analytic limit
/// b'((a + y)/2) is used instead of the quotient.
template <class T>
T bottom_secant(const Topography& topo, const T& a, const T& y, double eps)
{
    using std::log;
    return std::visit(
        [&](const auto& p) -> T {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, bottom::Flat>) return T(0.0);
            else if constexpr (std::is_same_v<P, bottom::Inclined>) return T(p.slope);
            else if constexpr (std::is_same_v<P, bottom::ParabolicUp>)
                return p.k * (0.5 * (a + y) - p.center);
            else if constexpr (std::is_same_v<P, bottom::ParabolicDown>)
                return -p.k * (0.5 * (a + y) - p.center);
            else if constexpr (std::is_same_v<P, bottom::Logarithmic>) {
                detail::check_log_domain(p, value_of(a));
                detail::check_log_domain(p, value_of(y));
                const T base = a + p.k2;
                const T d = y - a;
                if (std::abs(value_of(d)) < eps) return p.k1 / (0.5 * (a + y) + p.k2);
                if constexpr (is_complex_v<T>) return p.k1 * log((y + p.k2) / base) / d;
                else return p.k1 * std::log1p(d / base) / d;
            } else {
                const T d = y - a;
                auto f = [&p](double v) { return p.value(v); };
                auto df = [&p](double v) { return p.slope(v); };
                if (std::abs(value_of(d)) < eps) {
                    const T mid = 0.5 * (a + y);
                    const double m = value_of(mid);
                    const double dd = 1e-5 * (1.0 + std::abs(m));
                    auto d2f = [&p, dd](double v) { return (p.slope(v + dd) - p.slope(v - dd)) / (2.0 * dd); };
                    return apply_real(mid, df, d2f);
                }
                return (apply_real(y, f, df) - apply_real(a, f, df)) / d;
            }
        },
        topo.profile);
}

/// d/dy of bottom_secant(a, y).
inline double bottom_secant_dy(const Topography& topo, double a, double y, double eps)
{
    return std::visit(
        [&](const auto& p) -> double {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, bottom::Flat> || std::is_same_v<P, bottom::Inclined>)
                return 0.0;
            else if constexpr (std::is_same_v<P, bottom::ParabolicUp>) return 0.5 * p.k;
            else if constexpr (std::is_same_v<P, bottom::ParabolicDown>) return -0.5 * p.k;
            else if constexpr (std::is_same_v<P, bottom::Logarithmic>) {
                const double base = a + p.k2;
                const double d = y - a;
                const double r = d / base;
                if (std::abs(r) < 1e-3) {
                    // k1/base^2 * (-1/2 + 2r/3 - 3r^2/4 + 4r^3/5 - 5r^4/6)
                    const double s = -0.5 + r * (2.0 / 3.0 + r * (-0.75 + r * (0.8 - r * 5.0 / 6.0)));
                    return p.k1 * s / (base * base);
                }
                return p.k1 * (r / (1.0 + r) - std::log1p(r)) / (d * d);
            } else {
                const double d = y - a;
                if (std::abs(d) < std::max(eps, 1e-6 * (1.0 + std::abs(a)))) {
                    const double m = 0.5 * (a + y);
                    const double dd = 1e-5 * (1.0 + std::abs(m));
                    return 0.25 * (p.slope(m + dd) - p.slope(m - dd)) / dd;
                }
                return (p.slope(y) * d - (p.value(y) - p.value(a))) / (d * d);
            }
        },
        topo.profile);
}

/// Energy-preserving approximation of b' for the two-layer scheme:
/// the secant between the old position and the position reached one step
/// ahead with the new velocity, x_curr + tau u_curr.
template <class T>
T b_check_energy(const Topography& topo, const T& x_curr, const T& x_prev, const T& u_curr,
                 double tau, double eps)
{
    return bottom_secant(topo, x_prev, x_curr + tau * u_curr, eps);
}

/// 2 (cosh(sqrt(k) tau) - 1) / tau^2 for the concave-up parabola and
/// 2 (cos(sqrt(k) tau) - 1) / tau^2 for the concave-down one (signed).
inline double parabolic_multiplier_factor(const Topography& topo, double tau)
{
    if (auto* p = std::get_if<bottom::ParabolicUp>(&topo.profile)) {
        const double s = std::sinh(0.5 * std::sqrt(p->k) * tau);
        return 4.0 * s * s / (tau * tau);
    }
    if (auto* p = std::get_if<bottom::ParabolicDown>(&topo.profile)) {
        const double s = std::sin(0.5 * std::sqrt(p->k) * tau);
        return -4.0 * s * s / (tau * tau);
    }
    throw ConfigError(std::string("b_check_multiplier: not defined for a ") + to_string(topo.kind())
                      + " bottom");
}

inline double parabolic_center(const Topography& topo)
{
    if (auto* p = std::get_if<bottom::ParabolicUp>(&topo.profile)) return p->center;
    if (auto* p = std::get_if<bottom::ParabolicDown>(&topo.profile)) return p->center;
    throw ConfigError("parabolic_center: bottom is not parabolic");
}

/// Square root of the parabolic scale, i.e. the rate of the exponential or
/// trigonometric multipliers.
inline double parabolic_rate(const Topography& topo)
{
    if (auto* p = std::get_if<bottom::ParabolicUp>(&topo.profile)) return std::sqrt(p->k);
    if (auto* p = std::get_if<bottom::ParabolicDown>(&topo.profile)) return std::sqrt(p->k);
    throw ConfigError("parabolic_rate: bottom is not parabolic");
}

/// Multiplier-preserving approximation of b' for parabolic bottoms.
template <class T>
T b_check_multiplier(const Topography& topo, const T& x, double tau)
{
    return parabolic_multiplier_factor(topo, tau) * (x - parabolic_center(topo));
}

/// Adds the drift of an inclined bottom b = c x to a horizontal-bottom
/// position: x + c t (t + tau) / 2. Applying it with -c undoes it.
inline double inclined_to_flat(double x, double t, double tau, double c)
{
    return x + 0.5 * c * t * (t + tau);
}

} // namespace swmhd
