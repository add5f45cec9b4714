#pragma once

#include <cmath>
#include <string>

#include "swmhd/error.hpp"
#include "swmhd/scalar.hpp"

namespace swmhd {

/// Momentum flux of the two-layer scheme,
///
///   Q = [4/(rho rho_old) - (2/P)(1/rho + 1/rho_old) + 1/P^2]^-1 - alpha^2/P,
///
/// with P = sqrt(p) the pressure root of the new layer.
template <class T>
T compute_Q(const T& rho_new, const T& rho_old, const T& p_root, double alpha_sq)
{
    const T denom = 4.0 / (rho_new * rho_old) - (2.0 / p_root) * (1.0 / rho_new + 1.0 / rho_old)
        + 1.0 / (p_root * p_root);
    const double d = value_of(denom);
    if (d == 0.0 || !std::isfinite(d))
        throw DegenerateStateError("compute_Q: vanishing denominator (rho=" + std::to_string(value_of(rho_new))
                                   + ", rho_old=" + std::to_string(value_of(rho_old))
                                   + ", P=" + std::to_string(value_of(p_root)) + ")");
    return 1.0 / denom - alpha_sq / p_root;
}

/// Partial derivatives of Q with respect to the new density and the
/// pressure root.
struct FluxDerivatives {
    double d_rho;
    double d_p_root;
};

inline FluxDerivatives compute_Q_derivatives(double rho_new, double rho_old, double p_root,
                                             double alpha_sq)
{
    const double q = 1.0 / p_root;
    const double a = 2.0 / rho_new - q;
    const double b = 2.0 / rho_old - q;
    const double ab = a * b;
    return {
        2.0 / (rho_new * rho_new * a * ab),
        alpha_sq * q * q - (a + b) * q * q / (ab * ab),
    };
}

/// Pseudo-viscosity
///
///   Omega = nu rho (u_s - |u_s|)/2 + mu rho |u_s| (u_s - |u_s|)/2,
///
/// i.e. nu rho u_s - mu rho u_s^2 under compression (u_s < 0), 0 otherwise.
inline double compute_Omega(double rho, double u_s, double nu, double mu)
{
    const double a = std::abs(u_s);
    return 0.5 * nu * rho * (u_s - a) + 0.5 * mu * rho * a * (u_s - a);
}

/// Same as compute_Omega with the compression switch supplied by the
/// caller (frozen within a Newton solve).
template <class T>
T compute_Omega_switched(const T& rho, const T& u_s, double nu, double mu, bool compressed)
{
    if (!compressed) return T(0.0);
    return nu * rho * u_s - mu * rho * u_s * u_s;
}

/// Discrete state equation 1/P_old + 1/P_new = 2/rho_old solved for the
/// new pressure root: P_new = rho_old P_old / (2 P_old - rho_old).
inline double state_equation_update(double rho_old, double p_root_old)
{
    const double denom = 2.0 * p_root_old - rho_old;
    if (!(denom > 0.0))
        throw DegenerateStateError("state equation breakdown: 2P - rho = " + std::to_string(denom)
                                   + " <= 0");
    return rho_old * p_root_old / denom;
}

/// Internal energy per unit mass in the discrete energy law,
/// p/(2 sqrt(p) - rho) + alpha^2 (2 sqrt(p) - rho) / (2 p rho).
inline double internal_energy(double rho, double p_root, double alpha_sq)
{
    const double w = 2.0 * p_root - rho;
    if (!(w > 0.0))
        throw DegenerateStateError("energy density: 2P - rho = " + std::to_string(w) + " <= 0");
    const double p = p_root * p_root;
    return p / w + alpha_sq * w / (2.0 * p * rho);
}

} // namespace swmhd
