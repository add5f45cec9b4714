#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "swmhd/error.hpp"

namespace swmhd {

/// Three-point system in the sweep convention
///
///     A[i] y[i-1] - C[i] y[i] + D[i] y[i+1] = -F[i],   i = 0..n-1,
///
/// with A[0] and D[n-1] ignored.
struct TridiagonalSystem {
    std::vector<double> A, C, D, F;

    TridiagonalSystem() = default;
    explicit TridiagonalSystem(std::size_t n) : A(n, 0.0), C(n, 0.0), D(n, 0.0), F(n, 0.0) {}

    std::size_t size() const noexcept { return C.size(); }
};

/// Forward elimination / back substitution (the "sweep" method). O(n).
/// Throws SingularSystemError on a zero pivot.
inline void thomas_solve(std::span<const double> A, std::span<const double> C,
                         std::span<const double> D, std::span<const double> F,
                         std::span<double> y)
{
    const std::size_t n = C.size();
    if (A.size() != n || D.size() != n || F.size() != n || y.size() != n)
        throw ConfigError("thomas_solve: band lengths are inconsistent");
    if (n == 0) return;

    std::vector<double> alpha(n + 1, 0.0), beta(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = (i == 0) ? 0.0 : A[i];
        const double pivot = C[i] - a * alpha[i];
        if (pivot == 0.0 || !std::isfinite(pivot))
            throw SingularSystemError("thomas_solve: zero pivot at row " + std::to_string(i), i);
        alpha[i + 1] = (i + 1 < n) ? D[i] / pivot : 0.0;
        beta[i + 1] = (a * beta[i] + F[i]) / pivot;
    }
    y[n - 1] = beta[n];
    for (std::size_t i = n - 1; i-- > 0;) y[i] = alpha[i + 1] * y[i + 1] + beta[i + 1];
}

inline std::vector<double> thomas_solve(const TridiagonalSystem& sys)
{
    std::vector<double> y(sys.size());
    thomas_solve(sys.A, sys.C, sys.D, sys.F, y);
    return y;
}

} // namespace swmhd
