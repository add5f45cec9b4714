#pragma once

#include <complex>
#include <type_traits>

namespace swmhd {

// The residual kernels are written for a generic scalar so that they can be
// evaluated on std::complex<double> (complex-step differentiation).

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

inline double value_of(double v) noexcept { return v; }
inline double value_of(const std::complex<double>& v) noexcept { return v.real(); }

/// Applies a real function with known derivative to a generic scalar,
/// propagating the imaginary part to first order.
template <class T, class F, class DF>
T apply_real(const T& arg, F&& f, DF&& df)
{
    if constexpr (is_complex_v<T>) {
        const double re = arg.real();
        return T(f(re), arg.imag() * df(re));
    } else {
        return f(arg);
    }
}

} // namespace swmhd
