#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "swmhd/error.hpp"

namespace swmhd {

/// Natural cubic spline through tabulated points. Used for tabulated
/// bottom profiles and tabulated initial data. Outside the table the end
/// cubic pieces are extrapolated linearly.
class CubicSpline {
public:
    CubicSpline() = default;

    CubicSpline(std::vector<double> xs, std::vector<double> ys)
        : x_(std::move(xs)), y_(std::move(ys))
    {
        if (x_.size() != y_.size())
            throw ConfigError("spline: abscissa and ordinate tables differ in length");
        if (x_.size() < 2)
            throw ConfigError("spline: at least two points are required");
        for (std::size_t i = 1; i < x_.size(); ++i)
            if (!(x_[i] > x_[i - 1]))
                throw ConfigError("spline: abscissae must be strictly increasing");
        build();
    }

    bool empty() const noexcept { return x_.empty(); }
    std::span<const double> xs() const noexcept { return x_; }
    std::span<const double> ys() const noexcept { return y_; }

    double operator()(double x) const
    {
        if (x <= x_.front()) return y_.front() + slope_at_end(0) * (x - x_.front());
        if (x >= x_.back()) return y_.back() + slope_at_end(1) * (x - x_.back());
        const std::size_t k = segment(x);
        const double h = x_[k + 1] - x_[k];
        const double a = (x_[k + 1] - x) / h;
        const double b = (x - x_[k]) / h;
        return a * y_[k] + b * y_[k + 1]
            + ((a * a * a - a) * m_[k] + (b * b * b - b) * m_[k + 1]) * h * h / 6.0;
    }

    double derivative(double x) const
    {
        if (x <= x_.front()) return slope_at_end(0);
        if (x >= x_.back()) return slope_at_end(1);
        const std::size_t k = segment(x);
        const double h = x_[k + 1] - x_[k];
        const double a = (x_[k + 1] - x) / h;
        const double b = (x - x_[k]) / h;
        return (y_[k + 1] - y_[k]) / h
            + ((1.0 - 3.0 * a * a) * m_[k] + (3.0 * b * b - 1.0) * m_[k + 1]) * h / 6.0;
    }

    friend bool operator==(const CubicSpline& a, const CubicSpline& b)
    {
        return a.x_ == b.x_ && a.y_ == b.y_;
    }

private:
    std::size_t segment(double x) const
    {
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        return static_cast<std::size_t>(std::distance(x_.begin(), it)) - 1;
    }

    double slope_at_end(int end) const
    {
        const std::size_t n = x_.size();
        if (end == 0) {
            const double h = x_[1] - x_[0];
            return (y_[1] - y_[0]) / h - h * (2.0 * m_[0] + m_[1]) / 6.0;
        }
        const double h = x_[n - 1] - x_[n - 2];
        return (y_[n - 1] - y_[n - 2]) / h + h * (m_[n - 2] + 2.0 * m_[n - 1]) / 6.0;
    }

    // Second derivatives with natural end conditions.
    void build()
    {
        const std::size_t n = x_.size();
        m_.assign(n, 0.0);
        if (n < 3) return;
        std::vector<double> c(n, 0.0), d(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double hl = x_[i] - x_[i - 1];
            const double hr = x_[i + 1] - x_[i];
            const double diag = 2.0 * (hl + hr) - hl * c[i - 1];
            c[i] = hr / diag;
            const double rhs = 6.0 * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
            d[i] = (rhs - hl * d[i - 1]) / diag;
        }
        for (std::size_t i = n - 2; i >= 1; --i) m_[i] = d[i] - c[i] * m_[i + 1];
    }

    std::vector<double> x_, y_, m_;
};

} // namespace swmhd
