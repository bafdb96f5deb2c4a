#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace hawkes {

/// Welford mean/variance; standard error is NaN below two samples.
class RunningStat {
public:
    void add(double v) {
        ++n_;
        const double delta = v - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (v - mean_);
    }
    [[nodiscard]] std::size_t count() const { return n_; }
    [[nodiscard]] double mean() const { return n_ == 0 ? std::numeric_limits<double>::quiet_NaN() : mean_; }
    [[nodiscard]] double variance() const {
        return n_ < 2 ? std::numeric_limits<double>::quiet_NaN() : m2_ / static_cast<double>(n_ - 1);
    }
    [[nodiscard]] double standard_error() const { return std::sqrt(variance() / static_cast<double>(n_)); }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Least-squares slope of log(y) on log(x) over the pairs with x, y > 0; NaN with fewer than two.
inline double log_log_slope(std::span<const double> x, std::span<const double> y) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const double nn = static_cast<double>(n);
    const double den = sxx - sx * sx / nn;
    if (den <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (sxy - sx * sy / nn) / den;
}

}  // namespace hawkes
