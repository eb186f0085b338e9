#pragma once

#include <Eigen/Core>
#include <cmath>
#include <span>

namespace burnout {

/// Neumaier-compensated sum. Used for weight normalizers so that the
/// result is insensitive to accumulation order at the 1e-16 level.
inline double compensated_sum(std::span<const double> xs) {
    double sum = 0.0, c = 0.0;
    for (double x : xs) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    return sum + c;
}

inline double compensated_sum(const Eigen::ArrayXd& xs) {
    return compensated_sum(std::span<const double>(xs.data(), static_cast<size_t>(xs.size())));
}

/// Compensated dot product of two arrays.
inline double compensated_dot(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b) {
    Eigen::ArrayXd prod = a * b;
    return compensated_sum(prod);
}

/// Central finite-difference derivative of a callable, step scaled by t.
/// Falls back to a second-order forward stencil when t - h would leave the
/// domain (callables are only assumed defined on t >= 0).
template <typename F>
double central_difference(F&& fn, double t, double step_scale = 1e-5) {
    double h = step_scale * std::max(1.0, std::abs(t));
    if (t - h < 0.0)
        return (-3.0 * fn(t) + 4.0 * fn(t + h) - fn(t + 2.0 * h)) / (2.0 * h);
    return (fn(t + h) - fn(t - h)) / (2.0 * h);
}

/// Differentiate a series sampled on a uniform grid: central differences in
/// the interior, second-order one-sided stencils at the endpoints.
Eigen::ArrayXd grid_derivative(const Eigen::ArrayXd& values, double dt);

/// Least-squares slope of log|y| against log(x), skipping non-positive y.
double log_log_slope(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y);

}  // namespace burnout
