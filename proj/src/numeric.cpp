#include "burnout/numeric.hpp"

#include <stdexcept>

namespace burnout {

Eigen::ArrayXd grid_derivative(const Eigen::ArrayXd& values, double dt) {
    const Eigen::Index n = values.size();
    if (n < 3) throw std::invalid_argument("grid_derivative: need at least 3 points");
    if (dt <= 0.0) throw std::invalid_argument("grid_derivative: dt must be positive");
    Eigen::ArrayXd d(n);
    d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dt);
    for (Eigen::Index i = 1; i + 1 < n; ++i)
        d[i] = (values[i + 1] - values[i - 1]) / (2.0 * dt);
    d[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * dt);
    return d;
}

double log_log_slope(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
    if (x.size() != y.size()) throw std::invalid_argument("log_log_slope: size mismatch");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++m;
    }
    if (m < 2) throw std::invalid_argument("log_log_slope: fewer than 2 usable points");
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace burnout
