#include "burnout/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace burnout {

namespace {

// Implicit-shift QL on a symmetric tridiagonal matrix, accumulating only the
// first row of the eigenvector matrix (all that Gauss weights need).
void tridiagonal_ql(Eigen::ArrayXd& d, Eigen::ArrayXd& e, Eigen::ArrayXd& z) {
    const Eigen::Index n = d.size();
    const double eps = std::numeric_limits<double>::epsilon();
    for (Eigen::Index l = 0; l < n; ++l) {
        int iter = 0;
        Eigen::Index m;
        do {
            for (m = l; m + 1 < n; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (++iter > 60)
                    throw std::runtime_error("golub_welsch: QL iteration did not converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                Eigen::Index i;
                bool underflow = false;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    f = z[i + 1];
                    z[i + 1] = s * z[i] + c * f;
                    z[i] = c * z[i] - s * f;
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace

GaussRule golub_welsch(Eigen::ArrayXd diag, Eigen::ArrayXd subdiag) {
    const Eigen::Index n = diag.size();
    if (n < 1) throw std::invalid_argument("golub_welsch: empty rule");
    if (subdiag.size() != n - 1)
        throw std::invalid_argument("golub_welsch: subdiagonal length must be n-1");

    Eigen::ArrayXd e = Eigen::ArrayXd::Zero(n);
    e.head(n - 1) = subdiag;
    Eigen::ArrayXd z = Eigen::ArrayXd::Zero(n);
    z[0] = 1.0;
    tridiagonal_ql(diag, e, z);

    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return diag[a] < diag[b]; });

    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        rule.nodes[i] = diag[order[static_cast<size_t>(i)]];
        rule.weights[i] = z[order[static_cast<size_t>(i)]] * z[order[static_cast<size_t>(i)]];
    }
    rule.weights /= rule.weights.sum();
    return rule;
}

GaussRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    Eigen::ArrayXd a = Eigen::ArrayXd::Zero(n);
    Eigen::ArrayXd b(n - 1 > 0 ? n - 1 : 0);
    for (int i = 1; i < n; ++i) b[i - 1] = i / std::sqrt(4.0 * i * i - 1.0);
    return golub_welsch(a, b);
}

GaussRule gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
    Eigen::ArrayXd a = Eigen::ArrayXd::Zero(n);
    Eigen::ArrayXd b(n - 1 > 0 ? n - 1 : 0);
    for (int i = 1; i < n; ++i) b[i - 1] = std::sqrt(static_cast<double>(i));
    return golub_welsch(a, b);
}

GaussRule gauss_laguerre(int n, double alpha) {
    if (n < 1) throw std::invalid_argument("gauss_laguerre: n must be >= 1");
    if (alpha <= -1.0) throw std::invalid_argument("gauss_laguerre: alpha must exceed -1");
    Eigen::ArrayXd a(n);
    Eigen::ArrayXd b(n - 1 > 0 ? n - 1 : 0);
    for (int i = 0; i < n; ++i) a[i] = 2.0 * i + alpha + 1.0;
    for (int i = 1; i < n; ++i) b[i - 1] = std::sqrt(i * (i + alpha));
    return golub_welsch(a, b);
}

}  // namespace burnout
