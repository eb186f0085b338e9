#include "burnout/frailty_analytics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "burnout/quadrature.hpp"

namespace burnout {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
}

// Tilted lognormal moment ratio at a fixed Gauss-Hermite size.
double lognormal_tilted_ratio(double mu, double sigma, double lambda, double t, int n) {
    GaussRule rule = gauss_hermite(n);
    Eigen::ArrayXd f = (mu + sigma * rule.nodes).exp();
    // factor exp(-lambda f t) rescaled by its max for tail safety
    Eigen::ArrayXd log_tilt = -lambda * t * f;
    Eigen::ArrayXd tilt = (log_tilt - log_tilt.maxCoeff()).exp();
    double mass = (rule.weights * tilt).sum();
    double first = (rule.weights * tilt * f).sum();
    return first / mass;
}

}  // namespace

double gamma_pool_hazard(double shape, double scale, double lambda_common, double t) {
    require_positive(shape, "shape");
    require_positive(scale, "scale");
    require_positive(lambda_common, "lambda");
    if (t < 0.0) throw std::invalid_argument("t must be >= 0");
    return lambda_common * shape * scale / (1.0 + scale * lambda_common * t);
}

GammaPosterior gamma_posterior(double shape, double scale, double lambda_common, double t) {
    require_positive(shape, "shape");
    require_positive(scale, "scale");
    require_positive(lambda_common, "lambda");
    if (t < 0.0) throw std::invalid_argument("t must be >= 0");
    GammaPosterior post;
    post.shape = shape;
    post.scale_t = scale / (1.0 + scale * lambda_common * t);
    post.t = t;
    post.lambda_common = lambda_common;
    return post;
}

QuadratureHazard lognormal_pool_hazard_quadrature(double log_mean, double log_std,
                                                  double lambda_common, double t, int n_nodes) {
    require_positive(log_std, "log_std");
    require_positive(lambda_common, "lambda");
    if (t < 0.0) throw std::invalid_argument("t must be >= 0");
    if (n_nodes < 32) throw std::invalid_argument("n_nodes must be >= 32");

    constexpr int kMaxNodes = 4096;
    QuadratureHazard out;
    int n = n_nodes;
    double prev = lognormal_tilted_ratio(log_mean, log_std, lambda_common, t, n);
    while (n * 2 <= kMaxNodes) {
        n *= 2;
        double next = lognormal_tilted_ratio(log_mean, log_std, lambda_common, t, n);
        out.refinement_delta = std::abs(next - prev);
        prev = next;
        if (out.refinement_delta < 1e-10) break;
    }
    out.value = lambda_common * prev;
    out.nodes_used = n;
    out.converged = out.refinement_delta < 1e-8;
    return out;
}

double lognormal_pool_hazard_laplace(double log_mean, double log_std, double lambda_common,
                                     double t) {
    require_positive(log_std, "log_std");
    require_positive(lambda_common, "lambda");
    if (t < 0.0) throw std::invalid_argument("t must be >= 0");
    double s2 = log_std * log_std;
    return lambda_common * std::exp(log_mean + 0.5 * s2) * std::exp(-s2 * lambda_common * t);
}

TruncatedNormalHazard truncated_normal_pool_hazard(double mean, double std, double lambda_common,
                                                   double t, int n_nodes) {
    require_positive(std, "std");
    require_positive(lambda_common, "lambda");
    if (t < 0.0) throw std::invalid_argument("t must be >= 0");
    if (n_nodes < 32) throw std::invalid_argument("n_nodes must be >= 32");

    TruncatedNormalHazard out;
    out.domain_warning = !(mean > 4.0 * std);
    out.linear_approx = lambda_common * (mean - std * std * lambda_common * t);

    const double lo = std::max(0.0, mean - 12.0 * std);
    const double hi = mean + 12.0 * std;
    GaussRule rule = gauss_legendre(n_nodes);
    Eigen::ArrayXd f = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes;
    Eigen::ArrayXd z = (f - mean) / std;
    Eigen::ArrayXd log_density = -0.5 * z.square() - lambda_common * t * f;
    Eigen::ArrayXd density = (log_density - log_density.maxCoeff()).exp() * rule.weights;
    out.exact = lambda_common * (density * f).sum() / density.sum();
    return out;
}

double multivariate_burnout_drift(const Eigen::VectorXd& lambda0, const Eigen::MatrixXd& cov,
                                  double mean_lambda_dot) {
    const Eigen::Index d = lambda0.size();
    if (d < 1 || cov.rows() != d || cov.cols() != d)
        throw std::invalid_argument("multivariate_burnout_drift: dimension mismatch");
    if (!cov.isApprox(cov.transpose(), 1e-10))
        throw std::invalid_argument("multivariate_burnout_drift: covariance must be symmetric");
    if (d > 1) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        if (es.eigenvalues().minCoeff() < -1e-10)
            throw std::invalid_argument("multivariate_burnout_drift: covariance must be PSD");
    } else if (cov(0, 0) < -1e-10) {
        throw std::invalid_argument("multivariate_burnout_drift: negative variance");
    }
    double quad = 0.0;
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) quad += lambda0[a] * cov(a, b) * lambda0[b];
    return mean_lambda_dot - quad;
}

GammaCalibration calibrate_gamma(const Eigen::ArrayXd& times, const Eigen::ArrayXd& hazards,
                                 int max_iterations) {
    const Eigen::Index m = times.size();
    if (m < 3 || hazards.size() != m)
        throw std::invalid_argument("calibrate_gamma: need >= 3 matching points");
    if ((hazards <= 0.0).any())
        throw std::invalid_argument("calibrate_gamma: hazards must be positive");

    // Initial guess: a from the first point; c from a two-point inversion.
    double a = hazards[0];
    double c = 0.0;
    if (hazards[m - 1] < hazards[0] && times[m - 1] > times[0]) {
        c = (hazards[0] / hazards[m - 1] - 1.0) / (times[m - 1] - times[0]);
    }

    auto sse = [&](double aa, double cc) {
        Eigen::ArrayXd r = aa / (1.0 + cc * times) - hazards;
        return (r * r).sum();
    };

    double current = sse(a, c);
    GammaCalibration fit;
    bool converged = false;
    int iter = 0;
    for (; iter < max_iterations; ++iter) {
        Eigen::ArrayXd denom = 1.0 + c * times;
        Eigen::ArrayXd model = a / denom;
        Eigen::ArrayXd resid = model - hazards;
        Eigen::MatrixXd jac(m, 2);
        jac.col(0) = (1.0 / denom).matrix();
        jac.col(1) = (-a * times / denom.square()).matrix();

        Eigen::Vector2d step =
            (jac.transpose() * jac).ldlt().solve(-jac.transpose() * resid.matrix());
        if (!step.allFinite()) break;

        double scale = 1.0;
        double next = current;
        double na = a, nc = c;
        for (int bt = 0; bt < 30; ++bt) {
            na = a + scale * step[0];
            nc = c + scale * step[1];
            next = sse(na, nc);
            if (next <= current) break;
            scale *= 0.5;
        }
        double improvement = current - next;
        a = na;
        c = nc;
        current = next;
        if (step.norm() * scale < 1e-12 * std::max(1.0, std::abs(a)) || improvement < 1e-30) {
            converged = true;
            break;
        }
    }
    fit.initial_pool_hazard = a;
    fit.decay = c;
    fit.rms_error = std::sqrt(current / static_cast<double>(m));
    fit.iterations = iter;
    fit.converged = converged || iter < max_iterations;
    if (!fit.converged)
        throw std::runtime_error("calibrate_gamma: no convergence; best fit a=" +
                                 std::to_string(a) + " c=" + std::to_string(c));
    return fit;
}

}  // namespace burnout
