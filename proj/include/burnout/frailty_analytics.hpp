#pragma once

#include <Eigen/Core>

namespace burnout {

/// Survival-reweighted gamma law at time t under a constant common factor:
/// shape is preserved, scale shrinks hyperbolically.
struct GammaPosterior {
    double shape = 0.0;
    double scale_t = 0.0;
    double t = 0.0;
    double lambda_common = 0.0;

    double mean() const { return shape * scale_t; }
};

/// Pool hazard under Gamma(k, theta) frailty and constant common factor:
/// lambda * k * theta / (1 + theta * lambda * t).
double gamma_pool_hazard(double shape, double scale, double lambda_common, double t);

GammaPosterior gamma_posterior(double shape, double scale, double lambda_common, double t);

struct QuadratureHazard {
    double value = 0.0;
    bool converged = false;
    double refinement_delta = 0.0;
    int nodes_used = 0;
};

/// Tilted-lognormal pool hazard by Gauss-Hermite quadrature in log space,
/// with node doubling until successive values agree to 1e-10 (cap 4096).
QuadratureHazard lognormal_pool_hazard_quadrature(double log_mean, double log_std,
                                                  double lambda_common, double t,
                                                  int n_nodes = 64);

/// Small-sigma Laplace closed form: lambda e^{mu + sigma^2/2} e^{-sigma^2 lambda t}.
double lognormal_pool_hazard_laplace(double log_mean, double log_std, double lambda_common,
                                     double t);

struct TruncatedNormalHazard {
    double exact = 0.0;         // quadrature on the truncated law
    double linear_approx = 0.0; // lambda * (m - s^2 lambda t)
    bool domain_warning = false;  // mean <= 4 std: expansion unreliable
};

TruncatedNormalHazard truncated_normal_pool_hazard(double mean, double std, double lambda_common,
                                                   double t, int n_nodes = 256);

/// Multivariate burnout drift: mean_lambda_dot - lambda0^T cov lambda0.
/// With d = 1 this is exactly the scalar identity.
double multivariate_burnout_drift(const Eigen::VectorXd& lambda0, const Eigen::MatrixXd& cov,
                                  double mean_lambda_dot);

struct GammaCalibration {
    double initial_pool_hazard = 0.0;  // fitted lambda-bar at t = 0
    double decay = 0.0;                // fitted theta * lambda product
    double rms_error = 0.0;
    int iterations = 0;
    bool converged = false;
    // Only (initial_pool_hazard, decay) are identifiable from the curve;
    // k, theta and lambda cannot be separated.
};

/// Least-squares fit of h(t) = a / (1 + c t) by Gauss-Newton with
/// backtracking. Throws std::runtime_error carrying the best iterate
/// message on non-convergence.
GammaCalibration calibrate_gamma(const Eigen::ArrayXd& times, const Eigen::ArrayXd& hazards,
                                 int max_iterations = 100);

}  // namespace burnout
