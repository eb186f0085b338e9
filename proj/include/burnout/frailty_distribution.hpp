#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <variant>
#include <vector>

#include "burnout/quadrature.hpp"

namespace burnout {

/// Gamma(k, theta) frailty; mean k*theta, variance k*theta^2.
struct GammaFrailty {
    double shape = 1.0;
    double scale = 1.0;
};

/// f = exp(Y), Y ~ N(log_mean, log_std^2).
struct LognormalFrailty {
    double log_mean = 0.0;
    double log_std = 1.0;
};

/// Normal(mean, std) truncated to f > 0 and renormalized. The linear
/// small-variance burnout expansion is only meaningful when std << mean,
/// where the truncation mass is negligible.
struct TruncatedNormalFrailty {
    double mean = 1.0;
    double std = 0.1;
};

/// Finitely supported frailty law; probs must be nonnegative and sum to 1.
struct DiscreteFrailty {
    std::vector<double> values;
    std::vector<double> probs;
};

/// f = exp(mu + L z) componentwise, z standard normal, L L^T = cov.
struct MultivariateLognormalFrailty {
    Eigen::VectorXd mu;
    Eigen::MatrixXd cov;
};

using FrailtyDistribution =
    std::variant<GammaFrailty, LognormalFrailty, TruncatedNormalFrailty, DiscreteFrailty,
                 MultivariateLognormalFrailty>;

/// Throws std::invalid_argument on inadmissible parameters.
void validate(const FrailtyDistribution& dist);

/// Dimension of the type space (1 for scalar variants).
int dimension(const FrailtyDistribution& dist);

/// Analytic mean of a scalar variant (truncated-normal mean includes the
/// truncation correction). Throws for multivariate.
double analytic_mean(const FrailtyDistribution& dist);

/// Analytic variance of a scalar variant. Throws for multivariate.
double analytic_variance(const FrailtyDistribution& dist);

/// n i.i.d. draws, one row per draw. Deterministic for fixed (dist, n, seed).
Eigen::MatrixXd sample_types(const FrailtyDistribution& dist, int n, std::uint64_t seed);

/// Deterministic Gauss-type nodes/weights representing the distribution:
/// Gauss-Laguerre for Gamma, mapped Gauss-Hermite for Lognormal, weighted
/// Gauss-Legendre for TruncatedNormal, exact atoms for Discrete.
/// Multivariate variants are sampling-only and raise invalid_argument.
GaussRule quantile_nodes(const FrailtyDistribution& dist, int n);

}  // namespace burnout
