#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "burnout/weighted_ensemble.hpp"

namespace burnout {

/// Time series of pool-level quantities on a uniform grid starting at 0.
struct PoolPath {
    Eigen::ArrayXd grid;
    Eigen::ArrayXd pool_hazard;
    Eigen::ArrayXd pool_survival;
    Eigen::ArrayXd xvar;  // cross-sectional variance of the hazard
    Eigen::ArrayXd ess;
    std::map<std::string, Eigen::ArrayXd> extra;

    double dt() const { return grid.size() > 1 ? grid[1] - grid[0] : 0.0; }
};

struct IdentityReport {
    double max_abs_residual = 0.0;
    Eigen::ArrayXd residual_series;
    double order_estimate = 0.0;  // NaN when no refinement study was run
    double tolerance = 0.0;
    bool pass = false;
};

/// Uniform grid [0, t_end] with step dt (t_end adjusted to a whole number
/// of steps).
Eigen::ArrayXd make_grid(double t_end, double dt);

/// Evolve the survival-weighted ensemble under a deterministic or
/// frailty-factor hazard and record pool hazard, pool survival, hazard
/// variance, ESS, and the weighted mean hazard time-derivative
/// (extra["mean_lambda_dot"]).
PoolPath run_deterministic(const HazardSpec& spec, const FrailtyDistribution& dist,
                           const Eigen::ArrayXd& grid, int n, EnsembleMode mode,
                           std::uint64_t seed);

/// Residuals of d(pool hazard)/dt = E_t(lambda_dot) - var_t(lambda),
/// differentiated by central differences (second-order one-sided at the
/// ends). No refinement study; order_estimate is NaN.
IdentityReport check_burnout_identity(const PoolPath& path, double tolerance);

/// Same residual check plus an empirical convergence order from rerunning
/// the scenario with dt halved `refinements` times.
IdentityReport check_burnout_identity(const HazardSpec& spec, const FrailtyDistribution& dist,
                                      const Eigen::ArrayXd& grid, int n, EnsembleMode mode,
                                      std::uint64_t seed, double tolerance, int refinements);

/// Residuals of dE_t(phi) = E_t(phi_dot) dt - cov_t(lambda, phi) dt for a
/// per-type observable phi(t, f).
IdentityReport check_selection_identity(const HazardSpec& spec, const FrailtyDistribution& dist,
                                        const std::function<double(double, double)>& phi,
                                        const std::function<double(double, double)>& phi_dot,
                                        const Eigen::ArrayXd& grid, int n, EnsembleMode mode,
                                        std::uint64_t seed, double tolerance);

/// True iff the pool hazard series is nonincreasing (1e-12 slack).
bool check_monotone_burnout(const PoolPath& path);

}  // namespace burnout
