#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>

#include "burnout/identities.hpp"

namespace burnout {

/// One realization of the common factor and the per-node hazard paths it
/// drives. A single Brownian increment per step is shared by all nodes.
struct CommonFactorPath {
    Eigen::ArrayXd grid;
    Eigen::ArrayXd brownian_increments;  // one per step
    Eigen::MatrixXd hazard_matrix;       // node x time
    std::uint64_t seed = 0;
    long clamp_count = 0;                // Euler steps clamped at 0
};

/// Simulation output: the factor path plus everything needed to evaluate
/// the pool-hazard SDE decomposition at any coarsening of the grid.
struct StochasticTrajectory {
    CommonFactorPath factor;
    PoolPath pool;
    Eigen::ArrayXd base_weights;
    Eigen::MatrixXd survival_matrix;  // node x time
    Eigen::MatrixXd drift_matrix;     // mu(t_j, f_i)
    Eigen::MatrixXd diffusion_matrix; // sigma(t_j, f_i)
};

struct PoolSdeReport {
    Eigen::ArrayXd residual_series;  // per step
    double max_abs_residual = 0.0;
    /// Max over time of the accumulated residual; this is the quantity with
    /// Euler strong-order decay under dt refinement.
    double max_abs_cum_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Gaussian increments with variance dt, deterministic in (seed, step count).
Eigen::ArrayXd brownian_increments(std::uint64_t seed, Eigen::Index steps, double dt);

/// Sum groups of `factor` fine increments into coarse ones.
Eigen::ArrayXd coarsen_increments(const Eigen::ArrayXd& fine, int factor);

/// Euler-Maruyama simulation of the Ito hazard spec on a uniform grid with
/// one shared Brownian path; survival uses the left-point rule. Negative
/// Euler states are clamped at 0 and counted.
StochasticTrajectory simulate_common_factor(
    const HazardSpec& spec, const FrailtyDistribution& dist, const Eigen::ArrayXd& grid,
    int n_nodes, EnsembleMode mode, std::uint64_t seed,
    const std::optional<Eigen::ArrayXd>& increments = std::nullopt);

/// Pathwise residuals of d pool_hazard = (E(mu) - var(lambda)) dt + E(sigma) dW,
/// evaluated on every `coarsen`-th grid point with summed increments.
PoolSdeReport check_pool_sde(const StochasticTrajectory& traj, double tolerance, int coarsen = 1);

/// Empirical convergence order of the accumulated residual across `levels`
/// dyadic coarsenings of the same trajectory (shared Brownian path).
double estimate_sde_order(const StochasticTrajectory& traj, int levels);

}  // namespace burnout
