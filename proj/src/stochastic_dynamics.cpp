#include "burnout/stochastic_dynamics.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "burnout/numeric.hpp"

namespace burnout {

namespace {

// Weighted moments of a column snapshot under base * survival weights.
struct Snapshot {
    Eigen::ArrayXd weights;  // normalized

    Snapshot(const Eigen::ArrayXd& base, const Eigen::ArrayXd& survival) {
        Eigen::ArrayXd raw = base * survival;
        weights = raw / compensated_sum(raw);
    }
    double mean(const Eigen::ArrayXd& phi) const { return compensated_dot(weights, phi); }
    double var(const Eigen::ArrayXd& phi) const {
        double m = mean(phi);
        double v = mean((phi - m).square());
        return v < 0.0 ? 0.0 : v;
    }
};

}  // namespace

Eigen::ArrayXd brownian_increments(std::uint64_t seed, Eigen::Index steps, double dt) {
    if (steps < 1) throw std::invalid_argument("brownian_increments: steps must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("brownian_increments: dt must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(dt));
    Eigen::ArrayXd out(steps);
    for (Eigen::Index i = 0; i < steps; ++i) out[i] = normal(rng);
    return out;
}

Eigen::ArrayXd coarsen_increments(const Eigen::ArrayXd& fine, int factor) {
    if (factor < 1) throw std::invalid_argument("coarsen_increments: factor must be >= 1");
    if (fine.size() % factor != 0)
        throw std::invalid_argument("coarsen_increments: step count not divisible by factor");
    Eigen::ArrayXd coarse(fine.size() / factor);
    for (Eigen::Index k = 0; k < coarse.size(); ++k)
        coarse[k] = fine.segment(k * factor, factor).sum();
    return coarse;
}

StochasticTrajectory simulate_common_factor(const HazardSpec& spec,
                                            const FrailtyDistribution& dist,
                                            const Eigen::ArrayXd& grid, int n_nodes,
                                            EnsembleMode mode, std::uint64_t seed,
                                            const std::optional<Eigen::ArrayXd>& increments) {
    const auto* ito = std::get_if<ItoHazard>(&spec);
    if (!ito) throw std::invalid_argument("simulate_common_factor: spec must be ItoHazard");
    if (grid.size() < 2 || grid[0] != 0.0)
        throw std::invalid_argument("simulate_common_factor: grid must start at 0");
    const double dt = grid[1] - grid[0];
    for (Eigen::Index i = 1; i < grid.size(); ++i)
        if (std::abs(grid[i] - grid[i - 1] - dt) > 1e-9 * std::max(1.0, dt))
            throw std::invalid_argument("simulate_common_factor: grid must be uniform");

    const Eigen::Index steps = grid.size() - 1;
    Eigen::ArrayXd dW =
        increments ? *increments : brownian_increments(seed, steps, dt);
    if (dW.size() != steps)
        throw std::invalid_argument("simulate_common_factor: increment count mismatch");

    WeightedEnsemble ens = init_ensemble(dist, n_nodes, mode, seed);
    const Eigen::Index n = ens.size();
    Eigen::ArrayXd f = ens.scalar_nodes();

    StochasticTrajectory traj;
    traj.factor.grid = grid;
    traj.factor.brownian_increments = dW;
    traj.factor.seed = seed;
    traj.factor.hazard_matrix.resize(n, grid.size());
    traj.base_weights = ens.base_weights();
    traj.survival_matrix.resize(n, grid.size());
    traj.drift_matrix.resize(n, grid.size());
    traj.diffusion_matrix.resize(n, grid.size());

    PoolPath& pool = traj.pool;
    pool.grid = grid;
    pool.pool_hazard.resize(grid.size());
    pool.pool_survival.resize(grid.size());
    pool.xvar.resize(grid.size());
    pool.ess.resize(grid.size());
    Eigen::ArrayXd mean_mu(grid.size()), mean_sigma(grid.size());

    Eigen::ArrayXd lambda(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        lambda[i] = ito->initial(f[i]);
        if (!std::isfinite(lambda[i]) || lambda[i] < 0.0)
            throw std::domain_error("simulate_common_factor: invalid initial hazard");
    }

    for (Eigen::Index j = 0; j <= steps; ++j) {
        const double t = grid[j];
        Eigen::ArrayXd mu(n), sigma(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            mu[i] = ito->drift(t, f[i]);
            sigma[i] = ito->diffusion(t, f[i]);
        }
        traj.factor.hazard_matrix.col(j) = lambda.matrix();
        traj.survival_matrix.col(j) = ens.survival().matrix();
        traj.drift_matrix.col(j) = mu.matrix();
        traj.diffusion_matrix.col(j) = sigma.matrix();

        pool.pool_hazard[j] = ens.pool_hazard(lambda);
        pool.pool_survival[j] = ens.pool_survival();
        pool.xvar[j] = ens.weighted_var(lambda);
        pool.ess[j] = ens.effective_sample_size();
        mean_mu[j] = ens.weighted_mean(mu);
        mean_sigma[j] = ens.weighted_mean(sigma);

        if (j == steps) break;
        ens.advance_survival(spec, dt, lambda);  // left-point rule
        for (Eigen::Index i = 0; i < n; ++i) {
            double next = lambda[i] + mu[i] * dt + sigma[i] * dW[j];
            if (!std::isfinite(next))
                throw std::runtime_error("simulate_common_factor: hazard became non-finite");
            if (next < 0.0) {
                next = 0.0;
                ++traj.factor.clamp_count;
            }
            lambda[i] = next;
        }
    }
    pool.extra["mean_mu"] = mean_mu;
    pool.extra["mean_sigma"] = mean_sigma;
    return traj;
}

PoolSdeReport check_pool_sde(const StochasticTrajectory& traj, double tolerance, int coarsen) {
    const Eigen::Index steps = traj.factor.brownian_increments.size();
    if (steps == 0) throw std::invalid_argument("check_pool_sde: trajectory has no increments");
    if (coarsen < 1 || steps % coarsen != 0)
        throw std::invalid_argument("check_pool_sde: invalid coarsening factor");

    const double dt = (traj.factor.grid[1] - traj.factor.grid[0]) * coarsen;
    Eigen::ArrayXd dW = coarsen_increments(traj.factor.brownian_increments, coarsen);
    const Eigen::Index coarse_steps = steps / coarsen;

    PoolSdeReport report;
    report.residual_series.resize(coarse_steps);
    report.tolerance = tolerance;
    double cum = 0.0, max_cum = 0.0;

    for (Eigen::Index k = 0; k < coarse_steps; ++k) {
        const Eigen::Index j0 = k * coarsen;
        const Eigen::Index j1 = (k + 1) * coarsen;
        Snapshot snap(traj.base_weights, traj.survival_matrix.col(j0).array());
        Snapshot snap_next(traj.base_weights, traj.survival_matrix.col(j1).array());
        Eigen::ArrayXd lam0 = traj.factor.hazard_matrix.col(j0).array();
        Eigen::ArrayXd lam1 = traj.factor.hazard_matrix.col(j1).array();
        double delta_pool = snap_next.mean(lam1) - snap.mean(lam0);
        double drift = snap.mean(traj.drift_matrix.col(j0).array()) - snap.var(lam0);
        double diff = snap.mean(traj.diffusion_matrix.col(j0).array());
        double r = delta_pool - (drift * dt + diff * dW[k]);
        report.residual_series[k] = r;
        cum += r;
        max_cum = std::max(max_cum, std::abs(cum));
    }
    report.max_abs_residual = report.residual_series.abs().maxCoeff();
    report.max_abs_cum_residual = max_cum;
    report.pass = report.max_abs_residual <= tolerance;
    return report;
}

double estimate_sde_order(const StochasticTrajectory& traj, int levels) {
    if (levels < 2) throw std::invalid_argument("estimate_sde_order: need at least 2 levels");
    const Eigen::Index steps = traj.factor.brownian_increments.size();
    const double fine_dt = traj.factor.grid[1] - traj.factor.grid[0];
    Eigen::ArrayXd dts(levels), residuals(levels);
    for (int l = 0; l < levels; ++l) {
        int factor = 1 << l;
        if (steps % factor != 0)
            throw std::invalid_argument("estimate_sde_order: step count not dyadic enough");
        PoolSdeReport rep = check_pool_sde(traj, 0.0, factor);
        dts[l] = fine_dt * factor;
        residuals[l] = rep.max_abs_cum_residual;
    }
    return log_log_slope(dts, residuals);
}

}  // namespace burnout
