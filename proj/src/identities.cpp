#include "burnout/identities.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "burnout/numeric.hpp"

namespace burnout {

namespace {

void require_uniform_grid(const Eigen::ArrayXd& grid) {
    if (grid.size() < 2) throw std::invalid_argument("grid needs at least 2 points");
    if (grid[0] != 0.0) throw std::invalid_argument("grid must start at 0");
    double dt = grid[1] - grid[0];
    if (!(dt > 0.0)) throw std::invalid_argument("grid must be strictly increasing");
    for (Eigen::Index i = 1; i < grid.size(); ++i) {
        double step = grid[i] - grid[i - 1];
        if (std::abs(step - dt) > 1e-9 * std::max(1.0, dt))
            throw std::invalid_argument("grid must be uniform");
    }
}

Eigen::ArrayXd node_lambda_dot(const WeightedEnsemble& ens, const HazardSpec& spec, double t) {
    Eigen::ArrayXd out(ens.size());
    if (ens.dimension() == 1) {
        Eigen::ArrayXd f = ens.scalar_nodes();
        for (Eigen::Index i = 0; i < ens.size(); ++i)
            out[i] = hazard_time_derivative(spec, t, f[i]);
    } else {
        for (Eigen::Index i = 0; i < ens.size(); ++i) {
            Eigen::VectorXd f = ens.nodes().row(i).transpose();
            out[i] = hazard_time_derivative(spec, t, f);
        }
    }
    return out;
}

}  // namespace

Eigen::ArrayXd make_grid(double t_end, double dt) {
    if (!(dt > 0.0) || !(t_end > 0.0))
        throw std::invalid_argument("make_grid: t_end and dt must be positive");
    auto steps = static_cast<Eigen::Index>(std::llround(t_end / dt));
    if (steps < 1) steps = 1;
    return Eigen::ArrayXd::LinSpaced(steps + 1, 0.0, steps * dt);
}

PoolPath run_deterministic(const HazardSpec& spec, const FrailtyDistribution& dist,
                           const Eigen::ArrayXd& grid, int n, EnsembleMode mode,
                           std::uint64_t seed) {
    if (is_stochastic(spec))
        throw std::invalid_argument("run_deterministic: use simulate_common_factor for Ito specs");
    require_uniform_grid(grid);

    WeightedEnsemble ens = init_ensemble(dist, n, mode, seed);
    const Eigen::Index m = grid.size();
    PoolPath path;
    path.grid = grid;
    path.pool_hazard.resize(m);
    path.pool_survival.resize(m);
    path.xvar.resize(m);
    path.ess.resize(m);
    Eigen::ArrayXd mean_dot(m);

    for (Eigen::Index j = 0; j < m; ++j) {
        if (j > 0) ens.advance_survival(spec, grid[j] - grid[j - 1]);
        Eigen::ArrayXd lambda = ens.hazards(spec, grid[j]);
        path.pool_hazard[j] = ens.pool_hazard(lambda);
        path.pool_survival[j] = ens.pool_survival();
        path.xvar[j] = ens.weighted_var(lambda);
        path.ess[j] = ens.effective_sample_size();
        mean_dot[j] = ens.weighted_mean(node_lambda_dot(ens, spec, grid[j]));
    }
    path.extra["mean_lambda_dot"] = mean_dot;
    return path;
}

IdentityReport check_burnout_identity(const PoolPath& path, double tolerance) {
    if (path.grid.size() < 3)
        throw std::invalid_argument("check_burnout_identity: need at least 3 grid points");
    auto it = path.extra.find("mean_lambda_dot");
    if (it == path.extra.end())
        throw std::invalid_argument("check_burnout_identity: path lacks mean_lambda_dot");

    Eigen::ArrayXd deriv = grid_derivative(path.pool_hazard, path.dt());
    IdentityReport report;
    report.residual_series = deriv - (it->second - path.xvar);
    report.max_abs_residual = report.residual_series.abs().maxCoeff();
    report.order_estimate = std::numeric_limits<double>::quiet_NaN();
    report.tolerance = tolerance;
    report.pass = report.max_abs_residual <= tolerance;
    return report;
}

IdentityReport check_burnout_identity(const HazardSpec& spec, const FrailtyDistribution& dist,
                                      const Eigen::ArrayXd& grid, int n, EnsembleMode mode,
                                      std::uint64_t seed, double tolerance, int refinements) {
    if (refinements < 1)
        throw std::invalid_argument("check_burnout_identity: refinements must be >= 1");
    PoolPath base = run_deterministic(spec, dist, grid, n, mode, seed);
    IdentityReport report = check_burnout_identity(base, tolerance);

    double t_end = grid[grid.size() - 1];
    double dt = base.dt();
    Eigen::ArrayXd dts(refinements + 1), residuals(refinements + 1);
    dts[0] = dt;
    residuals[0] = report.max_abs_residual;
    for (int r = 1; r <= refinements; ++r) {
        double fine_dt = dt / std::pow(2.0, r);
        PoolPath fine = run_deterministic(spec, dist, make_grid(t_end, fine_dt), n, mode, seed);
        IdentityReport fine_report = check_burnout_identity(fine, tolerance);
        dts[r] = fine_dt;
        residuals[r] = fine_report.max_abs_residual;
    }
    report.order_estimate = log_log_slope(dts, residuals);
    return report;
}

IdentityReport check_selection_identity(const HazardSpec& spec, const FrailtyDistribution& dist,
                                        const std::function<double(double, double)>& phi,
                                        const std::function<double(double, double)>& phi_dot,
                                        const Eigen::ArrayXd& grid, int n, EnsembleMode mode,
                                        std::uint64_t seed, double tolerance) {
    if (!phi) throw std::invalid_argument("check_selection_identity: phi is required");
    require_uniform_grid(grid);
    if (grid.size() < 3)
        throw std::invalid_argument("check_selection_identity: need at least 3 grid points");

    WeightedEnsemble ens = init_ensemble(dist, n, mode, seed);
    Eigen::ArrayXd f = ens.scalar_nodes();
    const Eigen::Index m = grid.size();
    Eigen::ArrayXd mean_phi(m), rhs(m);

    for (Eigen::Index j = 0; j < m; ++j) {
        double t = grid[j];
        if (j > 0) ens.advance_survival(spec, grid[j] - grid[j - 1]);
        Eigen::ArrayXd phi_vals(ens.size()), phi_dot_vals(ens.size());
        for (Eigen::Index i = 0; i < ens.size(); ++i) {
            phi_vals[i] = phi(t, f[i]);
            phi_dot_vals[i] =
                phi_dot ? phi_dot(t, f[i])
                        : central_difference([&](double s) { return phi(s, f[i]); }, t);
        }
        Eigen::ArrayXd lambda = ens.hazards(spec, t);
        mean_phi[j] = ens.weighted_mean(phi_vals);
        rhs[j] = ens.weighted_mean(phi_dot_vals) - ens.weighted_cov(lambda, phi_vals);
    }

    IdentityReport report;
    report.residual_series = grid_derivative(mean_phi, grid[1] - grid[0]) - rhs;
    report.max_abs_residual = report.residual_series.abs().maxCoeff();
    report.order_estimate = std::numeric_limits<double>::quiet_NaN();
    report.tolerance = tolerance;
    report.pass = report.max_abs_residual <= tolerance;
    return report;
}

bool check_monotone_burnout(const PoolPath& path) {
    for (Eigen::Index i = 1; i < path.pool_hazard.size(); ++i)
        if (path.pool_hazard[i] > path.pool_hazard[i - 1] + 1e-12) return false;
    return true;
}

}  // namespace burnout
