#include <doctest.h>

#include <cmath>

#include "burnout/stochastic_dynamics.hpp"

using namespace burnout;

namespace {

const DiscreteFrailty kTwoType{{1.0, 3.0}, {0.5, 0.5}};

HazardSpec ito_spec(double mu, double sigma_scale) {
    return ItoHazard{[mu](double, double) { return mu; },
                     [sigma_scale](double, double f) { return sigma_scale * f; },
                     [](double f) { return 0.1 * f; }};
}

}  // namespace

TEST_CASE("brownian increments: deterministic and with the right variance") {
    Eigen::ArrayXd a = brownian_increments(42, 1000, 0.01);
    Eigen::ArrayXd b = brownian_increments(42, 1000, 0.01);
    CHECK((a == b).all());
    // accumulated variance over [0, 10] is near 10 (25 sigma would be wild)
    double total = a.sum();
    CHECK(std::abs(total) < 5.0 * std::sqrt(10.0));
    double var = a.square().sum();
    CHECK(var == doctest::Approx(10.0).epsilon(0.2));
}

TEST_CASE("coarsened increments sum exactly to the fine ones") {
    Eigen::ArrayXd fine = brownian_increments(7, 64, 0.01);
    Eigen::ArrayXd coarse = coarsen_increments(fine, 4);
    CHECK(coarse.size() == 16);
    CHECK(std::abs(coarse.sum() - fine.sum()) < 1e-14);
    CHECK_THROWS_AS(coarsen_increments(fine, 5), std::invalid_argument);
}

TEST_CASE("sigma = 0 reduces to constant-hazard burnout") {
    StochasticTrajectory traj = simulate_common_factor(
        ito_spec(0.0, 0.0), kTwoType, make_grid(5.0, 0.01), 2, EnsembleMode::Quadrature, 42);
    // constant hazards 0.1 and 0.3: exact two-type closed form
    for (Eigen::Index j = 0; j < traj.pool.grid.size(); j += 50) {
        double t = traj.pool.grid[j];
        double s1 = std::exp(-0.1 * t), s3 = std::exp(-0.3 * t);
        CHECK(traj.pool.pool_hazard[j] ==
              doctest::Approx(0.1 * (s1 + 3.0 * s3) / (s1 + s3)).epsilon(1e-10));
    }
    CHECK(traj.factor.clamp_count == 0);
}

TEST_CASE("sigma = 0 matches the deterministic runner to 1e-10") {
    StochasticTrajectory traj = simulate_common_factor(
        ito_spec(0.0, 0.0), kTwoType, make_grid(5.0, 0.01), 2, EnsembleMode::Quadrature, 42);
    PoolPath det = run_deterministic(FrailtyFactorHazard{ConstantFactor{0.1}}, kTwoType,
                                     make_grid(5.0, 0.01), 2, EnsembleMode::Quadrature, 42);
    CHECK((traj.pool.pool_hazard - det.pool_hazard).abs().maxCoeff() < 1e-10);
    CHECK((traj.pool.pool_survival - det.pool_survival).abs().maxCoeff() < 1e-10);
}

TEST_CASE("homogeneous pool: pool hazard equals the single simulated path") {
    DiscreteFrailty point{{1.0, 1.0}, {0.5, 0.5}};
    StochasticTrajectory traj = simulate_common_factor(
        ito_spec(0.0, 0.02), point, make_grid(5.0, 0.01), 2, EnsembleMode::Quadrature, 7);
    Eigen::ArrayXd single = traj.factor.hazard_matrix.row(0).array();
    CHECK((traj.pool.pool_hazard - single).abs().maxCoeff() < 1e-14);
    CHECK(traj.pool.xvar.maxCoeff() < 1e-16);
}

TEST_CASE("sde residual: sigma = 0 equals the discrete burnout residual") {
    StochasticTrajectory traj = simulate_common_factor(
        ito_spec(0.0, 0.0), kTwoType, make_grid(5.0, 0.01), 2, EnsembleMode::Quadrature, 1);
    PoolSdeReport rep = check_pool_sde(traj, 1e-4);
    CHECK(rep.pass);
    // no diffusion: per-step residual is the second-order weight-update error
    CHECK(rep.max_abs_residual < 5e-6);
}

TEST_CASE("sde residual: frozen tolerance on the two-type pilot scenario") {
    // tolerance frozen from a pilot run of this exact configuration
    StochasticTrajectory traj = simulate_common_factor(
        ito_spec(0.0, 0.01), kTwoType, make_grid(5.0, 0.001), 2, EnsembleMode::Quadrature, 42);
    PoolSdeReport rep = check_pool_sde(traj, 2e-6);
    CHECK(rep.pass);
}

TEST_CASE("accumulated sde residual has Euler strong order near 1") {
    Eigen::ArrayXd orders(20);
    for (int seed = 0; seed < 20; ++seed) {
        StochasticTrajectory traj =
            simulate_common_factor(ito_spec(0.0, 0.01), kTwoType, make_grid(5.0, 0.0015625), 2,
                                   EnsembleMode::Quadrature, 100 + seed);
        orders[seed] = estimate_sde_order(traj, 5);
    }
    std::sort(orders.data(), orders.data() + orders.size());
    double median = 0.5 * (orders[9] + orders[10]);
    CHECK(median > 0.8);
    CHECK(median < 1.2);
}

TEST_CASE("ensemble mean of initial drift matches E(mu) - var(lambda)") {
    const double dt = 0.001;
    const int n_seeds = 200;
    double sum = 0.0, sumsq = 0.0;
    for (int seed = 0; seed < n_seeds; ++seed) {
        StochasticTrajectory traj = simulate_common_factor(
            ito_spec(0.005, 0.01), kTwoType, make_grid(2.0 * dt, dt), 2,
            EnsembleMode::Quadrature, 1000 + seed);
        double slope = (traj.pool.pool_hazard[1] - traj.pool.pool_hazard[0]) / dt;
        sum += slope;
        sumsq += slope * slope;
    }
    double mean = sum / n_seeds;
    double se = std::sqrt((sumsq / n_seeds - mean * mean) / n_seeds);
    // E_0(mu) = 0.005; var_0(lambda) = var(0.1 f) = 0.01
    CHECK(std::abs(mean - (0.005 - 0.01)) < 3.0 * se + 1e-6);
}

TEST_CASE("grid validation") {
    Eigen::ArrayXd bad(3);
    bad << 0.0, 0.1, 0.3;
    CHECK_THROWS_AS(simulate_common_factor(ito_spec(0.0, 0.01), kTwoType, bad, 2,
                                           EnsembleMode::Quadrature, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_common_factor(FrailtyFactorHazard{ConstantFactor{0.1}}, kTwoType,
                                           make_grid(1.0, 0.1), 2, EnsembleMode::Quadrature, 1),
                    std::invalid_argument);
}
