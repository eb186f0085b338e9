#include <doctest.h>

#include <boost/math/distributions/gamma.hpp>
#include <cmath>
#include <random>

#include "burnout/frailty_analytics.hpp"
#include "burnout/identities.hpp"

using namespace burnout;

TEST_CASE("gamma pool hazard closed form") {
    CHECK(gamma_pool_hazard(2.0, 1.0, 0.2, 0.0) == doctest::Approx(0.4));
    CHECK(gamma_pool_hazard(2.0, 1.0, 0.2, 5.0) == doctest::Approx(0.2));
    CHECK_THROWS_AS(gamma_pool_hazard(-1.0, 1.0, 0.2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(gamma_pool_hazard(2.0, 1.0, 0.2, -1.0), std::invalid_argument);
}

TEST_CASE("gamma pool hazard: strictly decreasing hyperbolic decay") {
    double prev = gamma_pool_hazard(2.0, 1.0, 0.2, 0.0);
    for (double t = 0.5; t < 50.0; t += 0.5) {
        double h = gamma_pool_hazard(2.0, 1.0, 0.2, t);
        CHECK(h < prev);
        // invariant of the hyperbola: h * (1 + theta lambda t) is constant
        CHECK(std::abs(h * (1.0 + 0.2 * t) - 0.4) < 1e-12);
        prev = h;
    }
}

TEST_CASE("gamma posterior: shape preserved, scale shrinks") {
    GammaPosterior p0 = gamma_posterior(2.0, 1.0, 0.2, 0.0);
    CHECK(p0.shape == 2.0);
    CHECK(p0.scale_t == 1.0);
    GammaPosterior p5 = gamma_posterior(2.0, 1.0, 0.2, 5.0);
    CHECK(p5.scale_t == doctest::Approx(0.5));
    CHECK(p5.mean() == doctest::Approx(1.0));
}

TEST_CASE("gamma posterior mean matches the reweighted ensemble") {
    HazardSpec spec = FrailtyFactorHazard{ConstantFactor{0.2}};
    WeightedEnsemble ens = init_ensemble(GammaFrailty{2.0, 1.0}, 256, EnsembleMode::Quadrature, 0);
    for (int i = 0; i < 500; ++i) ens.advance_survival(spec, 0.01);
    CHECK(std::abs(ens.weighted_mean(ens.scalar_nodes()) - 1.0) < 1e-3);
}

TEST_CASE("gamma posterior invariance: weighted KS against Gamma(2, 0.5)") {
    // survival-reweighted sample ensemble at t = 5 under lambda = 0.2
    const int n = 100'000;
    HazardSpec spec = FrailtyFactorHazard{ConstantFactor{0.2}};
    WeightedEnsemble ens = init_ensemble(GammaFrailty{2.0, 1.0}, n, EnsembleMode::Sample, 77);
    for (int i = 0; i < 100; ++i) ens.advance_survival(spec, 0.05);

    Eigen::ArrayXd f = ens.scalar_nodes();
    Eigen::ArrayXd w = ens.normalized_weights();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return f[a] < f[b]; });

    boost::math::gamma_distribution<double> target(2.0, 0.5);
    double cdf_emp = 0.0, ks = 0.0;
    for (int idx : order) {
        cdf_emp += w[idx];
        ks = std::max(ks, std::abs(cdf_emp - boost::math::cdf(target, f[idx])));
    }
    double n_eff = ens.effective_sample_size();
    double critical = 1.628 / std::sqrt(n_eff);  // 1% asymptotic KS quantile
    CHECK(ks < critical);
}

TEST_CASE("lognormal quadrature: untilted limit is the lognormal mean") {
    QuadratureHazard q = lognormal_pool_hazard_quadrature(0.0, 0.1, 0.2, 0.0);
    CHECK(q.converged);
    CHECK(q.value == doctest::Approx(0.2 * std::exp(0.005)).epsilon(1e-12));
}

TEST_CASE("lognormal quadrature vs Laplace at sigma = 0.1") {
    QuadratureHazard q = lognormal_pool_hazard_quadrature(0.0, 0.1, 0.2, 5.0);
    double laplace = lognormal_pool_hazard_laplace(0.0, 0.1, 0.2, 5.0);
    CHECK(q.converged);
    CHECK(std::abs(q.value - laplace) / q.value < 0.005);
}

TEST_CASE("laplace approximation error decreases with sigma") {
    double prev_err = 1.0;
    for (double sigma : {0.2, 0.1, 0.05}) {
        QuadratureHazard q = lognormal_pool_hazard_quadrature(0.0, sigma, 0.2, 5.0);
        double laplace = lognormal_pool_hazard_laplace(0.0, sigma, 0.2, 5.0);
        double err = std::abs(q.value - laplace) / q.value;
        CHECK(err < prev_err);
        prev_err = err;
    }
}

TEST_CASE("laplace closed form values") {
    CHECK(lognormal_pool_hazard_laplace(0.0, 0.1, 0.2, 0.0) ==
          doctest::Approx(0.2 * std::exp(0.005)).epsilon(1e-14));
    CHECK(lognormal_pool_hazard_laplace(0.0, 0.1, 0.2, 10.0) ==
          doctest::Approx(0.2 * std::exp(0.005) * std::exp(-0.02)).epsilon(1e-14));
    CHECK(lognormal_pool_hazard_laplace(0.0, 0.1, 0.2, 10.0) ==
          doctest::Approx(0.19702).epsilon(1e-4));
    // log-linear in t with slope -sigma^2 lambda
    double h1 = lognormal_pool_hazard_laplace(0.0, 0.1, 0.2, 1.0);
    double h2 = lognormal_pool_hazard_laplace(0.0, 0.1, 0.2, 2.0);
    CHECK(std::log(h2) - std::log(h1) == doctest::Approx(-0.01 * 0.2).epsilon(1e-12));
}

TEST_CASE("truncated normal hazard: exact vs linear expansion") {
    TruncatedNormalHazard r = truncated_normal_pool_hazard(1.0, 0.1, 0.2, 5.0);
    CHECK_FALSE(r.domain_warning);
    CHECK(r.linear_approx == doctest::Approx(0.198));
    CHECK(std::abs(r.exact - r.linear_approx) / r.exact < 0.01);

    TruncatedNormalHazard at0 = truncated_normal_pool_hazard(1.0, 0.1, 0.2, 0.0);
    CHECK(at0.exact == doctest::Approx(0.2).epsilon(1e-4));

    TruncatedNormalHazard wide = truncated_normal_pool_hazard(1.0, 0.5, 0.2, 1.0);
    CHECK(wide.domain_warning);
}

TEST_CASE("multivariate burnout drift") {
    SUBCASE("d = 1 reduces to the scalar identity bitwise") {
        Eigen::VectorXd lam(1);
        lam << 0.1;
        Eigen::MatrixXd var(1, 1);
        var << 1.0;
        double drift = multivariate_burnout_drift(lam, var, 0.0);
        CHECK(drift == -(0.1 * 1.0 * 0.1));
        CHECK(drift == doctest::Approx(-0.01));
    }
    SUBCASE("diagonal covariance quadratic form") {
        Eigen::VectorXd lam(2);
        lam << 0.3, 0.4;
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
        cov(0, 0) = 2.0;
        cov(1, 1) = 5.0;
        CHECK(multivariate_burnout_drift(lam, cov, 0.0) ==
              doctest::Approx(-(0.09 * 2.0 + 0.16 * 5.0)));
    }
    SUBCASE("input validation") {
        Eigen::VectorXd lam(2);
        lam << 0.1, 0.2;
        Eigen::MatrixXd bad(2, 2);
        bad << 1.0, 0.5, 0.4, 1.0;  // asymmetric
        CHECK_THROWS_AS(multivariate_burnout_drift(lam, bad, 0.0), std::invalid_argument);
        Eigen::MatrixXd neg(2, 2);
        neg << 1.0, 2.0, 2.0, 1.0;  // eigenvalue -1
        CHECK_THROWS_AS(multivariate_burnout_drift(lam, neg, 0.0), std::invalid_argument);
    }
}

TEST_CASE("d = 2 ensemble drift matches the quadratic-form formula") {
    Eigen::VectorXd mu(2);
    mu << 0.0, 0.2;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
    cov(0, 0) = 0.04;
    cov(1, 1) = 0.09;
    Eigen::VectorXd lam(2);
    lam << 0.1, 0.2;
    HazardSpec spec = FrailtyFactorHazard{VectorConstantFactor{lam}};
    WeightedEnsemble ens = init_ensemble(MultivariateLognormalFrailty{mu, cov}, 4000,
                                         EnsembleMode::Sample, 21);
    const double dt = 0.01;
    // central difference around t = 1
    for (int i = 0; i < 100; ++i) ens.advance_survival(spec, dt);
    Eigen::ArrayXd lambda = ens.hazards(spec, ens.time());
    double before = ens.pool_hazard(lambda);
    Eigen::MatrixXd cov_t = ens.weighted_cov_matrix(ens.nodes());
    double formula = multivariate_burnout_drift(lam, cov_t, 0.0);
    ens.advance_survival(spec, dt);
    ens.advance_survival(spec, dt);
    double after = ens.pool_hazard(ens.hazards(spec, ens.time()));
    // cov was taken at the midpoint of the two steps
    double fd = (after - before) / (2.0 * dt);
    CHECK(std::abs(fd - formula) < 1e-3);
}

TEST_CASE("calibration: noiseless round trip") {
    Eigen::ArrayXd t = Eigen::ArrayXd::LinSpaced(50, 0.0, 10.0);
    Eigen::ArrayXd h = 0.4 / (1.0 + 0.2 * t);
    GammaCalibration fit = calibrate_gamma(t, h);
    CHECK(std::abs(fit.initial_pool_hazard - 0.4) < 1e-8);
    CHECK(std::abs(fit.decay - 0.2) < 1e-8);
    CHECK(fit.rms_error < 1e-10);
}

TEST_CASE("calibration: constant series fits zero decay") {
    Eigen::ArrayXd t = Eigen::ArrayXd::LinSpaced(20, 0.0, 10.0);
    Eigen::ArrayXd h = Eigen::ArrayXd::Constant(20, 0.07);
    GammaCalibration fit = calibrate_gamma(t, h);
    CHECK(std::abs(fit.initial_pool_hazard - 0.07) < 1e-10);
    CHECK(std::abs(fit.decay) < 1e-8);
}

TEST_CASE("calibration: 1% noise recovers decay within 10% in >= 95/100 seeds") {
    Eigen::ArrayXd t = Eigen::ArrayXd::LinSpaced(50, 0.0, 10.0);
    Eigen::ArrayXd clean = 0.4 / (1.0 + 0.2 * t);
    int ok = 0;
    for (int seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(500 + seed);
        std::normal_distribution<double> noise(0.0, 0.01);
        Eigen::ArrayXd noisy = clean;
        for (Eigen::Index i = 0; i < noisy.size(); ++i) noisy[i] *= 1.0 + noise(rng);
        GammaCalibration fit = calibrate_gamma(t, noisy);
        if (std::abs(fit.decay - 0.2) / 0.2 < 0.10) ++ok;
    }
    CHECK(ok >= 95);
}

TEST_CASE("calibration input validation") {
    Eigen::ArrayXd t(2), h(2);
    t << 0.0, 1.0;
    h << 0.4, 0.3;
    CHECK_THROWS_AS(calibrate_gamma(t, h), std::invalid_argument);
}
