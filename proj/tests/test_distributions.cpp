#include <doctest.h>

#include <cmath>
#include <set>

#include "burnout/frailty_distribution.hpp"

using namespace burnout;

namespace {

// Sample moments of 10^6 draws must sit within 6 standard errors of the
// analytic moments for every scalar variant.
void check_sample_moments(const FrailtyDistribution& dist) {
    const int n = 1'000'000;
    Eigen::MatrixXd draws = sample_types(dist, n, 12345);
    double mean = draws.col(0).mean();
    double var = (draws.col(0).array() - mean).square().sum() / (n - 1);
    double m = analytic_mean(dist);
    double v = analytic_variance(dist);
    double se_mean = std::sqrt(v / n);
    CHECK(std::abs(mean - m) < 6.0 * se_mean);
    // crude SE for the variance, good enough at this n
    double m4 = (draws.col(0).array() - mean).pow(4).mean();
    double se_var = std::sqrt((m4 - v * v) / n);
    CHECK(std::abs(var - v) < 6.0 * se_var);
}

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(validate(FrailtyDistribution{GammaFrailty{-1.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(validate(FrailtyDistribution{LognormalFrailty{0.0, 0.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate(FrailtyDistribution{DiscreteFrailty{{1.0, 3.0}, {0.5, 0.6}}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate(FrailtyDistribution{DiscreteFrailty{{-1.0}, {1.0}}}),
                    std::invalid_argument);
    CHECK_NOTHROW(validate(FrailtyDistribution{GammaFrailty{2.0, 1.0}}));
}

TEST_CASE("discrete sampling stays on the support") {
    DiscreteFrailty d{{1.0, 3.0}, {0.5, 0.5}};
    Eigen::MatrixXd draws = sample_types(d, 4, 7);
    for (int i = 0; i < 4; ++i) CHECK((draws(i, 0) == 1.0 || draws(i, 0) == 3.0));
}

TEST_CASE("gamma sample mean within CLT bound") {
    Eigen::MatrixXd draws = sample_types(GammaFrailty{2.0, 1.0}, 1'000'000, 1);
    CHECK(std::abs(draws.col(0).mean() - 2.0) < 0.01);  // 5 sigma-ish with var = 2
}

TEST_CASE("truncated normal draws are strictly positive") {
    Eigen::MatrixXd draws = sample_types(TruncatedNormalFrailty{1.0, 0.1}, 100'000, 1);
    CHECK(draws.col(0).minCoeff() > 0.0);
}

TEST_CASE("sampling is deterministic in the seed") {
    Eigen::MatrixXd a = sample_types(GammaFrailty{2.0, 1.0}, 100, 42);
    Eigen::MatrixXd b = sample_types(GammaFrailty{2.0, 1.0}, 100, 42);
    Eigen::MatrixXd c = sample_types(GammaFrailty{2.0, 1.0}, 100, 43);
    CHECK((a.array() == b.array()).all());
    CHECK((a.array() != c.array()).any());
}

TEST_CASE("sample moments match analytic moments") {
    check_sample_moments(GammaFrailty{2.0, 1.0});
    check_sample_moments(LognormalFrailty{0.0, 0.25});
    check_sample_moments(TruncatedNormalFrailty{1.0, 0.3});
    check_sample_moments(DiscreteFrailty{{0.5, 1.0, 2.5}, {0.3, 0.4, 0.3}});
}

TEST_CASE("multivariate lognormal sample mean matches closed form") {
    Eigen::VectorXd mu(2);
    mu << 0.0, 0.1;
    Eigen::MatrixXd cov(2, 2);
    cov << 0.04, 0.01, 0.01, 0.09;
    MultivariateLognormalFrailty m{mu, cov};
    CHECK(dimension(FrailtyDistribution{m}) == 2);
    Eigen::MatrixXd draws = sample_types(m, 400'000, 9);
    for (int j = 0; j < 2; ++j) {
        double expected = std::exp(mu[j] + 0.5 * cov(j, j));
        CHECK(draws.col(j).mean() == doctest::Approx(expected).epsilon(5e-3));
    }
}

TEST_CASE("quantile nodes: discrete is exact") {
    GaussRule rule = quantile_nodes(DiscreteFrailty{{1.0, 3.0}, {0.5, 0.5}}, 2);
    CHECK(rule.nodes[0] == 1.0);
    CHECK(rule.nodes[1] == 3.0);
    CHECK(rule.weights[0] == 0.5);
    CHECK(rule.weights[1] == 0.5);
}

TEST_CASE("quantile nodes reproduce analytic means") {
    SUBCASE("gamma") {
        GaussRule rule = quantile_nodes(GammaFrailty{2.0, 1.0}, 256);
        CHECK(std::abs((rule.weights * rule.nodes).sum() - 2.0) < 1e-3);
    }
    SUBCASE("lognormal") {
        GaussRule rule = quantile_nodes(LognormalFrailty{0.0, 0.1}, 256);
        CHECK(std::abs((rule.weights * rule.nodes).sum() - std::exp(0.005)) < 1e-4);
    }
    SUBCASE("truncated normal") {
        FrailtyDistribution dist = TruncatedNormalFrailty{1.0, 0.3};
        GaussRule rule = quantile_nodes(dist, 256);
        CHECK((rule.weights * rule.nodes).sum() ==
              doctest::Approx(analytic_mean(dist)).epsilon(1e-8));
    }
}

TEST_CASE("quantile node weights: nonnegative, sum to 1") {
    for (int n : {8, 64, 256}) {
        GaussRule rule = quantile_nodes(GammaFrailty{1.5, 0.7}, n);
        CHECK((rule.weights >= 0.0).all());
        CHECK(std::abs(rule.weights.sum() - 1.0) < 1e-12);
    }
}

TEST_CASE("quantile nodes reject multivariate laws") {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(2);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(quantile_nodes(MultivariateLognormalFrailty{mu, cov}, 16),
                    std::invalid_argument);
}
