#include "burnout/frailty_distribution.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace burnout {

namespace {

constexpr double kProbSumTol = 1e-12;

struct Validator {
    void operator()(const GammaFrailty& g) const {
        if (!(g.shape > 0.0) || !(g.scale > 0.0))
            throw std::invalid_argument("Gamma frailty requires shape > 0 and scale > 0");
    }
    void operator()(const LognormalFrailty& l) const {
        if (!(l.log_std > 0.0) || !std::isfinite(l.log_mean))
            throw std::invalid_argument("Lognormal frailty requires log_std > 0");
    }
    void operator()(const TruncatedNormalFrailty& t) const {
        if (!(t.std > 0.0) || !std::isfinite(t.mean))
            throw std::invalid_argument("TruncatedNormal frailty requires std > 0");
    }
    void operator()(const DiscreteFrailty& d) const {
        if (d.values.empty() || d.values.size() != d.probs.size())
            throw std::invalid_argument("Discrete frailty needs matching nonempty values/probs");
        double total = 0.0;
        for (size_t i = 0; i < d.values.size(); ++i) {
            if (d.values[i] < 0.0)
                throw std::invalid_argument("Discrete frailty values must be >= 0");
            if (d.probs[i] < 0.0)
                throw std::invalid_argument("Discrete frailty probs must be >= 0");
            total += d.probs[i];
        }
        if (std::abs(total - 1.0) > kProbSumTol)
            throw std::invalid_argument("Discrete frailty probs must sum to 1");
    }
    void operator()(const MultivariateLognormalFrailty& m) const {
        const Eigen::Index d = m.mu.size();
        if (d < 1 || m.cov.rows() != d || m.cov.cols() != d)
            throw std::invalid_argument("Multivariate frailty dimension mismatch");
        if (!m.cov.isApprox(m.cov.transpose(), 1e-10))
            throw std::invalid_argument("Multivariate frailty covariance must be symmetric");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.cov);
        if (es.eigenvalues().minCoeff() < -1e-10)
            throw std::invalid_argument("Multivariate frailty covariance must be PSD");
    }
};

// Symmetric PSD square root via spectral decomposition (tolerates zero modes).
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& cov) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

void validate(const FrailtyDistribution& dist) { std::visit(Validator{}, dist); }

int dimension(const FrailtyDistribution& dist) {
    if (const auto* m = std::get_if<MultivariateLognormalFrailty>(&dist))
        return static_cast<int>(m->mu.size());
    return 1;
}

double analytic_mean(const FrailtyDistribution& dist) {
    validate(dist);
    if (const auto* g = std::get_if<GammaFrailty>(&dist)) return g->shape * g->scale;
    if (const auto* l = std::get_if<LognormalFrailty>(&dist))
        return std::exp(l->log_mean + 0.5 * l->log_std * l->log_std);
    if (const auto* t = std::get_if<TruncatedNormalFrailty>(&dist)) {
        boost::math::normal_distribution<double> std_normal;
        double alpha = -t->mean / t->std;
        double tail = 1.0 - boost::math::cdf(std_normal, alpha);
        return t->mean + t->std * boost::math::pdf(std_normal, alpha) / tail;
    }
    if (const auto* d = std::get_if<DiscreteFrailty>(&dist)) {
        double m = 0.0;
        for (size_t i = 0; i < d->values.size(); ++i) m += d->values[i] * d->probs[i];
        return m;
    }
    throw std::invalid_argument("analytic_mean: scalar variants only");
}

double analytic_variance(const FrailtyDistribution& dist) {
    validate(dist);
    if (const auto* g = std::get_if<GammaFrailty>(&dist)) return g->shape * g->scale * g->scale;
    if (const auto* l = std::get_if<LognormalFrailty>(&dist)) {
        double s2 = l->log_std * l->log_std;
        return (std::exp(s2) - 1.0) * std::exp(2.0 * l->log_mean + s2);
    }
    if (const auto* t = std::get_if<TruncatedNormalFrailty>(&dist)) {
        boost::math::normal_distribution<double> std_normal;
        double alpha = -t->mean / t->std;
        double tail = 1.0 - boost::math::cdf(std_normal, alpha);
        double hazard = boost::math::pdf(std_normal, alpha) / tail;
        return t->std * t->std * (1.0 + alpha * hazard - hazard * hazard);
    }
    if (const auto* d = std::get_if<DiscreteFrailty>(&dist)) {
        double m = analytic_mean(dist), v = 0.0;
        for (size_t i = 0; i < d->values.size(); ++i)
            v += (d->values[i] - m) * (d->values[i] - m) * d->probs[i];
        return v;
    }
    throw std::invalid_argument("analytic_variance: scalar variants only");
}

Eigen::MatrixXd sample_types(const FrailtyDistribution& dist, int n, std::uint64_t seed) {
    validate(dist);
    if (n < 1) throw std::invalid_argument("sample_types: n must be >= 1");
    std::mt19937_64 rng(seed);

    if (const auto* g = std::get_if<GammaFrailty>(&dist)) {
        std::gamma_distribution<double> draw(g->shape, g->scale);
        Eigen::MatrixXd out(n, 1);
        for (int i = 0; i < n; ++i) out(i, 0) = draw(rng);
        return out;
    }
    if (const auto* l = std::get_if<LognormalFrailty>(&dist)) {
        std::normal_distribution<double> draw(l->log_mean, l->log_std);
        Eigen::MatrixXd out(n, 1);
        for (int i = 0; i < n; ++i) out(i, 0) = std::exp(draw(rng));
        return out;
    }
    if (const auto* t = std::get_if<TruncatedNormalFrailty>(&dist)) {
        std::normal_distribution<double> draw(t->mean, t->std);
        Eigen::MatrixXd out(n, 1);
        for (int i = 0; i < n; ++i) {
            double f;
            do { f = draw(rng); } while (!(f > 0.0));
            out(i, 0) = f;
        }
        return out;
    }
    if (const auto* d = std::get_if<DiscreteFrailty>(&dist)) {
        std::discrete_distribution<int> draw(d->probs.begin(), d->probs.end());
        Eigen::MatrixXd out(n, 1);
        for (int i = 0; i < n; ++i) out(i, 0) = d->values[static_cast<size_t>(draw(rng))];
        return out;
    }
    const auto& m = std::get<MultivariateLognormalFrailty>(dist);
    const Eigen::Index dim = m.mu.size();
    Eigen::MatrixXd root = psd_sqrt(m.cov);
    std::normal_distribution<double> draw(0.0, 1.0);
    Eigen::MatrixXd out(n, dim);
    Eigen::VectorXd z(dim);
    for (int i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) z[j] = draw(rng);
        out.row(i) = (m.mu + root * z).array().exp().transpose();
    }
    return out;
}

GaussRule quantile_nodes(const FrailtyDistribution& dist, int n) {
    validate(dist);
    if (n < 2) throw std::invalid_argument("quantile_nodes: n must be >= 2");

    if (const auto* g = std::get_if<GammaFrailty>(&dist)) {
        GaussRule rule = gauss_laguerre(n, g->shape - 1.0);
        rule.nodes *= g->scale;
        return rule;
    }
    if (const auto* l = std::get_if<LognormalFrailty>(&dist)) {
        GaussRule rule = gauss_hermite(n);
        rule.nodes = (l->log_mean + l->log_std * rule.nodes).exp();
        return rule;
    }
    if (const auto* t = std::get_if<TruncatedNormalFrailty>(&dist)) {
        // Legendre panel covering the truncated support; weights carry the
        // normal density and are renormalized over f > 0.
        const double lo = std::max(0.0, t->mean - 12.0 * t->std);
        const double hi = t->mean + 12.0 * t->std;
        GaussRule rule = gauss_legendre(n);
        rule.nodes = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes;
        Eigen::ArrayXd zscore = (rule.nodes - t->mean) / t->std;
        rule.weights *= (-0.5 * zscore.square()).exp();
        rule.weights /= rule.weights.sum();
        return rule;
    }
    if (const auto* d = std::get_if<DiscreteFrailty>(&dist)) {
        GaussRule rule;
        rule.nodes = Eigen::Map<const Eigen::ArrayXd>(d->values.data(),
                                                      static_cast<Eigen::Index>(d->values.size()));
        rule.weights = Eigen::Map<const Eigen::ArrayXd>(d->probs.data(),
                                                        static_cast<Eigen::Index>(d->probs.size()));
        return rule;
    }
    throw std::invalid_argument("quantile_nodes: multivariate frailty is sampling-only");
}

}  // namespace burnout
