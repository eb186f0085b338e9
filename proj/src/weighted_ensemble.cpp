#include "burnout/weighted_ensemble.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "burnout/numeric.hpp"

namespace burnout {

WeightedEnsemble::WeightedEnsemble(Eigen::MatrixXd nodes, Eigen::ArrayXd base_weights)
    : nodes_(std::move(nodes)), base_weights_(std::move(base_weights)) {
    if (nodes_.rows() < 1 || nodes_.rows() != base_weights_.size())
        throw std::invalid_argument("WeightedEnsemble: nodes/weights size mismatch");
    if ((base_weights_ < 0.0).any())
        throw std::invalid_argument("WeightedEnsemble: base weights must be >= 0");
    if (std::abs(compensated_sum(base_weights_) - 1.0) > 1e-10)
        throw std::invalid_argument("WeightedEnsemble: base weights must sum to 1");
    survival_ = Eigen::ArrayXd::Ones(nodes_.rows());
    cum_hazard_ = Eigen::ArrayXd::Zero(nodes_.rows());
}

double WeightedEnsemble::pool_survival() const {
    return compensated_dot(base_weights_, survival_);
}

Eigen::ArrayXd WeightedEnsemble::normalized_weights() const {
    Eigen::ArrayXd raw = base_weights_ * survival_;
    return raw / compensated_sum(raw);
}

Eigen::ArrayXd WeightedEnsemble::hazards(const HazardSpec& spec, double t) const {
    Eigen::ArrayXd out(size());
    if (dimension() == 1) {
        for (Eigen::Index i = 0; i < size(); ++i) out[i] = eval_hazard(spec, t, nodes_(i, 0));
    } else {
        for (Eigen::Index i = 0; i < size(); ++i) {
            Eigen::VectorXd f = nodes_.row(i).transpose();
            out[i] = eval_hazard(spec, t, f);
        }
    }
    return out;
}

void WeightedEnsemble::advance_survival(const HazardSpec& spec, double dt,
                                        const std::optional<Eigen::ArrayXd>& hazard_values) {
    if (!(dt > 0.0)) throw std::invalid_argument("advance_survival: dt must be positive");
    Eigen::ArrayXd lambda;
    if (hazard_values) {
        if (hazard_values->size() != size())
            throw std::invalid_argument("advance_survival: hazard_values length mismatch");
        lambda = *hazard_values;
    } else {
        if (is_stochastic(spec))
            throw std::invalid_argument(
                "advance_survival: Ito specs require externally simulated hazards");
        lambda = hazards(spec, t_ + 0.5 * dt);
    }
    if ((lambda < 0.0).any())
        throw std::domain_error("advance_survival: negative hazard value");
    cum_hazard_ += lambda * dt;
    survival_ = (-cum_hazard_).exp();
    t_ += dt;
}

double WeightedEnsemble::weighted_mean(const Eigen::ArrayXd& phi) const {
    if (phi.size() != size()) throw std::invalid_argument("weighted_mean: length mismatch");
    Eigen::ArrayXd raw = base_weights_ * survival_;
    return compensated_dot(raw, phi) / compensated_sum(raw);
}

double WeightedEnsemble::weighted_var(const Eigen::ArrayXd& phi) const {
    double m = weighted_mean(phi);
    Eigen::ArrayXd centered = phi - m;
    double v = weighted_mean(centered.square());
    return v < 0.0 ? 0.0 : v;
}

double WeightedEnsemble::weighted_cov(const Eigen::ArrayXd& phi, const Eigen::ArrayXd& psi) const {
    double mp = weighted_mean(phi);
    double mq = weighted_mean(psi);
    return weighted_mean((phi - mp) * (psi - mq));
}

Eigen::VectorXd WeightedEnsemble::weighted_mean_vector(const Eigen::MatrixXd& phi) const {
    if (phi.rows() != size()) throw std::invalid_argument("weighted_mean_vector: row mismatch");
    Eigen::VectorXd out(phi.cols());
    for (Eigen::Index j = 0; j < phi.cols(); ++j) out[j] = weighted_mean(phi.col(j).array());
    return out;
}

Eigen::MatrixXd WeightedEnsemble::weighted_cov_matrix(const Eigen::MatrixXd& phi) const {
    if (phi.rows() != size()) throw std::invalid_argument("weighted_cov_matrix: row mismatch");
    const Eigen::Index d = phi.cols();
    Eigen::MatrixXd cov(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = a; b < d; ++b) {
            double c = weighted_cov(phi.col(a).array(), phi.col(b).array());
            cov(a, b) = c;
            cov(b, a) = c;
        }
    if (d > 1) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        if (es.eigenvalues().minCoeff() < 0.0) {
            Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
            cov = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
        }
    } else if (cov(0, 0) < 0.0) {
        cov(0, 0) = 0.0;
    }
    return cov;
}

double WeightedEnsemble::pool_hazard(const Eigen::ArrayXd& hazard_values) const {
    return weighted_mean(hazard_values);
}

Eigen::ArrayXd WeightedEnsemble::weighting_factor() const {
    return survival_ / pool_survival();
}

double WeightedEnsemble::effective_sample_size() const {
    Eigen::ArrayXd w = normalized_weights();
    return 1.0 / compensated_sum(w.square());
}

WeightedEnsemble init_ensemble(const FrailtyDistribution& dist, int n, EnsembleMode mode,
                               std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("init_ensemble: n must be >= 2");
    if (mode == EnsembleMode::Quadrature) {
        GaussRule rule = quantile_nodes(dist, n);
        Eigen::MatrixXd nodes(rule.nodes.size(), 1);
        nodes.col(0) = rule.nodes.matrix();
        return WeightedEnsemble(std::move(nodes), rule.weights);
    }
    Eigen::MatrixXd nodes = sample_types(dist, n, seed);
    Eigen::ArrayXd weights = Eigen::ArrayXd::Constant(n, 1.0 / n);
    return WeightedEnsemble(std::move(nodes), weights);
}

}  // namespace burnout
