#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>

#include "burnout/frailty_distribution.hpp"
#include "burnout/hazard_spec.hpp"

namespace burnout {

enum class EnsembleMode { Quadrature, Sample };

/// Discretization of the survival-weighted cross-sectional measure: fixed
/// type nodes with base F-mass and per-node survival factors. Nodes never
/// move or resample; the weights decay analytically.
class WeightedEnsemble {
  public:
    WeightedEnsemble(Eigen::MatrixXd nodes, Eigen::ArrayXd base_weights);

    Eigen::Index size() const { return nodes_.rows(); }
    int dimension() const { return static_cast<int>(nodes_.cols()); }
    double time() const { return t_; }

    const Eigen::MatrixXd& nodes() const { return nodes_; }
    /// Scalar node values (first component).
    Eigen::ArrayXd scalar_nodes() const { return nodes_.col(0).array(); }
    const Eigen::ArrayXd& base_weights() const { return base_weights_; }
    const Eigen::ArrayXd& survival() const { return survival_; }
    const Eigen::ArrayXd& cum_hazard() const { return cum_hazard_; }

    /// Pool survival: sum of base mass times per-node survival.
    double pool_survival() const;

    /// Survival-normalized weights, summing to 1.
    Eigen::ArrayXd normalized_weights() const;

    /// Per-node hazards under `spec` at the ensemble's current time.
    Eigen::ArrayXd hazards(const HazardSpec& spec, double t) const;

    /// Accumulate hazard over [t, t+dt]. Deterministic specs use the
    /// midpoint rule (hazard at t + dt/2); supplied per-node hazards (the
    /// stochastic path owns them) use the left-point rule.
    void advance_survival(const HazardSpec& spec, double dt,
                          const std::optional<Eigen::ArrayXd>& hazard_values = std::nullopt);

    double weighted_mean(const Eigen::ArrayXd& phi) const;
    double weighted_var(const Eigen::ArrayXd& phi) const;
    double weighted_cov(const Eigen::ArrayXd& phi, const Eigen::ArrayXd& psi) const;
    /// Survival-weighted covariance matrix of per-node vector observables
    /// (one row per node). Negative eigenvalues above -1e-12 are clamped.
    Eigen::MatrixXd weighted_cov_matrix(const Eigen::MatrixXd& phi) const;
    Eigen::VectorXd weighted_mean_vector(const Eigen::MatrixXd& phi) const;

    double pool_hazard(const Eigen::ArrayXd& hazard_values) const;

    /// Radon-Nikodym weighting factor H_t(x) = S_t(x) / pool survival.
    Eigen::ArrayXd weighting_factor() const;

    /// 1 / sum w_i^2 over normalized weights; equals n when uniform.
    double effective_sample_size() const;

  private:
    Eigen::MatrixXd nodes_;
    Eigen::ArrayXd base_weights_;
    Eigen::ArrayXd survival_;
    Eigen::ArrayXd cum_hazard_;
    double t_ = 0.0;
};

WeightedEnsemble init_ensemble(const FrailtyDistribution& dist, int n, EnsembleMode mode,
                               std::uint64_t seed);

}  // namespace burnout
