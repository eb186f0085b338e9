#pragma once

#include <Eigen/Core>

namespace burnout {

/// Nodes and weights of an n-point Gauss rule. Weights are normalized to
/// sum to 1, i.e. the rule integrates against a probability measure.
struct GaussRule {
    Eigen::ArrayXd nodes;
    Eigen::ArrayXd weights;
};

/// Golub-Welsch: Gauss rule from the Jacobi matrix of a (monic) orthogonal
/// polynomial recurrence. `diag` has length n, `subdiag` length n-1.
GaussRule golub_welsch(Eigen::ArrayXd diag, Eigen::ArrayXd subdiag);

/// Gauss-Legendre on [-1, 1], normalized uniform measure.
GaussRule gauss_legendre(int n);

/// Probabilists' Gauss-Hermite: integrates against the standard normal law.
GaussRule gauss_hermite(int n);

/// Generalized Gauss-Laguerre with exponent alpha > -1: integrates against
/// the normalized measure x^alpha e^{-x} dx / Gamma(alpha+1) on (0, inf).
GaussRule gauss_laguerre(int n, double alpha);

}  // namespace burnout
