#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "burnout/frailty_distribution.hpp"
#include "burnout/hazard_spec.hpp"

namespace burnout {

/// Borrower-level simulation output on a period grid.
struct PoolSimResult {
    long n_borrowers = 0;
    Eigen::ArrayXd grid;               // period boundaries, grid[0] = 0
    std::vector<long> survivors;       // at each boundary
    Eigen::ArrayXd smm;                // per period prepaid fraction
    Eigen::ArrayXd empirical_hazard;   // -log(1 - smm) / dt
    Eigen::ArrayXd ci_halfwidth;       // 95% binomial half-width on the hazard;
                                       // NaN when fewer than 30 at risk
};

/// Simulate prepayment times for n_borrowers independent borrowers. Types
/// are drawn once from `dist`; each borrower's uniform comes from its own
/// counter-based stream keyed by (seed, index), so results are independent
/// of evaluation order. For Ito specs one common-factor path per pool is
/// simulated from a sub-seed and shared by all borrowers.
PoolSimResult simulate_pool(const HazardSpec& spec, const FrailtyDistribution& dist,
                            const Eigen::ArrayXd& grid, long n_borrowers, std::uint64_t seed);

/// CPR = 1 - (1 - SMM)^12.
double smm_to_cpr(double smm);
double cpr_to_smm(double cpr);

}  // namespace burnout
