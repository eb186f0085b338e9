#include "burnout/montecarlo_pool.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "burnout/stochastic_dynamics.hpp"

namespace burnout {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Uniform in (0, 1) from a counter-based stream keyed by (seed, index).
double borrower_uniform(std::uint64_t seed, long index) {
    std::uint64_t z = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index) + 1));
    return (static_cast<double>(z >> 11) + 0.5) * 0x1p-53;
}

}  // namespace

PoolSimResult simulate_pool(const HazardSpec& spec, const FrailtyDistribution& dist,
                            const Eigen::ArrayXd& grid, long n_borrowers, std::uint64_t seed) {
    const Eigen::Index m = grid.size();
    if (m < 2) throw std::invalid_argument("simulate_pool: grid needs at least 2 points");
    if (grid[0] != 0.0) throw std::invalid_argument("simulate_pool: grid must start at 0");
    for (Eigen::Index j = 1; j < m; ++j)
        if (!(grid[j] > grid[j - 1]))
            throw std::invalid_argument("simulate_pool: grid must be strictly increasing");
    if (n_borrowers < 1) throw std::invalid_argument("simulate_pool: need at least 1 borrower");

    Eigen::MatrixXd types = sample_types(dist, static_cast<int>(n_borrowers), seed);
    const bool vector_types = types.cols() > 1;

    // One common-factor Brownian path per pool, shared by all borrowers.
    const auto* ito = std::get_if<ItoHazard>(&spec);
    Eigen::ArrayXd dW;
    if (ito) {
        const double dt = grid[1] - grid[0];
        for (Eigen::Index j = 1; j < m; ++j)
            if (std::abs(grid[j] - grid[j - 1] - dt) > 1e-9 * std::max(1.0, dt))
                throw std::invalid_argument("simulate_pool: Ito specs need a uniform grid");
        dW = brownian_increments(splitmix64(seed ^ 0xC0FFEEull), m - 1, dt);
    }

    // Per-period prepayment counts; the last slot holds censored loans.
    std::vector<long> events(static_cast<size_t>(m), 0);

    Eigen::ArrayXd cum(m);
    for (long i = 0; i < n_borrowers; ++i) {
        cum[0] = 0.0;
        if (ito) {
            double lambda = ito->initial(types(i, 0));
            if (!(lambda >= 0.0))
                throw std::domain_error("simulate_pool: invalid initial hazard");
            for (Eigen::Index j = 1; j < m; ++j) {
                double dt = grid[j] - grid[j - 1];
                cum[j] = cum[j - 1] + lambda * dt;  // left-point rule
                double next = lambda + ito->drift(grid[j - 1], types(i, 0)) * dt +
                              ito->diffusion(grid[j - 1], types(i, 0)) * dW[j - 1];
                lambda = next < 0.0 ? 0.0 : next;
            }
        } else {
            for (Eigen::Index j = 1; j < m; ++j) {
                double dt = grid[j] - grid[j - 1];
                double tm = grid[j - 1] + 0.5 * dt;
                double lambda = vector_types
                                    ? eval_hazard(spec, tm, Eigen::VectorXd(types.row(i).transpose()))
                                    : eval_hazard(spec, tm, types(i, 0));
                cum[j] = cum[j - 1] + lambda * dt;
            }
        }

        double threshold = -std::log(borrower_uniform(seed, i));
        if (cum[m - 1] < threshold) {
            ++events[static_cast<size_t>(m - 1)];  // survives past the horizon
            continue;
        }
        Eigen::Index j = 1;
        while (cum[j] < threshold) ++j;
        ++events[static_cast<size_t>(j - 1)];  // prepays in period (t_{j-1}, t_j]
    }

    PoolSimResult result;
    result.n_borrowers = n_borrowers;
    result.grid = grid;
    result.survivors.resize(static_cast<size_t>(m));
    result.smm.resize(m - 1);
    result.empirical_hazard.resize(m - 1);
    result.ci_halfwidth.resize(m - 1);

    long alive = n_borrowers;
    result.survivors[0] = alive;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (Eigen::Index p = 0; p < m - 1; ++p) {
        long at_risk = alive;
        long prepaid = events[static_cast<size_t>(p)];
        alive -= prepaid;
        result.survivors[static_cast<size_t>(p + 1)] = alive;
        double dt = grid[p + 1] - grid[p];
        if (at_risk == 0) {
            result.smm[p] = 0.0;
            result.empirical_hazard[p] = 0.0;
            result.ci_halfwidth[p] = nan;
            continue;
        }
        double smm = static_cast<double>(prepaid) / static_cast<double>(at_risk);
        result.smm[p] = smm;
        result.empirical_hazard[p] = smm < 1.0 ? -std::log1p(-smm) / dt
                                               : std::numeric_limits<double>::infinity();
        if (at_risk >= 30 && smm < 1.0) {
            double se = std::sqrt(smm * (1.0 - smm) / static_cast<double>(at_risk));
            result.ci_halfwidth[p] = 1.96 * se / ((1.0 - smm) * dt);
        } else {
            result.ci_halfwidth[p] = nan;
        }
    }
    return result;
}

double smm_to_cpr(double smm) {
    if (!(smm >= 0.0) || smm >= 1.0)
        throw std::invalid_argument("smm_to_cpr: smm must be in [0, 1)");
    return 1.0 - std::pow(1.0 - smm, 12.0);
}

double cpr_to_smm(double cpr) {
    if (!(cpr >= 0.0) || cpr >= 1.0)
        throw std::invalid_argument("cpr_to_smm: cpr must be in [0, 1)");
    return 1.0 - std::pow(1.0 - cpr, 1.0 / 12.0);
}

}  // namespace burnout
