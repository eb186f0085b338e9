#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "burnout/frailty_distribution.hpp"
#include "burnout/hazard_spec.hpp"
#include "burnout/identities.hpp"
#include "burnout/montecarlo_pool.hpp"

namespace burnout {

/// Configuration errors carry the JSON pointer of the offending key.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Serializable common-factor descriptor (CoxPH baselines are constant in
/// config files; arbitrary baselines are available through the library API).
struct CommonFactorConfig {
    enum class Kind { Constant, Path, CoxPH, Vector };
    Kind kind = Kind::Constant;
    double lambda = 0.0;
    Eigen::ArrayXd times, values;
    double base_constant = 0.0;
    Eigen::VectorXd beta, covariates;
    Eigen::VectorXd lambda_vec;

    CommonFactorSpec build() const;
};

/// Serializable hazard-model descriptor.
struct ModelConfig {
    enum class Kind {
        FrailtyFactor,      // lambda = f * common(t)
        DeterministicAffine,  // lambda = f * (a + b t)
        Ito                 // d lambda = mu(f) dt + sigma(f) dW
    };
    Kind kind = Kind::FrailtyFactor;
    CommonFactorConfig common;
    double affine_a = 0.0, affine_b = 0.0;
    // Affine-in-f Ito coefficients: value = constant + scale * f.
    double lambda0_const = 0.0, lambda0_scale = 0.0;
    double mu_const = 0.0, mu_scale = 0.0;
    double sigma_const = 0.0, sigma_scale = 0.0;

    HazardSpec build() const;
    bool stochastic() const { return kind == Kind::Ito; }
};

struct CheckConfig {
    std::string type;  // burnout | selection | monotone | sde
    double tolerance = 1e-3;
};

struct ScenarioConfig {
    int version = 1;
    ModelConfig model;
    FrailtyDistribution distribution = GammaFrailty{};
    double t_end = 10.0;
    double dt = 0.01;
    int ensemble_n = 256;
    EnsembleMode mode = EnsembleMode::Quadrature;
    bool mc_enabled = false;
    long mc_n_borrowers = 100000;
    std::uint64_t seed = 1;
    std::string csv_path = "pool_path.csv";
    std::string report_path = "report.txt";
    std::string mc_csv_path = "montecarlo.csv";
    std::vector<CheckConfig> checks;
};

/// Strict parser: unknown keys are errors. Throws ConfigError.
ScenarioConfig parse_scenario(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::string& path);
nlohmann::json to_json(const ScenarioConfig& config);

/// Exit statuses of run_scenario, mirrored by the CLI process exit code.
enum class RunStatus : int { Ok = 0, CheckFailed = 1, ConfigError = 2, NumericError = 3 };

struct RunOutcome {
    RunStatus status = RunStatus::Ok;
    PoolPath path;
    std::vector<std::string> report_lines;
};

/// Execute a scenario: evolve the pool, run the configured identity checks,
/// write the PoolPath CSV, the check report, and (when enabled) the Monte
/// Carlo CSV. Quiet mode suppresses stdout echoing of the report.
RunOutcome run_scenario(const ScenarioConfig& config, bool quiet = false);

void write_pool_path_csv(const PoolPath& path, const std::string& file);
void write_montecarlo_csv(const PoolSimResult& result, const std::string& file);

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<Eigen::ArrayXd> data;
};
CsvTable read_csv(const std::string& file);

struct CompareReport {
    std::vector<std::string> columns;
    std::vector<double> max_abs_delta;
    bool pass = false;
};

/// Column-wise max-abs difference of two CSVs on matching grids.
CompareReport compare_runs(const std::string& csv_a, const std::string& csv_b, double tolerance);

}  // namespace burnout
