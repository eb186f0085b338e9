#include "burnout/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "burnout/stochastic_dynamics.hpp"

namespace burnout {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::string& where,
                  std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional = {}) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const char* k : required)
        if (!j.contains(k)) throw ConfigError(where + ": missing key '" + k + "'");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : required)
            if (it.key() == k) known = true;
        for (const char* k : optional)
            if (it.key() == k) known = true;
        if (!known) throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

double number_at(const json& j, const std::string& where, const char* key) {
    if (!j.at(key).is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
    return j.at(key).get<double>();
}

Eigen::ArrayXd array_at(const json& j, const std::string& where, const char* key) {
    const json& a = j.at(key);
    if (!a.is_array() || a.empty())
        throw ConfigError(where + ": '" + key + "' must be a nonempty array");
    Eigen::ArrayXd out(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number()) throw ConfigError(where + ": '" + key + "' must be numeric");
        out[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    }
    return out;
}

json to_json_array(const Eigen::ArrayXd& a) {
    json out = json::array();
    for (Eigen::Index i = 0; i < a.size(); ++i) out.push_back(a[i]);
    return out;
}

FrailtyDistribution parse_distribution(const json& j) {
    const std::string where = "distribution";
    if (!j.is_object() || !j.contains("type")) throw ConfigError(where + ": missing 'type'");
    std::string type = j.at("type").get<std::string>();
    try {
        if (type == "gamma") {
            require_keys(j, where, {"type", "k", "theta"});
            GammaFrailty g{number_at(j, where, "k"), number_at(j, where, "theta")};
            validate(FrailtyDistribution{g});
            return g;
        }
        if (type == "lognormal") {
            require_keys(j, where, {"type", "mu", "sigma"});
            LognormalFrailty l{number_at(j, where, "mu"), number_at(j, where, "sigma")};
            validate(FrailtyDistribution{l});
            return l;
        }
        if (type == "truncated_normal") {
            require_keys(j, where, {"type", "m", "s"});
            TruncatedNormalFrailty t{number_at(j, where, "m"), number_at(j, where, "s")};
            validate(FrailtyDistribution{t});
            return t;
        }
        if (type == "discrete") {
            require_keys(j, where, {"type", "values", "probs"});
            Eigen::ArrayXd v = array_at(j, where, "values");
            Eigen::ArrayXd p = array_at(j, where, "probs");
            DiscreteFrailty d;
            d.values.assign(v.data(), v.data() + v.size());
            d.probs.assign(p.data(), p.data() + p.size());
            validate(FrailtyDistribution{d});
            return d;
        }
        if (type == "multivariate_lognormal") {
            require_keys(j, where, {"type", "mu", "cov"});
            Eigen::ArrayXd mu = array_at(j, where, "mu");
            const json& cov_json = j.at("cov");
            if (!cov_json.is_array() || cov_json.size() != static_cast<size_t>(mu.size()))
                throw ConfigError(where + ": 'cov' must be a d x d array of arrays");
            Eigen::MatrixXd cov(mu.size(), mu.size());
            for (size_t r = 0; r < cov_json.size(); ++r) {
                if (!cov_json[r].is_array() || cov_json[r].size() != static_cast<size_t>(mu.size()))
                    throw ConfigError(where + ": 'cov' rows must have length d");
                for (size_t c = 0; c < cov_json[r].size(); ++c)
                    cov(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                        cov_json[r][c].get<double>();
            }
            MultivariateLognormalFrailty m{mu.matrix(), cov};
            validate(FrailtyDistribution{m});
            return m;
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    throw ConfigError(where + ": unknown type '" + type + "'");
}

json distribution_to_json(const FrailtyDistribution& dist) {
    json j;
    if (const auto* g = std::get_if<GammaFrailty>(&dist)) {
        j["type"] = "gamma";
        j["k"] = g->shape;
        j["theta"] = g->scale;
    } else if (const auto* l = std::get_if<LognormalFrailty>(&dist)) {
        j["type"] = "lognormal";
        j["mu"] = l->log_mean;
        j["sigma"] = l->log_std;
    } else if (const auto* t = std::get_if<TruncatedNormalFrailty>(&dist)) {
        j["type"] = "truncated_normal";
        j["m"] = t->mean;
        j["s"] = t->std;
    } else if (const auto* d = std::get_if<DiscreteFrailty>(&dist)) {
        j["type"] = "discrete";
        j["values"] = d->values;
        j["probs"] = d->probs;
    } else {
        const auto& m = std::get<MultivariateLognormalFrailty>(dist);
        j["type"] = "multivariate_lognormal";
        j["mu"] = to_json_array(m.mu.array());
        json cov = json::array();
        for (Eigen::Index r = 0; r < m.cov.rows(); ++r)
            cov.push_back(to_json_array(m.cov.row(r).array()));
        j["cov"] = cov;
    }
    return j;
}

CommonFactorConfig parse_common(const json& j) {
    const std::string where = "model.common";
    if (!j.is_object() || !j.contains("type")) throw ConfigError(where + ": missing 'type'");
    std::string type = j.at("type").get<std::string>();
    CommonFactorConfig out;
    if (type == "constant") {
        require_keys(j, where, {"type", "lambda"});
        out.kind = CommonFactorConfig::Kind::Constant;
        out.lambda = number_at(j, where, "lambda");
    } else if (type == "path") {
        require_keys(j, where, {"type", "times", "values"});
        out.kind = CommonFactorConfig::Kind::Path;
        out.times = array_at(j, where, "times");
        out.values = array_at(j, where, "values");
    } else if (type == "coxph") {
        require_keys(j, where, {"type", "base_constant", "beta", "y"});
        out.kind = CommonFactorConfig::Kind::CoxPH;
        out.base_constant = number_at(j, where, "base_constant");
        out.beta = array_at(j, where, "beta").matrix();
        out.covariates = array_at(j, where, "y").matrix();
    } else if (type == "vector") {
        require_keys(j, where, {"type", "lambda"});
        out.kind = CommonFactorConfig::Kind::Vector;
        out.lambda_vec = array_at(j, where, "lambda").matrix();
    } else {
        throw ConfigError(where + ": unknown type '" + type + "'");
    }
    try {
        validate(out.build());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return out;
}

json common_to_json(const CommonFactorConfig& c) {
    json j;
    switch (c.kind) {
        case CommonFactorConfig::Kind::Constant:
            j["type"] = "constant";
            j["lambda"] = c.lambda;
            break;
        case CommonFactorConfig::Kind::Path:
            j["type"] = "path";
            j["times"] = to_json_array(c.times);
            j["values"] = to_json_array(c.values);
            break;
        case CommonFactorConfig::Kind::CoxPH:
            j["type"] = "coxph";
            j["base_constant"] = c.base_constant;
            j["beta"] = to_json_array(c.beta.array());
            j["y"] = to_json_array(c.covariates.array());
            break;
        case CommonFactorConfig::Kind::Vector:
            j["type"] = "vector";
            j["lambda"] = to_json_array(c.lambda_vec.array());
            break;
    }
    return j;
}

ModelConfig parse_model(const json& j) {
    const std::string where = "model";
    if (!j.is_object() || !j.contains("type")) throw ConfigError(where + ": missing 'type'");
    std::string type = j.at("type").get<std::string>();
    ModelConfig out;
    if (type == "frailty_factor") {
        require_keys(j, where, {"type", "common"});
        out.kind = ModelConfig::Kind::FrailtyFactor;
        out.common = parse_common(j.at("common"));
    } else if (type == "deterministic_affine") {
        require_keys(j, where, {"type", "a", "b"});
        out.kind = ModelConfig::Kind::DeterministicAffine;
        out.affine_a = number_at(j, where, "a");
        out.affine_b = number_at(j, where, "b");
    } else if (type == "ito") {
        require_keys(j, where, {"type", "lambda0", "mu", "sigma"});
        out.kind = ModelConfig::Kind::Ito;
        auto affine = [&](const char* key, double& constant, double& scale) {
            const json& a = j.at(key);
            require_keys(a, where + "." + key, {}, {"const", "scale"});
            constant = a.value("const", 0.0);
            scale = a.value("scale", 0.0);
        };
        affine("lambda0", out.lambda0_const, out.lambda0_scale);
        affine("mu", out.mu_const, out.mu_scale);
        affine("sigma", out.sigma_const, out.sigma_scale);
    } else {
        throw ConfigError(where + ": unknown type '" + type + "'");
    }
    return out;
}

json model_to_json(const ModelConfig& m) {
    json j;
    switch (m.kind) {
        case ModelConfig::Kind::FrailtyFactor:
            j["type"] = "frailty_factor";
            j["common"] = common_to_json(m.common);
            break;
        case ModelConfig::Kind::DeterministicAffine:
            j["type"] = "deterministic_affine";
            j["a"] = m.affine_a;
            j["b"] = m.affine_b;
            break;
        case ModelConfig::Kind::Ito:
            j["type"] = "ito";
            j["lambda0"] = {{"const", m.lambda0_const}, {"scale", m.lambda0_scale}};
            j["mu"] = {{"const", m.mu_const}, {"scale", m.mu_scale}};
            j["sigma"] = {{"const", m.sigma_const}, {"scale", m.sigma_scale}};
            break;
    }
    return j;
}

std::string format_number(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

}  // namespace

CommonFactorSpec CommonFactorConfig::build() const {
    switch (kind) {
        case Kind::Constant:
            return ConstantFactor{lambda};
        case Kind::Path:
            return PathFactor{times, values};
        case Kind::CoxPH: {
            double base = base_constant;
            return CoxPHFactor{[base](double) { return base; }, beta, covariates};
        }
        case Kind::Vector:
            return VectorConstantFactor{lambda_vec};
    }
    throw std::logic_error("unreachable");
}

HazardSpec ModelConfig::build() const {
    switch (kind) {
        case Kind::FrailtyFactor:
            return FrailtyFactorHazard{common.build()};
        case Kind::DeterministicAffine: {
            double a = affine_a, b = affine_b;
            return DeterministicHazard{[a, b](double t, double f) { return f * (a + b * t); },
                                       [b](double, double f) { return f * b; }};
        }
        case Kind::Ito: {
            double l0c = lambda0_const, l0s = lambda0_scale;
            double mc = mu_const, ms = mu_scale;
            double sc = sigma_const, ss = sigma_scale;
            return ItoHazard{[mc, ms](double, double f) { return mc + ms * f; },
                             [sc, ss](double, double f) { return sc + ss * f; },
                             [l0c, l0s](double f) { return l0c + l0s * f; }};
        }
    }
    throw std::logic_error("unreachable");
}

ScenarioConfig parse_scenario(const json& j) {
    require_keys(j, "config",
                 {"version", "model", "distribution", "grid", "ensemble", "seed"},
                 {"montecarlo", "outputs", "checks"});
    ScenarioConfig config;
    if (!j.at("version").is_number_integer() || j.at("version").get<int>() != 1)
        throw ConfigError("config: unsupported version (expected 1)");
    config.version = 1;
    config.model = parse_model(j.at("model"));
    config.distribution = parse_distribution(j.at("distribution"));

    const json& grid = j.at("grid");
    require_keys(grid, "grid", {"t_end", "dt"});
    config.t_end = number_at(grid, "grid", "t_end");
    config.dt = number_at(grid, "grid", "dt");
    if (!(config.dt > 0.0) || !(config.t_end > 0.0))
        throw ConfigError("grid: t_end and dt must be positive");

    const json& ens = j.at("ensemble");
    require_keys(ens, "ensemble", {"n", "mode"});
    config.ensemble_n = ens.at("n").get<int>();
    if (config.ensemble_n < 2) throw ConfigError("ensemble: n must be >= 2");
    std::string mode = ens.at("mode").get<std::string>();
    if (mode == "quadrature")
        config.mode = EnsembleMode::Quadrature;
    else if (mode == "sample")
        config.mode = EnsembleMode::Sample;
    else
        throw ConfigError("ensemble: mode must be 'quadrature' or 'sample'");

    if (j.contains("montecarlo")) {
        const json& mc = j.at("montecarlo");
        require_keys(mc, "montecarlo", {"enabled", "n_borrowers"});
        config.mc_enabled = mc.at("enabled").get<bool>();
        config.mc_n_borrowers = mc.at("n_borrowers").get<long>();
        if (config.mc_n_borrowers < 1) throw ConfigError("montecarlo: n_borrowers must be >= 1");
    }
    config.seed = j.at("seed").get<std::uint64_t>();

    if (j.contains("outputs")) {
        const json& out = j.at("outputs");
        require_keys(out, "outputs", {}, {"csv_path", "report_path", "mc_csv_path"});
        config.csv_path = out.value("csv_path", config.csv_path);
        config.report_path = out.value("report_path", config.report_path);
        config.mc_csv_path = out.value("mc_csv_path", config.mc_csv_path);
    }
    if (j.contains("checks")) {
        if (!j.at("checks").is_array()) throw ConfigError("checks: must be an array");
        for (const json& c : j.at("checks")) {
            require_keys(c, "checks[]", {"type"}, {"tolerance"});
            CheckConfig check;
            check.type = c.at("type").get<std::string>();
            check.tolerance = c.value("tolerance", 1e-3);
            if (check.type != "burnout" && check.type != "selection" &&
                check.type != "monotone" && check.type != "sde")
                throw ConfigError("checks: unknown check '" + check.type + "'");
            bool stochastic_check = check.type == "sde";
            if (stochastic_check != config.model.stochastic())
                throw ConfigError("checks: '" + check.type + "' does not apply to this model");
            config.checks.push_back(check);
        }
    }
    return config;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_scenario(j);
}

json to_json(const ScenarioConfig& config) {
    json j;
    j["version"] = config.version;
    j["model"] = model_to_json(config.model);
    j["distribution"] = distribution_to_json(config.distribution);
    j["grid"] = {{"t_end", config.t_end}, {"dt", config.dt}};
    j["ensemble"] = {{"n", config.ensemble_n},
                     {"mode", config.mode == EnsembleMode::Quadrature ? "quadrature" : "sample"}};
    j["montecarlo"] = {{"enabled", config.mc_enabled}, {"n_borrowers", config.mc_n_borrowers}};
    j["seed"] = config.seed;
    j["outputs"] = {{"csv_path", config.csv_path},
                    {"report_path", config.report_path},
                    {"mc_csv_path", config.mc_csv_path}};
    json checks = json::array();
    for (const CheckConfig& c : config.checks)
        checks.push_back({{"type", c.type}, {"tolerance", c.tolerance}});
    j["checks"] = checks;
    return j;
}

void write_pool_path_csv(const PoolPath& path, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file);
    out << "t,pool_hazard,pool_survival,xvar,ess";
    for (const auto& [name, series] : path.extra) out << "," << name;
    out << "\n";
    for (Eigen::Index i = 0; i < path.grid.size(); ++i) {
        out << format_number(path.grid[i]) << "," << format_number(path.pool_hazard[i]) << ","
            << format_number(path.pool_survival[i]) << "," << format_number(path.xvar[i]) << ","
            << format_number(path.ess[i]);
        for (const auto& [name, series] : path.extra) out << "," << format_number(series[i]);
        out << "\n";
    }
}

void write_montecarlo_csv(const PoolSimResult& result, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file);
    out << "t,survivors,smm,empirical_hazard,ci_lo,ci_hi\n";
    for (Eigen::Index p = 0; p < result.smm.size(); ++p) {
        double h = result.empirical_hazard[p];
        double hw = result.ci_halfwidth[p];
        out << format_number(result.grid[p + 1]) << ","
            << result.survivors[static_cast<size_t>(p + 1)] << "," << format_number(result.smm[p])
            << "," << format_number(h) << "," << format_number(h - hw) << ","
            << format_number(h + hw) << "\n";
    }
}

RunOutcome run_scenario(const ScenarioConfig& config, bool quiet) {
    RunOutcome outcome;
    HazardSpec spec = config.model.build();
    Eigen::ArrayXd grid = make_grid(config.t_end, config.dt);

    StochasticTrajectory traj;
    bool all_pass = true;
    try {
        if (config.model.stochastic()) {
            traj = simulate_common_factor(spec, config.distribution, grid, config.ensemble_n,
                                          config.mode, config.seed);
            outcome.path = traj.pool;
            double clamp_fraction =
                static_cast<double>(traj.factor.clamp_count) /
                (static_cast<double>(traj.factor.hazard_matrix.rows()) *
                 static_cast<double>(grid.size() - 1));
            if (clamp_fraction > 1e-3)
                throw std::runtime_error("clamped hazard fraction exceeds 0.1%");
        } else {
            outcome.path = run_deterministic(spec, config.distribution, grid, config.ensemble_n,
                                             config.mode, config.seed);
        }

        for (const CheckConfig& check : config.checks) {
            std::ostringstream line;
            line << "check " << check.type << ": ";
            if (check.type == "burnout") {
                IdentityReport rep =
                    check_burnout_identity(spec, config.distribution, grid, config.ensemble_n,
                                           config.mode, config.seed, check.tolerance, 2);
                line << "max_residual=" << format_number(rep.max_abs_residual)
                     << " order=" << format_number(rep.order_estimate) << " "
                     << (rep.pass ? "PASS" : "FAIL");
                all_pass = all_pass && rep.pass;
            } else if (check.type == "selection") {
                IdentityReport rep = check_selection_identity(
                    spec, config.distribution, [](double, double f) { return f; },
                    [](double, double) { return 0.0; }, grid, config.ensemble_n, config.mode,
                    config.seed, check.tolerance);
                line << "max_residual=" << format_number(rep.max_abs_residual) << " "
                     << (rep.pass ? "PASS" : "FAIL");
                all_pass = all_pass && rep.pass;
            } else if (check.type == "monotone") {
                bool ok = check_monotone_burnout(outcome.path);
                line << (ok ? "PASS" : "FAIL");
                all_pass = all_pass && ok;
            } else {  // sde
                PoolSdeReport rep = check_pool_sde(traj, check.tolerance);
                line << "max_residual=" << format_number(rep.max_abs_residual)
                     << " cum_residual=" << format_number(rep.max_abs_cum_residual) << " "
                     << (rep.pass ? "PASS" : "FAIL");
                all_pass = all_pass && rep.pass;
            }
            outcome.report_lines.push_back(line.str());
        }

        write_pool_path_csv(outcome.path, config.csv_path);
        std::ofstream report(config.report_path);
        if (!report) throw std::runtime_error("cannot write " + config.report_path);
        for (const std::string& line : outcome.report_lines) report << line << "\n";

        if (config.mc_enabled) {
            PoolSimResult sim = simulate_pool(spec, config.distribution, grid,
                                              config.mc_n_borrowers, config.seed);
            write_montecarlo_csv(sim, config.mc_csv_path);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        outcome.status = RunStatus::NumericError;
        outcome.report_lines.push_back(std::string("numeric error: ") + e.what());
        if (!quiet) std::cerr << "numeric error: " << e.what() << "\n";
        return outcome;
    }

    if (!quiet)
        for (const std::string& line : outcome.report_lines) std::cout << line << "\n";
    outcome.status = all_pass ? RunStatus::Ok : RunStatus::CheckFailed;
    return outcome;
}

CsvTable read_csv(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::invalid_argument("cannot open " + file);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument(file + ": empty CSV");
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) table.columns.push_back(cell);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::vector<double> values;
        while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
        if (values.size() != table.columns.size())
            throw std::invalid_argument(file + ": ragged CSV row");
        rows.push_back(std::move(values));
    }
    table.data.resize(table.columns.size());
    for (size_t c = 0; c < table.columns.size(); ++c) {
        table.data[c].resize(static_cast<Eigen::Index>(rows.size()));
        for (size_t r = 0; r < rows.size(); ++r)
            table.data[c][static_cast<Eigen::Index>(r)] = rows[r][c];
    }
    return table;
}

CompareReport compare_runs(const std::string& csv_a, const std::string& csv_b, double tolerance) {
    CsvTable a = read_csv(csv_a);
    CsvTable b = read_csv(csv_b);
    if (a.columns != b.columns) throw std::invalid_argument("compare_runs: column mismatch");
    if (a.data.empty() || a.data[0].size() != b.data[0].size())
        throw std::invalid_argument("compare_runs: row count mismatch");
    if (((a.data[0] - b.data[0]).abs() > 1e-12).any())
        throw std::invalid_argument("compare_runs: grids do not match");

    CompareReport report;
    report.columns = a.columns;
    report.pass = true;
    for (size_t c = 0; c < a.columns.size(); ++c) {
        double delta = (a.data[c] - b.data[c]).abs().maxCoeff();
        report.max_abs_delta.push_back(delta);
        if (delta > tolerance) report.pass = false;
    }
    return report;
}

}  // namespace burnout
