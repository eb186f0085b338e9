// Command line front end: scenario runs, identity checks, frailty closed
// forms, borrower-level simulation, hazard-curve calibration, CSV diffing.

#include <CLI11.hpp>
#include <iostream>

#include "burnout/frailty_analytics.hpp"
#include "burnout/scenario.hpp"

namespace {

struct GlobalOptions {
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
    bool quiet = false;
    int threads = 0;  // accepted for interface stability; results never depend on it
};

std::string with_out_dir(const std::string& dir, const std::string& path) {
    if (dir.empty() || path.find('/') != std::string::npos) return path;
    return dir + "/" + path;
}

burnout::ScenarioConfig load_config(const std::string& file, const GlobalOptions& opts) {
    burnout::ScenarioConfig config = burnout::load_scenario(file);
    if (opts.seed_set) config.seed = opts.seed;
    config.csv_path = with_out_dir(opts.out_dir, config.csv_path);
    config.report_path = with_out_dir(opts.out_dir, config.report_path);
    config.mc_csv_path = with_out_dir(opts.out_dir, config.mc_csv_path);
    return config;
}

int run_command(const std::string& file, const GlobalOptions& opts, bool force_montecarlo,
                bool checks_only) {
    burnout::ScenarioConfig config = load_config(file, opts);
    if (force_montecarlo) config.mc_enabled = true;
    if (checks_only) config.mc_enabled = false;
    burnout::RunOutcome outcome = burnout::run_scenario(config, opts.quiet);
    return static_cast<int>(outcome.status);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heterogeneous-pool hazard dynamics: burnout identities, frailty closed forms, "
                 "and Monte Carlo pool simulation"};
    app.require_subcommand(1);

    GlobalOptions opts;
    app.add_option("--seed", opts.seed, "Override the config seed")
        ->each([&](const std::string&) { opts.seed_set = true; });
    app.add_option("--out", opts.out_dir, "Directory prefix for output files");
    app.add_flag("--quiet", opts.quiet, "Suppress report echo on stdout");
    app.add_option("--threads", opts.threads, "Worker cap (never changes results)");

    std::string config_file;
    auto* run = app.add_subcommand("run", "Run a scenario end to end");
    run->add_option("config", config_file, "Scenario JSON file")->required();

    auto* check = app.add_subcommand("check", "Run only the configured identity checks");
    check->add_option("config", config_file, "Scenario JSON file")->required();

    auto* simulate = app.add_subcommand("simulate", "Run only the Monte Carlo pool simulation");
    simulate->add_option("config", config_file, "Scenario JSON file")->required();

    auto* frailty = app.add_subcommand("frailty", "Evaluate frailty closed forms");
    std::string law = "gamma";
    double p1 = 2.0, p2 = 1.0, lambda = 0.2, t_eval = 0.0;
    frailty->add_option("--law", law, "gamma | lognormal | truncated_normal")
        ->check(CLI::IsMember({"gamma", "lognormal", "truncated_normal"}));
    frailty->add_option("--p1", p1, "shape k / log-mean mu / mean m");
    frailty->add_option("--p2", p2, "scale theta / log-std sigma / std s");
    frailty->add_option("--lambda", lambda, "constant common factor, per year");
    frailty->add_option("--t", t_eval, "evaluation time, years");

    auto* calibrate = app.add_subcommand("calibrate", "Fit a/(1+ct) to a hazard-curve CSV");
    std::string curve_file;
    std::string hazard_column = "pool_hazard";
    calibrate->add_option("csv", curve_file, "CSV with a 't' column and a hazard column")
        ->required();
    calibrate->add_option("--column", hazard_column, "Hazard column name");

    auto* compare = app.add_subcommand("compare", "Column-wise max-abs diff of two run CSVs");
    std::string csv_a, csv_b;
    double tolerance = 1e-10;
    compare->add_option("a", csv_a)->required();
    compare->add_option("b", csv_b)->required();
    compare->add_option("--tolerance", tolerance, "Pass threshold for every column");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return run_command(config_file, opts, false, false);
        if (check->parsed()) return run_command(config_file, opts, false, true);
        if (simulate->parsed()) return run_command(config_file, opts, true, false);

        if (frailty->parsed()) {
            if (law == "gamma") {
                double h = burnout::gamma_pool_hazard(p1, p2, lambda, t_eval);
                auto post = burnout::gamma_posterior(p1, p2, lambda, t_eval);
                std::cout << "pool_hazard=" << h << " posterior_shape=" << post.shape
                          << " posterior_scale=" << post.scale_t << " posterior_mean="
                          << post.mean() << "\n";
            } else if (law == "lognormal") {
                auto quad = burnout::lognormal_pool_hazard_quadrature(p1, p2, lambda, t_eval);
                double lap = burnout::lognormal_pool_hazard_laplace(p1, p2, lambda, t_eval);
                std::cout << "quadrature=" << quad.value << " laplace=" << lap
                          << " nodes=" << quad.nodes_used
                          << (quad.converged ? "" : " WARNING: quadrature not converged") << "\n";
            } else {
                auto res = burnout::truncated_normal_pool_hazard(p1, p2, lambda, t_eval);
                std::cout << "exact=" << res.exact << " linear_approx=" << res.linear_approx
                          << (res.domain_warning ? " WARNING: m <= 4s, expansion unreliable" : "")
                          << "\n";
            }
            return 0;
        }

        if (calibrate->parsed()) {
            burnout::CsvTable table = burnout::read_csv(curve_file);
            auto find = [&](const std::string& name) -> const Eigen::ArrayXd& {
                for (size_t c = 0; c < table.columns.size(); ++c)
                    if (table.columns[c] == name) return table.data[c];
                throw std::invalid_argument("column not found: " + name);
            };
            auto fit = burnout::calibrate_gamma(find("t"), find(hazard_column));
            std::cout << "initial_pool_hazard=" << fit.initial_pool_hazard
                      << " decay=" << fit.decay << " rms_error=" << fit.rms_error
                      << " iterations=" << fit.iterations << "\n"
                      << "note: only the initial pool hazard and the theta*lambda product are "
                         "identifiable; k, theta, lambda are not separable\n";
            return 0;
        }

        if (compare->parsed()) {
            burnout::CompareReport rep = burnout::compare_runs(csv_a, csv_b, tolerance);
            for (size_t c = 0; c < rep.columns.size(); ++c)
                std::cout << rep.columns[c] << " max_abs_delta=" << rep.max_abs_delta[c] << "\n";
            std::cout << (rep.pass ? "PASS" : "FAIL") << "\n";
            return rep.pass ? 0 : 1;
        }
    } catch (const burnout::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
