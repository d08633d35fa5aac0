// mcpd command-line front end.
//
//   mcpd run      one experiment (scalar q and c) -> CSV + JSON summary
//   mcpd sweep    q / c / K grids                 -> CSV + JSON + best-q table
//   mcpd bounds   asymptotic ADD bound curves     -> CSV
//   mcpd validate built-in invariant suite
//
// Exit codes: 0 success, 1 validation failure, 2 config error,
// 3 censoring-gate failure.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcpd/bounds.hpp"
#include "mcpd/config.hpp"
#include "mcpd/harness.hpp"
#include "mcpd/validate.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out;
    long runs = -1;
    long long seed = -1;
    int threads = -1;
    bool print_config = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "key = value config file");
    cmd->add_option("--out", args.out, "output path prefix (overrides config)");
    cmd->add_option("--runs", args.runs, "Monte Carlo replications (overrides config)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", args.seed, "base seed (overrides config)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--threads", args.threads, "worker threads, 0 = hardware (overrides config)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_flag("--print-config", args.print_config, "print the effective config and exit");
}

mcpd::ExperimentConfig build_config(const CommonArgs& args) {
    mcpd::ExperimentConfig cfg;
    if (!args.config_path.empty()) mcpd::load_config_file(cfg, args.config_path);
    if (args.runs >= 0) cfg.runs = args.runs;
    if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
    if (args.threads >= 0) cfg.threads = args.threads;
    if (!args.out.empty()) cfg.out = args.out;
    return cfg;
}

nlohmann::json config_json(const mcpd::ExperimentConfig& cfg) {
    nlohmann::json j;
    j["scenario"] = cfg.scenario;
    if (cfg.scenario == "gaussian") {
        j["mu0"] = cfg.mu0;
        j["mu1"] = cfg.mu1;
        j["sigma"] = cfg.sigma;
    } else {
        j["b_min"] = cfg.b_min;
        j["b_max"] = cfg.b_max;
    }
    j["K"] = cfg.K;
    j["rho"] = cfg.rho;
    j["rho_assumed"] = cfg.effective_rho_assumed();
    j["alpha"] = cfg.alpha;
    std::vector<std::string> procs;
    for (auto p : cfg.procedures) procs.emplace_back(mcpd::to_string(p));
    j["procedures"] = procs;
    j["q"] = cfg.q;
    j["c"] = cfg.c;
    j["q_grid"] = cfg.q_grid;
    j["c_grid"] = cfg.c_grid;
    j["k_grid"] = cfg.k_grid;
    j["runs"] = cfg.runs;
    j["seed"] = cfg.seed;
    j["horizon"] = cfg.effective_horizon();
    j["threads"] = cfg.threads;
    return j;
}

nlohmann::json result_json(const mcpd::ExperimentConfig& cfg, const mcpd::SweepResult& res) {
    nlohmann::json j;
    j["config"] = config_json(cfg);
    char hash_buf[32];
    std::snprintf(hash_buf, sizeof hash_buf, "%016llx",
                  static_cast<unsigned long long>(res.config_hash));
    j["config_hash"] = hash_buf;
    j["seed"] = res.seed;
    j["gate_failures"] = res.gate_failures;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : res.rows) {
        nlohmann::json row;
        row["procedure"] = mcpd::to_string(r.procedure);
        row["scenario"] = r.scenario;
        row["K"] = r.K;
        row["q"] = r.q;
        row["alpha"] = r.alpha;
        row["rho"] = r.rho;
        row["rho_assumed"] = r.rho_assumed;
        row["c"] = r.c;
        row["fdr"] = r.m.fdr;
        row["se_fdr"] = r.m.se_fdr;
        row["add"] = r.m.add;
        row["se_add"] = r.m.se_add;
        row["ano"] = r.m.ano;
        row["se_ano"] = r.m.se_ano;
        row["weighted_risk"] = r.m.weighted_risk;
        row["censored_fraction"] = r.m.censored_fraction;
        row["n_runs"] = r.m.n_runs;
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    nlohmann::json best = nlohmann::json::array();
    for (const auto& b : res.best_q) {
        nlohmann::json row;
        row["K"] = b.K;
        row["c"] = b.c;
        row["procedure"] = mcpd::to_string(b.procedure);
        row["best_q"] = b.best_q;
        row["risk"] = b.risk;
        row["monotone_nonincreasing"] = b.monotone_nonincreasing;
        best.push_back(std::move(row));
    }
    j["best_q"] = std::move(best);
    return j;
}

int emit_results(const mcpd::ExperimentConfig& cfg, const mcpd::SweepResult& res,
                 const mcpd::BoundsColumns& bc, bool with_best_q) {
    mcpd::write_text_file(cfg.out + ".csv", mcpd::sweep_to_csv(res, bc));
    mcpd::write_text_file(cfg.out + ".json", result_json(cfg, res).dump(2) + "\n");
    if (with_best_q) mcpd::write_text_file(cfg.out + "_bestq.csv", mcpd::best_q_to_csv(res));
    std::cout << "wrote " << cfg.out << ".csv (" << res.rows.size() << " rows), " << cfg.out
              << ".json\n";
    if (!res.gate_failures.empty()) {
        std::cerr << "censoring gate exceeded 1% in " << res.gate_failures.size() << " cell(s):\n";
        for (const auto& g : res.gate_failures) std::cerr << "  " << g << "\n";
        return 3;
    }
    return 0;
}

mcpd::BoundsColumns bounds_columns_for(const mcpd::ExperimentConfig& cfg, bool enabled,
                                       double g_star) {
    mcpd::BoundsColumns bc;
    bc.enabled = enabled;
    bc.g_star = g_star;
    if (!enabled) return bc;
    const auto model = cfg.model();
    // the p-value scenario has a per-stream KL; use the interval midpoint
    bc.kl = model.kind == mcpd::ScenarioKind::GaussianMeanShift
                ? mcpd::kl_divergence(model)
                : mcpd::kl_divergence(model, 0.5 * (cfg.b_min + cfg.b_max));
    return bc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian multi-stream change-point detection under observation budgets"};
    app.require_subcommand(1);

    CommonArgs run_args, sweep_args;
    std::string records_path;
    bool sweep_bounds = false;
    double sweep_gstar = 1.0;

    auto* run_cmd = app.add_subcommand("run", "run one experiment at the configured q and c");
    add_common(run_cmd, run_args);
    run_cmd->add_option("--records", records_path, "also write per-run records to this file");

    auto* sweep_cmd = app.add_subcommand("sweep", "sweep the q / c / K grids");
    add_common(sweep_cmd, sweep_args);
    sweep_cmd->add_flag("--bounds", sweep_bounds, "append asymptotic bound columns to the CSV");
    sweep_cmd->add_option("--gstar", sweep_gstar, "mean sampling interval for the g* bounds")
        ->check(CLI::Range(1.0, 1e9));

    double b_alpha = 0.1, b_rho = 0.01, b_kl = 0.5, b_gstar = 1.0, b_eta = 0.1, b_zeta = 1.0;
    std::vector<long> b_ks = {10, 100, 200, 500, 1000};
    std::string b_out;
    auto* bounds_cmd = app.add_subcommand("bounds", "emit asymptotic ADD bound curves");
    bounds_cmd->add_option("--alpha", b_alpha)->check(CLI::Range(1e-12, 1.0));
    bounds_cmd->add_option("--rho", b_rho)->check(CLI::Range(1e-12, 1.0));
    bounds_cmd->add_option("--kl", b_kl, "KL divergence D(f1||f0)")->check(CLI::NonNegativeNumber);
    bounds_cmd->add_option("--gstar", b_gstar)->check(CLI::Range(1.0, 1e9));
    bounds_cmd->add_option("--eta", b_eta, "threshold parameter for the single-rule bound");
    bounds_cmd->add_option("--zeta", b_zeta, "mean interval for the single-rule bound")
        ->check(CLI::Range(1.0, 1e9));
    bounds_cmd->add_option("--K", b_ks, "stream counts to tabulate");
    bounds_cmd->add_option("--out", b_out, "write CSV here instead of stdout");

    long long v_seed = 20260809;
    auto* validate_cmd = app.add_subcommand("validate", "run the built-in invariant suite");
    validate_cmd->add_option("--seed", v_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e); // prints the message; 0 for --help
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run_cmd) {
            mcpd::ExperimentConfig cfg = build_config(run_args);
            cfg.q_grid = {cfg.q};
            cfg.c_grid = {cfg.c};
            cfg.k_grid = {cfg.K};
            if (run_args.print_config) {
                std::cout << mcpd::print_config(cfg);
                return 0;
            }
            cfg.validate();
            std::vector<std::string> lines;
            const auto res = mcpd::run_experiment(cfg, records_path.empty() ? nullptr : &lines);
            if (!records_path.empty()) {
                std::string text;
                for (const auto& l : lines) {
                    text += l;
                    text += '\n';
                }
                mcpd::write_text_file(records_path, text);
            }
            return emit_results(cfg, res, mcpd::BoundsColumns{}, false);
        }
        if (*sweep_cmd) {
            mcpd::ExperimentConfig cfg = build_config(sweep_args);
            if (sweep_args.print_config) {
                std::cout << mcpd::print_config(cfg);
                return 0;
            }
            cfg.validate();
            const auto res = mcpd::run_experiment(cfg);
            return emit_results(cfg, res, bounds_columns_for(cfg, sweep_bounds, sweep_gstar),
                                true);
        }
        if (*bounds_cmd) {
            std::string csv = "K,seq_term,add_lb,smap_ub,ismap_ub,smap_ub_gstar,ismap_ub_gstar,"
                              "prop1_ub,ratio_limit\n";
            for (long k : b_ks) {
                const auto pair = mcpd::bounds::gstar_upper_bounds(b_alpha, b_rho, b_kl, b_gstar, k);
                csv += std::to_string(k);
                csv += ',';
                csv += mcpd::format_g(mcpd::bounds::seq_term(k));
                csv += ',';
                csv += mcpd::format_g(mcpd::bounds::add_lower_bound(b_alpha, b_kl, b_rho));
                csv += ',';
                csv += mcpd::format_g(mcpd::bounds::smap_upper_bound(b_alpha, b_rho, k));
                csv += ',';
                csv += mcpd::format_g(mcpd::bounds::ismap_upper_bound(b_alpha, b_rho));
                csv += ',';
                csv += mcpd::format_g(pair.smap);
                csv += ',';
                csv += mcpd::format_g(pair.ismap);
                csv += ',';
                csv += mcpd::format_g(mcpd::bounds::prop1_upper_bound(b_eta, b_rho, b_kl, b_zeta));
                csv += ',';
                csv += mcpd::format_g(mcpd::bounds::ratio_limit(b_alpha));
                csv += '\n';
            }
            if (b_out.empty())
                std::cout << csv;
            else
                mcpd::write_text_file(b_out, csv);
            return 0;
        }
        if (*validate_cmd) {
            const auto checks = mcpd::run_validation(static_cast<std::uint64_t>(v_seed));
            bool all_ok = true;
            for (const auto& c : checks) {
                std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << " (" << c.detail
                          << ")\n";
                all_ok = all_ok && c.passed;
            }
            return all_ok ? 0 : 1;
        }
    } catch (const mcpd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
