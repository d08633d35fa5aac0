#pragma once
// Experiment configuration: a flat key = value file format ('#' comments,
// comma-separated lists), and a canonical printed form whose FNV hash is
// recorded as provenance.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcpd/bounds.hpp"
#include "mcpd/models.hpp"
#include "mcpd/procedures.hpp"

namespace mcpd {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    // scenario
    std::string scenario = "gaussian"; // gaussian | pvalue_glr
    double mu0 = 0.0;
    double mu1 = 1.0;
    double sigma = 1.0;
    double b_min = 10.0;
    double b_max = 20.0;

    // population and prior
    int K = 100;
    double rho = 0.01;
    double rho_assumed = -1.0; // <0: use rho

    // procedures
    double alpha = 0.1;
    std::vector<ProcedureKind> procedures = {ProcedureKind::SMap, ProcedureKind::ISMap};

    // proportions and risk weights: scalars for single runs, grids for sweeps
    double q = 0.5;
    double c = 0.2;
    std::vector<double> q_grid;    // default 0.05, 0.10, ..., 1.00
    std::vector<double> c_grid;    // default 0.0, 0.1, ..., 1.0
    std::vector<int> k_grid;       // default 10, 100, 200, 500, 1000

    // Monte Carlo
    long runs = 1000;
    std::uint64_t seed = 20260809ull;
    long horizon = 0; // 0: auto, max(50/rho, 10 * ismap_upper_bound)
    int threads = 0;  // 0: hardware concurrency

    std::string out = "mcpd_out";

    ExperimentConfig() {
        for (int m = 1; m <= 20; ++m) q_grid.push_back(0.05 * m);
        for (int i = 0; i <= 10; ++i) c_grid.push_back(0.1 * i);
        k_grid = {10, 100, 200, 500, 1000};
    }

    double effective_rho_assumed() const { return rho_assumed < 0.0 ? rho : rho_assumed; }

    long effective_horizon() const {
        if (horizon > 0) return horizon;
        const double by_prior = 50.0 / rho;
        const double by_bound = 10.0 * bounds::ismap_upper_bound(alpha, effective_rho_assumed());
        return static_cast<long>(std::ceil(std::max(by_prior, by_bound)));
    }

    ScenarioModel model() const {
        if (scenario == "gaussian") return ScenarioModel::gaussian(mu0, mu1, sigma);
        if (scenario == "pvalue_glr") return ScenarioModel::pvalue_beta(b_min, b_max);
        throw ConfigError("unknown scenario '" + scenario + "' (gaussian | pvalue_glr)");
    }

    void validate() const {
        model(); // checks scenario parameters
        if (K < 1) throw ConfigError("K must be >= 1");
        if (!(rho > 0.0) || !(rho < 1.0)) throw ConfigError("rho must lie in (0,1)");
        const double ra = effective_rho_assumed();
        if (!(ra > 0.0) || !(ra < 1.0)) throw ConfigError("rho_assumed must lie in (0,1)");
        if (!(alpha > 0.0) || !(alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
        if (procedures.empty()) throw ConfigError("procedures must not be empty");
        if (!(q >= 0.0) || !(q <= 1.0)) throw ConfigError("q must lie in [0,1]");
        if (!(c >= 0.0) || !(c <= 1.0)) throw ConfigError("c must lie in [0,1]");
        if (q_grid.empty() || c_grid.empty() || k_grid.empty())
            throw ConfigError("grids must not be empty");
        for (double v : q_grid)
            if (!(v >= 0.0) || !(v <= 1.0)) throw ConfigError("q_grid entries must lie in [0,1]");
        for (double v : c_grid)
            if (!(v >= 0.0) || !(v <= 1.0)) throw ConfigError("c_grid entries must lie in [0,1]");
        for (int v : k_grid)
            if (v < 1) throw ConfigError("k_grid entries must be >= 1");
        if (runs < 1) throw ConfigError("runs must be >= 1");
        if (horizon < 0) throw ConfigError("horizon must be >= 0 (0 = auto)");
        if (threads < 0) throw ConfigError("threads must be >= 0 (0 = auto)");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::string unquote(std::string s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

inline double parse_real(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for '" + key + "': " + v);
    }
}

inline long parse_long(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for '" + key + "': " + v);
    }
}

inline std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace detail

inline void apply_config_line(ExperimentConfig& cfg, const std::string& key,
                              const std::string& raw_value) {
    using detail::parse_long;
    using detail::parse_real;
    const std::string value = detail::unquote(detail::trim(raw_value));
    if (key == "scenario") cfg.scenario = value;
    else if (key == "mu0") cfg.mu0 = parse_real(key, value);
    else if (key == "mu1") cfg.mu1 = parse_real(key, value);
    else if (key == "sigma") cfg.sigma = parse_real(key, value);
    else if (key == "b_min") cfg.b_min = parse_real(key, value);
    else if (key == "b_max") cfg.b_max = parse_real(key, value);
    else if (key == "K") cfg.K = static_cast<int>(parse_long(key, value));
    else if (key == "rho") cfg.rho = parse_real(key, value);
    else if (key == "rho_assumed") cfg.rho_assumed = parse_real(key, value);
    else if (key == "alpha") cfg.alpha = parse_real(key, value);
    else if (key == "procedures" || key == "procedure") {
        cfg.procedures.clear();
        for (const auto& name : detail::split_list(value)) {
            const auto kind = procedure_from_string(detail::unquote(name));
            if (!kind) throw ConfigError("unknown procedure '" + name + "'");
            cfg.procedures.push_back(*kind);
        }
    } else if (key == "q") cfg.q = parse_real(key, value);
    else if (key == "c") cfg.c = parse_real(key, value);
    else if (key == "q_grid") {
        cfg.q_grid.clear();
        for (const auto& v : detail::split_list(value)) cfg.q_grid.push_back(parse_real(key, v));
    } else if (key == "c_grid") {
        cfg.c_grid.clear();
        for (const auto& v : detail::split_list(value)) cfg.c_grid.push_back(parse_real(key, v));
    } else if (key == "k_grid") {
        cfg.k_grid.clear();
        for (const auto& v : detail::split_list(value))
            cfg.k_grid.push_back(static_cast<int>(parse_long(key, v)));
    } else if (key == "runs") cfg.runs = parse_long(key, value);
    else if (key == "seed") {
        try {
            std::size_t pos = 0;
            cfg.seed = static_cast<std::uint64_t>(std::stoull(value, &pos));
            if (pos != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw ConfigError("bad integer value for 'seed': " + value);
        }
    }
    else if (key == "horizon") cfg.horizon = parse_long(key, value);
    else if (key == "threads") cfg.threads = static_cast<int>(parse_long(key, value));
    else if (key == "out") cfg.out = value;
    else throw ConfigError("unknown config key '" + key + "'");
}

inline void load_config_stream(ExperimentConfig& cfg, std::istream& in,
                               const std::string& origin) {
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        apply_config_line(cfg, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
    }
}

inline void load_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    load_config_stream(cfg, in, path);
}

inline std::string print_config(const ExperimentConfig& cfg) {
    using detail::format_real;
    std::ostringstream os;
    auto list_reals = [&](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ", ";
            s += format_real(v[i]);
        }
        return s;
    };
    os << "scenario = " << cfg.scenario << "\n";
    if (cfg.scenario == "gaussian") {
        os << "mu0 = " << format_real(cfg.mu0) << "\n";
        os << "mu1 = " << format_real(cfg.mu1) << "\n";
        os << "sigma = " << format_real(cfg.sigma) << "\n";
    } else {
        os << "b_min = " << format_real(cfg.b_min) << "\n";
        os << "b_max = " << format_real(cfg.b_max) << "\n";
    }
    os << "K = " << cfg.K << "\n";
    os << "rho = " << format_real(cfg.rho) << "\n";
    os << "rho_assumed = " << format_real(cfg.effective_rho_assumed()) << "\n";
    os << "alpha = " << format_real(cfg.alpha) << "\n";
    os << "procedures = ";
    for (std::size_t i = 0; i < cfg.procedures.size(); ++i) {
        if (i) os << ", ";
        os << to_string(cfg.procedures[i]);
    }
    os << "\n";
    os << "q = " << format_real(cfg.q) << "\n";
    os << "c = " << format_real(cfg.c) << "\n";
    os << "q_grid = " << list_reals(cfg.q_grid) << "\n";
    os << "c_grid = " << list_reals(cfg.c_grid) << "\n";
    os << "k_grid = ";
    for (std::size_t i = 0; i < cfg.k_grid.size(); ++i) {
        if (i) os << ", ";
        os << cfg.k_grid[i];
    }
    os << "\n";
    os << "runs = " << cfg.runs << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "horizon = " << cfg.horizon << "\n";
    os << "threads = " << cfg.threads << "\n";
    os << "out = " << cfg.out << "\n";
    return os.str();
}

// FNV-1a over the canonical printed form.
inline std::uint64_t config_hash(const ExperimentConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char ch : print_config(cfg)) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace mcpd
